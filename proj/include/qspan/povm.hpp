#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qspan/circuit.hpp"
#include "qspan/dense.hpp"
#include "qspan/group.hpp"
#include "qspan/pauli.hpp"

namespace qspan {

// What sits on the ancilla register. `stabilizer` carries a signed maximal
// group whose +1 eigenstate is the ancilla; `magic_t_power` is |T>^{tensor k};
// `dense_state` is an explicit vector; `generic` assumes every Pauli
// expectation is nonzero (the almost-every-pure-state case).
enum class AncillaKind { stabilizer, magic_t_power, dense, generic };

struct AncillaSpec {
    AncillaKind kind = AncillaKind::generic;
    int size = 0;         // register width m
    PauliSubgroup group;  // stabilizer kind only
    DenseState psi;       // dense kind only

    static AncillaSpec stabilizer(PauliSubgroup g);
    static AncillaSpec magic_t_power(int t);
    static AncillaSpec dense_state(DenseState psi);
    static AncillaSpec generic(int m);
};

void validate_ancilla(const AncillaSpec& a);

// Relabeled outcome coordinates. An element is nonzero iff `vanishing` == 0;
// `repeat_index` enumerates identical copies; `effective` is the sign pattern
// applied to the effective generators.
struct OutcomeLabel {
    std::uint32_t vanishing = 0;
    std::uint32_t repeat_index = 0;
    std::uint32_t effective = 0;
};

// Normal form of the effective POVM of a stabilizer measurement with a
// stabilizer ancilla: 2^{n+m-ell} nonzero outcomes, each element a product of
// projectors onto signed effective generators, scaled by 2^{ell-m} and
// repeated 2^{m-ell} times.
struct StabilizerPovmForm {
    int n = 0, m = 0, ell = 0;
    std::vector<ProjectivePauli> effective_generators;  // n data-register directions
    std::vector<int> sign_vector;                       // +-1 per generator
    std::vector<OutcomeLabel> outcome_relabel;          // physical outcome -> labels
    std::uint64_t nonzero_outcomes = 0;
    std::uint64_t multiplicity = 0;
    double scale = 0.0;
};

// S: signed maximal group on n+m qubits (the measured basis). Z: signed
// maximal group on the m ancilla qubits (the ancilla state's group).
StabilizerPovmForm stabilizer_effective_povm(const PauliSubgroup& S, const PauliSubgroup& Z,
                                             int n);

enum class FourierDirection { forward, inverse };

// Character-sum transform between outcome-indexed families {mu_b} and
// group-element-indexed families {mu'_xi}: forward divides by the family
// size, inverse does not; the round trip is the identity.
std::vector<DenseOperator> group_fourier(const std::vector<DenseOperator>& family,
                                         FourierDirection dir);

struct SpanBounds {
    int necessary_t = 0;           // smallest t with 3^t >= 4^n
    std::uint64_t lower = 0;       // guaranteed minimum (pure ancillas)
    std::uint64_t upper = 0;       // proven ceiling for this configuration
    std::uint64_t best_known = 0;  // constructive target when no tight ceiling is known (0 = n/a)
};

// A post-projection generator whose measurement syndrome is pinned by the
// gadget projections rather than free to vary over outcomes.
struct PinnedGenerator {
    std::string generator;
    int sign = 1;
};

struct EffectivePovmReport {
    int n = 0, m = 0, t = 0;
    std::uint64_t s_mu = 0;
    int p = 0;                         // bipartite entanglement of the measured basis
    std::optional<std::uint64_t> k;    // s_mu = k * 2^{n-p} when the clean structure holds
    std::vector<ProjectivePauli> reconstructed_directions;
    std::uint64_t surviving_cosets = 0;
    std::uint64_t killed_cosets = 0;
    bool ic = false;
    SpanBounds bounds;
    std::optional<bool> oracle_checked;       // set only when a dense cross-check ran
    std::optional<int> free_generators;       // doped analyses only
    std::vector<PinnedGenerator> pinned_generators;  // doped analyses only
    std::vector<std::string> warnings;
};

// Span dimension of the effective POVM when a maximal abelian S on n+m qubits
// is measured with the given ancilla. Survival is decided per double coset of
// the local subgroups: stabilizer ancillas keep cosets whose ancilla side
// meets the ancilla group, |T>^m keeps cosets with a Z-free ancilla member,
// dense ancillas keep cosets with |<psi| g |psi>| above tolerance, generic
// keeps everything.
EffectivePovmReport span_dimension(const PauliSubgroup& S, int n, const AncillaSpec& ancilla,
                                   double dense_tol = 1e-9);

// Full pipeline for a T-doped circuit: gadgetize, evolve the measured basis
// and the gadget projections into the Heisenberg picture, project the
// stabilizer ancillas, and compute the exact span of the surviving family.
// The ancilla must be a stabilizer spec ('physical_measurement' is the signed
// measurement basis on the n+m physical qubits).
EffectivePovmReport analyze_doped(const DopedCircuit& c,
                                  const PauliSubgroup& physical_measurement,
                                  const AncillaSpec& ancilla);

// Same analysis for a measurement already given in Heisenberg form: commuting
// independent generators on n+m+t qubits (registers in that order), the first
// n+m carrying the physical outcome bits, the last t pinned to +1 by gadget
// projections. analyze_doped reduces to this after evolving its circuit.
EffectivePovmReport analyze_evolved(const std::vector<PauliString>& evolved, int n, int m, int t,
                                    const AncillaSpec& ancilla);

// Rank bounds, exact integer arithmetic throughout.
std::uint64_t bound_t_le_n(int n, int t);   // 2^{n-t} 3^t, requires t <= n
std::uint64_t bound_t_gt_n(int n, int t);   // 2^{-l} (3^{a+1}-1)^r (3^a-1)^{l-r}, requires t > n
int necessary_t(int n);                     // smallest t with 3^t >= 4^n

// True iff every coset of pi_t(S) / S_t_projection has a Z-free representative.
bool ic_condition_check(const PauliSubgroup& S_t_projection, const PauliSubgroup& pi_t_S);

// Stable serialization (schema version 1).
std::string report_to_json(const EffectivePovmReport& r);
std::string report_csv_header();
std::string report_csv_row(const EffectivePovmReport& r);

// Oracle couplings: compute s_mu by brute force for the same configuration.
// The generic ancilla kind draws a seeded random state, so a caller must
// provide the RNG for it.
std::uint64_t dense_s_mu_for_group(const PauliSubgroup& S_signed, int n,
                                   const AncillaSpec& ancilla, Rng* generic_rng = nullptr,
                                   double tol = 1e-9);
std::uint64_t dense_s_mu_for_doped(const DopedCircuit& c, const PauliSubgroup& phys_signed,
                                   const AncillaSpec& ancilla, double tol = 1e-9);

}  // namespace qspan
