#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qspan/gf2.hpp"
#include "qspan/pauli.hpp"

namespace qspan {

// Subgroup of the n-qubit Pauli group, stored as an independent generating set
// in reduced row echelon form over the symplectic bits (column order: x_0..x_{n-1},
// z_0..z_{n-1}). The RREF makes the representation canonical for a given row
// space, so equal groups compare equal generator-by-generator.
//
// When `with_signs` is set the generators carry exact +-1 phases and the group
// is required to be a legal stabilizer span: Hermitian generators, no -I in the
// span (which also forces commutativity). Unsigned groups are projective; rows
// are kept as Hermitian-positive lifts and may generate a non-abelian group
// (e.g. the full Pauli string group).
struct PauliSubgroup {
    int n_qubits = 0;
    bool with_signs = false;
    bool abelian = true;
    std::vector<PauliString> gens;  // RREF rows, sorted by pivot column
    std::vector<int> pivots;        // pivot column of each row

    int dim() const { return static_cast<int>(gens.size()); }

    static PauliSubgroup trivial(int n, bool with_signs = false);

    bool operator==(const PauliSubgroup& o) const {
        return n_qubits == o.n_qubits && with_signs == o.with_signs && gens == o.gens;
    }
};

// Reduce a list of generators to canonical form. Dependent inputs are dropped
// (duplicates counted in *dropped_out if given). In signed mode a dependent
// input whose sign contradicts the span (product equals -I) raises
// stabilizer_error, as does any anticommuting pair of inputs.
PauliSubgroup canonicalize(const std::vector<PauliString>& gens, int n_qubits,
                           bool with_signs, int* dropped_out = nullptr);

struct Membership {
    bool member = false;  // projective membership
    int sign = 0;         // signed groups: s such that s * lift(g) is in the group
    Gf2Vec combo;         // decomposition over the group's reduced generators
};

// GF(2) solve of g against the reduced basis. Sign is only populated for
// signed groups (which are abelian, so the decomposition order is immaterial).
Membership contains(const PauliSubgroup& G, const PauliString& g);
Membership contains(const PauliSubgroup& G, const ProjectivePauli& g);

// Generators of A intersect B (Zassenhaus over the joint row space). The result
// carries signs only when both inputs do, with signs inherited from A.
PauliSubgroup intersect(const PauliSubgroup& A, const PauliSubgroup& B);

// Subgroup of A commuting with every generator of B, via the nullspace of the
// commutation matrix over A's generator combos.
PauliSubgroup centralizer_within(const PauliSubgroup& A, const PauliSubgroup& B);

// The full projective Pauli string group on n qubits (dim 2n, non-abelian).
PauliSubgroup full_pauli_group(int n);

// Embed a group on `local` qubits into a width-`total` register at `offset`
// (identity elsewhere). Signs carried over.
PauliSubgroup embed(const PauliSubgroup& local, int offset, int total);

// Every element as a Hermitian-positive lift (unsigned) or the exact signed
// member (signed groups). Deterministic order: combo index over the reduced
// generators, combo bit i = generator i. Guarded at 2^22 elements.
std::vector<PauliString> elements(const PauliSubgroup& G);

// Generators of `sup` that are independent modulo `sub` (in sup's stored order).
std::vector<PauliString> extend_basis(const PauliSubgroup& sub, const PauliSubgroup& sup);

// Aligned generating sets for a maximal abelian S and an abelian Z on the same
// register:
//   h_list           basis of S ∩ Z
//   g_list           extends h_list to S ∩ C(Z)
//   g_tilde_list     extends further to S
//   h_tilde_list     extends h_list to Z
// with the diagonal anticommutation pattern {g_tilde_j, h_tilde_k} = 0 iff j==k
// and all other cross-pairs commuting. Combos decompose each h/g/g_tilde over
// S's reduced generators (used for outcome relabeling downstream).
struct AlignedGenerators {
    int ell = 0;
    std::vector<PauliString> h_list, g_list, g_tilde_list, h_tilde_list;
    std::vector<Gf2Vec> h_combos, g_combos, g_tilde_combos;
};

AlignedGenerators align_generators(const PauliSubgroup& S, const PauliSubgroup& Z);

// Bipartite generator decomposition of a maximal abelian group: local subgroups
// on each side of the cut plus p anticommuting nonlocal pairs.
struct NonlocalPair {
    PauliString g, g_bar;            // full-width operators
    ProjectivePauli g_a, g_b;        // restrictions of g
    ProjectivePauli g_bar_a, g_bar_b;
};

struct EntanglementDecomposition {
    int p = 0;
    PauliSubgroup S_A, S_B;  // on the local registers (widths n_a, n_b)
    std::vector<NonlocalPair> nonlocal_pairs;
};

EntanglementDecomposition entanglement_decomposition(const PauliSubgroup& S, int n_a);

// Coset table of H in S with lexicographically minimal representatives
// (letter order I < X < Y < Z, qubit 0 first). Cosets sorted by representative.
struct Coset {
    ProjectivePauli rep;
    std::vector<ProjectivePauli> members;
};

struct CosetTable {
    std::vector<Coset> cosets;
};

CosetTable coset_table(const PauliSubgroup& S, const PauliSubgroup& H);

// Double cosets S / (S_A S_B) for local subgroups on the two sides of a cut.
// Each entry also carries the distinct restrictions of its members to either side.
struct DoubleCoset {
    ProjectivePauli rep;
    std::vector<ProjectivePauli> members;  // full width
    std::vector<ProjectivePauli> a_parts;  // distinct A-side restrictions
    std::vector<ProjectivePauli> b_parts;  // distinct B-side restrictions
};

struct DoubleCosetTable {
    int n_a = 0, n_b = 0;
    std::vector<DoubleCoset> cosets;
};

DoubleCosetTable double_coset_table(const PauliSubgroup& S, const PauliSubgroup& S_A_local,
                                    const PauliSubgroup& S_B_local);

// Squared overlap |<psi1|psi2>|^2 of the two stabilizer states: equals
// 2^-n |S1 ∩ S2| when all signs agree on the intersection, else 0. Both groups
// must be maximal and signed. The value is dyadic, so a double is exact.
double stabilizer_overlap(const PauliSubgroup& S1, const PauliSubgroup& S2);

// Number of Z-free strings in the centralizer of an abelian H on t qubits:
// (1/|H|) sum_h 3^{n_I(h)} (-1)^{n_Z(h)}, exact integer arithmetic.
std::uint64_t zfree_centralizer_count(const PauliSubgroup& H);

// Text format: one signed Pauli per line, '#' comments, blank lines ignored.
struct GroupLoadResult {
    PauliSubgroup group;
    int dropped = 0;  // dependent inputs removed by canonicalization
};

GroupLoadResult load_group(std::istream& in, bool with_signs);
GroupLoadResult load_group_text(const std::string& text, bool with_signs);
std::string save_group(const PauliSubgroup& G);

}  // namespace qspan
