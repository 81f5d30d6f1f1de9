#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qspan/circuit.hpp"
#include "qspan/dense.hpp"
#include "qspan/group.hpp"
#include "qspan/povm.hpp"

namespace qspan {

// What a scan is trying to refute or saturate. conjecture_2n probes for IC
// measurements below the 2n doping threshold, conjecture_maxent probes whether
// a less-entangled basis can ever beat the maximally entangled one for a fixed
// ancilla state, random_doped_scan samples circuits and checks every structural
// invariant on the way, bound_saturation hunts for the 2^{n-t} 3^t ceiling.
enum class TaskKind {
    conjecture_2n,
    conjecture_maxent,
    random_doped_scan,
    bound_saturation,
};

// Caps are mandatory: a task file without them is rejected, and a scan that
// hits either cap reports itself incomplete instead of silently truncating.
struct SearchBudget {
    std::uint64_t max_candidates = 0;
    double max_seconds = 0.0;
};

struct ShardSpec {
    int index = 0;
    int count = 1;
};

// samples == 0 selects exhaustive mode where the kind supports it; otherwise
// it is the number of seeded random draws. Shards partition the candidate
// stream by index, so the union of all shards equals the unsharded run.
struct SearchTask {
    TaskKind kind = TaskKind::conjecture_2n;
    int n = 1;
    int m = 0;
    int t = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    ShardSpec shard;
    int threads = 1;
    bool symmetry_reduce = false;
    SearchBudget budget;
};

SearchTask task_from_json(const std::string& text);
std::string task_to_json(const SearchTask& task);

struct SearchWitness {
    std::string label;
    std::string group_text;    // save_group form, empty when not applicable
    std::string circuit_text;  // save_circuit form, empty when not applicable
    EffectivePovmReport report;
};

enum class SearchVerdict { consistent, falsified, incomplete };

struct HistogramBin {
    std::uint64_t s_mu = 0;
    std::uint64_t count = 0;
};

struct SearchReport {
    SearchTask task;  // echo of the configuration that produced the numbers
    std::uint64_t examined = 0;
    std::vector<HistogramBin> histogram;  // ascending by s_mu
    std::vector<SearchWitness> witnesses;
    SearchVerdict verdict = SearchVerdict::consistent;
    bool complete = true;
    std::vector<std::string> notes;
    double seconds = 0.0;  // wall clock, not part of the serialized summary
};

// The JSON summary omits the wall-clock field so that identical tasks produce
// byte-identical output.
std::string search_report_to_json(const SearchReport& r);
std::string search_histogram_csv(const SearchReport& r);

// 0 = conjecture consistent, 2 = falsifying witness found, 3 = incomplete.
int verdict_exit_code(const SearchReport& r);

// Every abelian dimension-ell subgroup of the t-qubit Pauli strings, i.e.
// every totally isotropic rank-ell subspace of the length-2t symplectic
// space, visited exactly once in a fixed order (unique reduced echelon bases).
// The visitor stops the stream by returning false. symmetry_reduce keeps one
// representative per orbit of the qubit permutations combined with per-qubit
// X<->Y relabelings (both preserve Z-freeness); counts change under it, so it
// is off by default and limited to t <= 5.
void for_each_abelian_subgroup(int t, int ell, bool symmetry_reduce,
                               const std::function<bool(const PauliSubgroup&)>& fn);
std::vector<PauliSubgroup> enumerate_abelian_subgroups(int t, int ell,
                                                       bool symmetry_reduce = false);

// Closed-form count of the unreduced stream (isotropic subspace count).
std::uint64_t count_abelian_subgroups(int t, int ell);

// Seeded draw of one abelian dimension-ell subgroup (near-uniform, not exact).
PauliSubgroup random_abelian_subgroup(int t, int ell, Rng& rng);

// Extend an abelian group H on its own register to a maximal abelian group on
// n + H.n_qubits qubits whose ancilla-local subgroup is exactly H: data qubit
// i < pairs carries the i-th symplectic pair of C(H)/H, the remaining data
// qubits carry local Z. Requires pairs = H.n_qubits - dim H <= n.
PauliSubgroup complete_to_maximal(const PauliSubgroup& H, int n);

// Best achievable span at entanglement p for a fixed ancilla state: maximum
// over all abelian H of dimension m - p of 2^{n-p} times the number of
// C(H)/H cosets holding an element with |<psi| g |psi>| > tol.
std::uint64_t maxent_value(int n, const DenseState& psi, int p, double tol = 1e-9);

// Span of the effective POVM when the ancilla is maximally mixed: only group
// elements acting as identity on the ancilla register contribute.
std::uint64_t mixed_ancilla_span(const PauliSubgroup& S, int n);

// The perfect-pairing basis <X_i X_{n+i}, Z_i Z_{n+i}> on 2n qubits.
PauliSubgroup bell_pairing(int n);

SearchReport conjecture_2n_scan(const SearchTask& task);
SearchReport conjecture_maxent_scan(const SearchTask& task);
SearchReport random_doped_scan(const SearchTask& task);
SearchReport bound_saturation_scan(const SearchTask& task);
SearchReport run_task(const SearchTask& task);

// Constructive IC witness at t = 2n: the gadget-register group paired two
// qubits per data qubit, and the tensor-product circuit that realizes it.
// Both verification flags must come back true.
struct UniversalWitness {
    PauliSubgroup group;   // abelian, dimension n, on 2n qubits
    DopedCircuit circuit;  // n data + n ancilla qubits, t = 2n
    bool group_ic = false;
    bool circuit_ic = false;
};
UniversalWitness ic_witness_2n(int n);

}  // namespace qspan
