#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qspan/circuit.hpp"
#include "qspan/group.hpp"
#include "qspan/pauli.hpp"

namespace qspan {

using cplx = std::complex<double>;

// Brute-force verifier: full state-vector / matrix arithmetic, no stabilizer
// shortcuts. Everything here is deliberately independent of the group-theoretic
// code paths it cross-checks.

inline constexpr int kDefaultDenseCap = 14;  // qubits

struct DenseState {
    int n_qubits = 0;
    std::vector<cplx> amp;

    DenseState() = default;
    explicit DenseState(int n) : n_qubits(n), amp(std::size_t(1) << n, cplx(0, 0)) {}

    std::size_t dim() const { return amp.size(); }
    double norm() const;
    void normalize();
};

struct DenseOperator {
    int n_qubits = 0;
    std::vector<cplx> m;  // row-major, dim x dim

    DenseOperator() = default;
    explicit DenseOperator(int n) : n_qubits(n), m((std::size_t(1) << n) * (std::size_t(1) << n)) {}

    std::size_t dim() const { return std::size_t(1) << n_qubits; }
    cplx& at(std::size_t r, std::size_t c) { return m[r * dim() + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return m[r * dim() + c]; }
};

DenseState zero_state(int n);
DenseState basis_state(int n, std::uint64_t index);
DenseState tensor(const DenseState& a, const DenseState& b);  // b on the high bits

// |T> = T H |0> on each of t qubits.
DenseState t_power_state(int t);

// Haar-random pure state from normalized complex Gaussians (portable seeding).
DenseState random_haar_state(int n, Rng& rng);

// Joint +-1 eigenstate of a signed maximal group, outcome bit i selecting the
// (-1)^{b_i} eigenvalue of generator i. Built by projector application.
DenseState stabilizer_state(const PauliSubgroup& S, std::uint64_t outcome_bits);

// Exact gate-by-gate application; supports T (diag(1, e^{i pi/4})).
DenseState simulate(const DopedCircuit& circuit, const DenseState& input);
void apply_gate(DenseState& s, const Gate& g, bool adjoint);
void apply_gates(DenseState& s, const std::vector<Gate>& gates, bool adjoint);

DenseOperator pauli_matrix(const PauliString& p);
cplx pauli_expectation(const DenseState& psi, const PauliString& g);

// Effective POVM per the measure-then-project picture: for each outcome b,
// mu_b = w_b* w_b^T with w_b[j] = sum_a conj(psi[a]) <j,a| U^dag |Phi'_b>.
// The measurement basis defaults to the computational basis when omitted.
std::vector<DenseOperator> effective_povm(const std::vector<Gate>& gates, int n, int m,
                                          const DenseState& psi);
std::vector<DenseOperator> effective_povm(const std::vector<Gate>& gates, int n, int m,
                                          const DenseState& psi,
                                          const std::vector<DenseState>& basis);

struct RankResult {
    int rank = 0;
    bool near_threshold = false;  // some pivot decision landed within 10x of tol
    double min_accepted = 0.0;
    double max_rejected = 0.0;
};

// Operator-span dimension: vectorize each operator into a real row (re | im),
// Gaussian elimination with pivot threshold tol * (largest initial row norm).
RankResult span_rank_full(const std::vector<DenseOperator>& ops, double tol = 1e-9);
int span_rank(const std::vector<DenseOperator>& ops, double tol = 1e-9);

// Frame operator in the normalized Pauli basis P / sqrt(2^n). Index order:
// base-4 digits with qubit 0 as the leading digit, I=0 X=1 Y=2 Z=3
// (so n=1 ordering is I, X, Y, Z).
DenseOperator frame_operator_pauli_basis(const std::vector<DenseOperator>& ops);

// Max-norm deviation of sum(ops) from identity.
double completeness_error(const std::vector<DenseOperator>& ops);

// JSON matrix dump (row-major [re, im] pairs), for the oracle-dump command.
std::string dump_operators_json(const std::vector<DenseOperator>& ops);

}  // namespace qspan
