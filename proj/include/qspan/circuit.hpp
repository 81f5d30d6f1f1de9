#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qspan/group.hpp"
#include "qspan/pauli.hpp"

namespace qspan {

enum class GateKind { H, S, CNOT, T };

struct Gate {
    GateKind kind;
    int q0 = 0;  // target for H/S/T, control for CNOT
    int q1 = 0;  // CNOT target

    static Gate h(int q) { return {GateKind::H, q, 0}; }
    static Gate s(int q) { return {GateKind::S, q, 0}; }
    static Gate t(int q) { return {GateKind::T, q, 0}; }
    static Gate cnot(int c, int t) { return {GateKind::CNOT, c, t}; }

    bool operator==(const Gate& o) const {
        return kind == o.kind && q0 == o.q0 && q1 == o.q1;
    }
};

// Clifford+T circuit acting on n_data data qubits followed by n_ancilla ancillas.
// Gate list order is execution order.
struct DopedCircuit {
    int n_data = 0;
    int n_ancilla = 0;
    std::vector<Gate> gates;

    int total_qubits() const { return n_data + n_ancilla; }
    int t_count() const;
};

// Clifford-only expansion: the k-th T gate on qubit q is replaced by
// CNOT(q -> gadget_k) against a fresh |T> qubit, whose final projection onto
// |0> pins the syndrome of that gadget qubit's Z to +1.
struct FixedSyndrome {
    int generator_index;  // index into the measurement group generator list
    int sign;             // always +1 here (|0> post-selection)
};

struct GadgetizedCircuit {
    int n_data = 0;
    int n_ancilla = 0;
    int t = 0;
    std::vector<Gate> clifford_gates;
    std::vector<int> gadget_register;  // the t appended qubit indices
    std::vector<FixedSyndrome> fixed_syndromes;

    int total_qubits() const { return n_data + n_ancilla + t; }
};

// Heisenberg conjugation p -> U p U^dag for a single Clifford gate. T is rejected.
PauliString conjugate(const Gate& gate, const PauliString& p);

enum class EvolveDirection { forward, adjoint };

// Conjugate through a whole T-free gate list. The adjoint direction applies the
// inverted, reversed list, i.e. it returns generators of U^dag (.) U, which is
// what the measurement-state convention |Phi_b> = U^dag |b> needs.
PauliString evolve_string(const std::vector<Gate>& gates, const PauliString& p,
                          EvolveDirection dir);

PauliSubgroup heisenberg_evolve(const std::vector<Gate>& gates, const PauliSubgroup& S,
                                EvolveDirection dir);

GadgetizedCircuit gadgetize(const DopedCircuit& c);

// Inverse of gadgetize on circuit descriptions (gadget CNOTs back to T gates).
DopedCircuit ungadgetize(const GadgetizedCircuit& g);

// Approximately-uniform random Clifford circuit: O(n^2) uniformly chosen
// H/S/CNOT primitives. Deterministic under seed; not exactly Haar-on-Clifford.
std::vector<Gate> random_clifford(int n, std::uint64_t seed);

// Tensor-product 2n-doped construction: per data qubit i with ancilla n+i,
// CNOT(i->n+i), H, T, H on the ancilla, CNOT(n+i->i), then T, H on the data
// qubit. m = n ancillas, t = 2n.
DopedCircuit universal_2n_circuit(int n);

// Text format: header "qubits n m", one gate per line ("H 0", "CNOT 0 3", "T 1"),
// '#' comments.
DopedCircuit load_circuit(std::istream& in);
DopedCircuit load_circuit_text(const std::string& text);
std::string save_circuit(const DopedCircuit& c);

}  // namespace qspan
