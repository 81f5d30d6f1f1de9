#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "qspan/common.hpp"

namespace qspan {

// Phase-tracked Pauli operator in symplectic form: i^phase * prod_k X^{x_k} Z^{z_k}.
// Qubit k lives in bit k of the x/z words (so qubit 0 is the first letter of the
// text form). Capped at 64 qubits; everything in this project is desk scale.
struct PauliString {
    int n_qubits = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    std::uint8_t phase = 0;  // exponent of i, mod 4

    PauliString() = default;
    PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits, int phase_exp = 0);

    static PauliString identity(int n) { return PauliString(n, 0, 0, 0); }

    bool operator==(const PauliString& o) const {
        return n_qubits == o.n_qubits && x == o.x && z == o.z && phase == o.phase;
    }
    bool operator!=(const PauliString& o) const { return !(*this == o); }

    // Number of qubits carrying Y (x=z=1).
    int y_count() const { return std::popcount(x & z); }

    // Hermitian iff the accumulated i-powers reduce to +-1.
    bool is_hermitian() const { return ((phase + y_count()) & 1) == 0; }

    // Sign of a Hermitian string: +1 or -1. Throws on non-Hermitian input.
    int sign() const;

    bool is_identity_bits() const { return x == 0 && z == 0; }
};

// Phase-free Pauli string (element of the quotient group). Equality ignores phase.
struct ProjectivePauli {
    int n_qubits = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    ProjectivePauli() = default;
    ProjectivePauli(int n, std::uint64_t x_bits, std::uint64_t z_bits);
    explicit ProjectivePauli(const PauliString& p) : n_qubits(p.n_qubits), x(p.x), z(p.z) {}

    bool operator==(const ProjectivePauli& o) const {
        return n_qubits == o.n_qubits && x == o.x && z == o.z;
    }
    bool operator!=(const ProjectivePauli& o) const { return !(*this == o); }
    bool operator<(const ProjectivePauli& o) const;  // lexicographic in I<X<Y<Z letters

    bool is_identity() const { return x == 0 && z == 0; }
};

// Hermitian lift with positive sign: phase = (number of Y letters) mod 4.
PauliString lift(const ProjectivePauli& p);

inline std::uint64_t qubit_mask(int n) {
    return n >= 64 ? ~0ull : ((1ull << n) - 1);
}

// Exact operator product with phase tracking.
PauliString multiply(const PauliString& a, const PauliString& b);
inline PauliString operator*(const PauliString& a, const PauliString& b) { return multiply(a, b); }

// Symplectic commutation test: true iff a and b commute. Phase-independent.
bool commutes(const PauliString& a, const PauliString& b);
bool commutes(const ProjectivePauli& a, const ProjectivePauli& b);

// Tensor factor on the named qubits (ascending order). The full phase stays with
// the restriction only when the complement is identity; otherwise the result is
// the Hermitian-positive lift of the projective restriction.
PauliString restrict_to(const PauliString& g, const std::vector<int>& reg);

// Contiguous-register fast path: qubits [start, start+count).
PauliString restrict_range(const PauliString& g, int start, int count);
ProjectivePauli restrict_range(const ProjectivePauli& g, int start, int count);

struct WeightCounts {
    int n_I = 0, n_X = 0, n_Y = 0, n_Z = 0;
};
WeightCounts weight_counts(const ProjectivePauli& g);
inline WeightCounts weight_counts(const PauliString& g) { return weight_counts(ProjectivePauli(g)); }

// Text form: [+-]?[i]?[IXYZ]+ with the first letter on qubit 0.
PauliString parse_pauli(const std::string& text);
std::string format_pauli(const PauliString& p);
std::string format_pauli(const ProjectivePauli& p);

}  // namespace qspan
