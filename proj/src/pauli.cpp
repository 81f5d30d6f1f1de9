#include "qspan/pauli.hpp"

#include <algorithm>

namespace qspan {

namespace {

void check_width(int n) {
    if (n < 0 || n > 64) throw dimension_error("qubit count must be in [0, 64], got " + std::to_string(n));
}

void check_same(int a, int b) {
    if (a != b)
        throw dimension_error("qubit count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Letter code on one qubit from (x, z) bits: I=0, X=1, Y=2, Z=3.
// This is also the coset-representative order used for "lexicographically minimal".
inline int letter_code(bool xb, bool zb) {
    if (xb && zb) return 2;
    if (xb) return 1;
    if (zb) return 3;
    return 0;
}

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

}  // namespace

PauliString::PauliString(int n, std::uint64_t x_bits, std::uint64_t z_bits, int phase_exp)
    : n_qubits(n), x(x_bits), z(z_bits), phase(static_cast<std::uint8_t>(((phase_exp % 4) + 4) % 4)) {
    check_width(n);
    std::uint64_t m = qubit_mask(n);
    if ((x & ~m) || (z & ~m))
        throw dimension_error("x/z bits exceed declared qubit count " + std::to_string(n));
}

int PauliString::sign() const {
    int e = (phase - y_count()) & 3;
    if (e & 1) throw error("sign() on non-Hermitian Pauli string " + format_pauli(*this));
    return e == 0 ? 1 : -1;
}

ProjectivePauli::ProjectivePauli(int n, std::uint64_t x_bits, std::uint64_t z_bits)
    : n_qubits(n), x(x_bits), z(z_bits) {
    check_width(n);
    std::uint64_t m = qubit_mask(n);
    if ((x & ~m) || (z & ~m))
        throw dimension_error("x/z bits exceed declared qubit count " + std::to_string(n));
}

bool ProjectivePauli::operator<(const ProjectivePauli& o) const {
    if (n_qubits != o.n_qubits) return n_qubits < o.n_qubits;
    for (int k = 0; k < n_qubits; ++k) {
        int a = letter_code((x >> k) & 1, (z >> k) & 1);
        int b = letter_code((o.x >> k) & 1, (o.z >> k) & 1);
        if (a != b) return a < b;
    }
    return false;
}

PauliString lift(const ProjectivePauli& p) {
    return PauliString(p.n_qubits, p.x, p.z, std::popcount(p.x & p.z) & 3);
}

PauliString multiply(const PauliString& a, const PauliString& b) {
    check_same(a.n_qubits, b.n_qubits);
    // (X^xa Z^za)(X^xb Z^zb): commuting Z^za past X^xb picks up (-1)^(za&xb) per qubit.
    int e = a.phase + b.phase + 2 * std::popcount(a.z & b.x);
    return PauliString(a.n_qubits, a.x ^ b.x, a.z ^ b.z, e & 3);
}

bool commutes(const PauliString& a, const PauliString& b) {
    check_same(a.n_qubits, b.n_qubits);
    int s = std::popcount(a.x & b.z) + std::popcount(a.z & b.x);
    return (s & 1) == 0;
}

bool commutes(const ProjectivePauli& a, const ProjectivePauli& b) {
    check_same(a.n_qubits, b.n_qubits);
    int s = std::popcount(a.x & b.z) + std::popcount(a.z & b.x);
    return (s & 1) == 0;
}

PauliString restrict_to(const PauliString& g, const std::vector<int>& reg) {
    std::uint64_t keep = 0;
    for (int q : reg) {
        if (q < 0 || q >= g.n_qubits)
            throw dimension_error("restrict: qubit index " + std::to_string(q) + " out of range");
        keep |= 1ull << q;
    }
    // Gather the kept bits in ascending qubit order.
    std::vector<int> sorted(reg);
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t rx = 0, rz = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        rx |= ((g.x >> sorted[i]) & 1ull) << i;
        rz |= ((g.z >> sorted[i]) & 1ull) << i;
    }
    bool complement_trivial = ((g.x & ~keep) == 0) && ((g.z & ~keep) == 0);
    int n_out = static_cast<int>(sorted.size());
    if (complement_trivial) return PauliString(n_out, rx, rz, g.phase);
    return lift(ProjectivePauli(n_out, rx, rz));
}

PauliString restrict_range(const PauliString& g, int start, int count) {
    if (start < 0 || count < 0 || start + count > g.n_qubits)
        throw dimension_error("restrict_range: [" + std::to_string(start) + ", " +
                              std::to_string(start + count) + ") out of range");
    std::uint64_t m = qubit_mask(count);
    std::uint64_t rx = (g.x >> start) & m;
    std::uint64_t rz = (g.z >> start) & m;
    std::uint64_t keep = m << start;
    bool complement_trivial = ((g.x & ~keep) == 0) && ((g.z & ~keep) == 0);
    if (complement_trivial) return PauliString(count, rx, rz, g.phase);
    return lift(ProjectivePauli(count, rx, rz));
}

ProjectivePauli restrict_range(const ProjectivePauli& g, int start, int count) {
    if (start < 0 || count < 0 || start + count > g.n_qubits)
        throw dimension_error("restrict_range: [" + std::to_string(start) + ", " +
                              std::to_string(start + count) + ") out of range");
    std::uint64_t m = qubit_mask(count);
    return ProjectivePauli(count, (g.x >> start) & m, (g.z >> start) & m);
}

WeightCounts weight_counts(const ProjectivePauli& g) {
    WeightCounts w;
    w.n_Y = std::popcount(g.x & g.z);
    w.n_X = std::popcount(g.x & ~g.z);
    w.n_Z = std::popcount(g.z & ~g.x);
    w.n_I = g.n_qubits - w.n_X - w.n_Y - w.n_Z;
    return w;
}

PauliString parse_pauli(const std::string& text) {
    std::size_t pos = 0;
    int phase = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') phase += 2;
        ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        ++pos;
    }
    if (pos >= text.size()) throw parse_error("expected Pauli letters", pos);
    std::uint64_t x = 0, z = 0;
    int n = 0;
    for (; pos < text.size(); ++pos, ++n) {
        if (n >= 64) throw parse_error("Pauli string longer than 64 qubits", pos);
        switch (text[pos]) {
            case 'I': break;
            case 'X': x |= 1ull << n; break;
            case 'Y': x |= 1ull << n; z |= 1ull << n; phase += 1; break;
            case 'Z': z |= 1ull << n; break;
            default:
                throw parse_error(std::string("unexpected character '") + text[pos] + "' in Pauli string", pos);
        }
    }
    return PauliString(n, x, z, phase & 3);
}

std::string format_pauli(const PauliString& p) {
    // Emit sign/i prefix relative to the letter form, i.e. phase minus the Y lift.
    int e = (p.phase - p.y_count()) & 3;
    std::string out;
    if (e == 2 || e == 3) out += '-';
    if (e == 1 || e == 3) out += 'i';
    for (int k = 0; k < p.n_qubits; ++k)
        out += kLetters[letter_code((p.x >> k) & 1, (p.z >> k) & 1)];
    return out;
}

std::string format_pauli(const ProjectivePauli& p) {
    std::string out;
    for (int k = 0; k < p.n_qubits; ++k)
        out += kLetters[letter_code((p.x >> k) & 1, (p.z >> k) & 1)];
    return out;
}

}  // namespace qspan
