#include "qspan/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>

#include "json.hpp"

namespace qspan {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

const cplx kPhase4[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

void check_dense_width(int n) {
    if (n < 0 || n > kDefaultDenseCap + 8) {
        // Hard backstop well above any configurable cap; the CLI enforces the
        // user-facing cap, this just prevents runaway allocations.
        throw size_limit_error("dense register too large: " + std::to_string(n) + " qubits");
    }
}

// w = g . v for a phased Pauli: g|j> = i^e (-1)^{popcount(z & j)} |j ^ x>.
void apply_pauli(const PauliString& g, const std::vector<cplx>& v, std::vector<cplx>& w) {
    std::size_t d = v.size();
    for (std::size_t j = 0; j < d; ++j) {
        int ph = (g.phase + 2 * (std::popcount(g.z & j) & 1)) & 3;
        w[j ^ g.x] = kPhase4[ph] * v[j];
    }
}

}  // namespace

double DenseState::norm() const {
    double s = 0;
    for (const cplx& a : amp) s += std::norm(a);
    return std::sqrt(s);
}

void DenseState::normalize() {
    double nrm = norm();
    if (nrm == 0) throw dimension_error("cannot normalize the zero vector");
    for (cplx& a : amp) a /= nrm;
}

DenseState zero_state(int n) { return basis_state(n, 0); }

DenseState basis_state(int n, std::uint64_t index) {
    check_dense_width(n);
    DenseState s(n);
    if (index >= s.dim()) throw dimension_error("basis index out of range");
    s.amp[index] = cplx(1, 0);
    return s;
}

DenseState tensor(const DenseState& a, const DenseState& b) {
    check_dense_width(a.n_qubits + b.n_qubits);
    DenseState out(a.n_qubits + b.n_qubits);
    for (std::size_t ib = 0; ib < b.dim(); ++ib)
        for (std::size_t ia = 0; ia < a.dim(); ++ia)
            out.amp[(ib << a.n_qubits) | ia] = a.amp[ia] * b.amp[ib];
    return out;
}

DenseState t_power_state(int t) {
    DenseState s(t);
    double scale = std::pow(0.5, t * 0.5);
    cplx omega = std::polar(1.0, kPi / 4.0);  // e^{i pi/4}
    for (std::size_t j = 0; j < s.dim(); ++j)
        s.amp[j] = scale * std::pow(omega, double(std::popcount(j)));
    return s;
}

DenseState random_haar_state(int n, Rng& rng) {
    DenseState s(n);
    for (cplx& a : s.amp) {
        double re = rng_gauss(rng);
        double im = rng_gauss(rng);
        a = cplx(re, im);
    }
    s.normalize();
    return s;
}

DenseState stabilizer_state(const PauliSubgroup& S, std::uint64_t outcome_bits) {
    if (!S.with_signs) throw needs_signs_error("stabilizer_state needs a signed group");
    if (S.dim() != S.n_qubits)
        throw structure_error("stabilizer_state needs a maximal group (one generator per qubit)");
    check_dense_width(S.n_qubits);

    std::size_t d = std::size_t(1) << S.n_qubits;
    std::vector<cplx> v(d), gv(d);
    // Project successive computational kets until one has nonzero overlap with
    // the joint eigenspace (a stabilizer state always overlaps some ket).
    for (std::size_t ref = 0; ref < d; ++ref) {
        std::fill(v.begin(), v.end(), cplx(0, 0));
        v[ref] = cplx(1, 0);
        for (std::size_t i = 0; i < S.gens.size(); ++i) {
            double sgn = (outcome_bits >> i) & 1 ? -1.0 : 1.0;
            apply_pauli(S.gens[i], v, gv);
            for (std::size_t j = 0; j < d; ++j) v[j] = 0.5 * (v[j] + sgn * gv[j]);
        }
        double nrm = 0;
        for (const cplx& a : v) nrm += std::norm(a);
        if (nrm > 1e-12) {
            DenseState out(S.n_qubits);
            out.amp = std::move(v);
            out.normalize();
            return out;
        }
    }
    throw structure_error("stabilizer projector annihilated every basis ket (inconsistent signs?)");
}

void apply_gate(DenseState& s, const Gate& g, bool adjoint) {
    std::size_t d = s.dim();
    std::size_t q0 = std::size_t(1) << g.q0;
    switch (g.kind) {
        case GateKind::H: {
            double r = 1.0 / std::sqrt(2.0);
            for (std::size_t j = 0; j < d; ++j) {
                if (j & q0) continue;
                cplx a = s.amp[j], b = s.amp[j | q0];
                s.amp[j] = r * (a + b);
                s.amp[j | q0] = r * (a - b);
            }
            break;
        }
        case GateKind::S: {
            cplx f = adjoint ? cplx(0, -1) : cplx(0, 1);
            for (std::size_t j = 0; j < d; ++j)
                if (j & q0) s.amp[j] *= f;
            break;
        }
        case GateKind::T: {
            cplx f = std::polar(1.0, adjoint ? -kPi / 4.0 : kPi / 4.0);
            for (std::size_t j = 0; j < d; ++j)
                if (j & q0) s.amp[j] *= f;
            break;
        }
        case GateKind::CNOT: {
            std::size_t q1 = std::size_t(1) << g.q1;
            for (std::size_t j = 0; j < d; ++j)
                if ((j & q0) && !(j & q1)) std::swap(s.amp[j], s.amp[j | q1]);
            break;
        }
    }
}

void apply_gates(DenseState& s, const std::vector<Gate>& gates, bool adjoint) {
    if (!adjoint) {
        for (const Gate& g : gates) apply_gate(s, g, false);
    } else {
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) apply_gate(s, *it, true);
    }
}

DenseState simulate(const DopedCircuit& circuit, const DenseState& input) {
    if (input.n_qubits != circuit.total_qubits())
        throw dimension_error("simulate: state width does not match circuit width");
    DenseState s = input;
    apply_gates(s, circuit.gates, false);
    return s;
}

DenseOperator pauli_matrix(const PauliString& p) {
    check_dense_width(p.n_qubits);
    DenseOperator op(p.n_qubits);
    std::size_t d = op.dim();
    for (std::size_t k = 0; k < d; ++k) {
        int ph = (p.phase + 2 * (std::popcount(p.z & k) & 1)) & 3;
        op.at(k ^ p.x, k) = kPhase4[ph];
    }
    return op;
}

cplx pauli_expectation(const DenseState& psi, const PauliString& g) {
    if (psi.n_qubits != g.n_qubits)
        throw dimension_error("pauli_expectation: width mismatch");
    cplx acc(0, 0);
    for (std::size_t j = 0; j < psi.dim(); ++j) {
        int ph = (g.phase + 2 * (std::popcount(g.z & j) & 1)) & 3;
        acc += std::conj(psi.amp[j ^ g.x]) * kPhase4[ph] * psi.amp[j];
    }
    return acc;
}

std::vector<DenseOperator> effective_povm(const std::vector<Gate>& gates, int n, int m,
                                          const DenseState& psi) {
    if (psi.n_qubits != m) throw dimension_error("effective_povm: ancilla state has wrong width");
    check_dense_width(n + m);
    std::size_t dn = std::size_t(1) << n;
    std::size_t dtot = std::size_t(1) << (n + m);

    // Column j of W is U (|j> tensor |psi>) evolved forward; then
    // mu_b[r][c] = conj(W[b][r]) W[b][c]. Cheaper than evolving every
    // measurement ket backwards when n is small.
    std::vector<std::vector<cplx>> w_cols(dn);
    for (std::size_t j = 0; j < dn; ++j) {
        DenseState col(n + m);
        for (std::size_t a = 0; a < psi.dim(); ++a) col.amp[(a << n) | j] = psi.amp[a];
        apply_gates(col, gates, false);
        w_cols[j] = std::move(col.amp);
    }

    std::vector<DenseOperator> povm(dtot, DenseOperator(n));
    for (std::size_t b = 0; b < dtot; ++b)
        for (std::size_t r = 0; r < dn; ++r) {
            cplx vr = std::conj(w_cols[r][b]);
            for (std::size_t c = 0; c < dn; ++c) povm[b].at(r, c) = vr * w_cols[c][b];
        }
    return povm;
}

std::vector<DenseOperator> effective_povm(const std::vector<Gate>& gates, int n, int m,
                                          const DenseState& psi,
                                          const std::vector<DenseState>& basis) {
    if (psi.n_qubits != m) throw dimension_error("effective_povm: ancilla state has wrong width");
    check_dense_width(n + m);
    std::size_t dn = std::size_t(1) << n;
    std::size_t dtot = std::size_t(1) << (n + m);
    if (basis.size() != dtot)
        throw dimension_error("effective_povm: need one measurement state per outcome");

    std::vector<DenseOperator> povm;
    povm.reserve(dtot);
    for (const DenseState& phi : basis) {
        if (phi.n_qubits != n + m)
            throw dimension_error("effective_povm: measurement state has wrong width");
        DenseState back = phi;
        apply_gates(back, gates, true);
        std::vector<cplx> v(dn, cplx(0, 0));
        for (std::size_t a = 0; a < psi.dim(); ++a) {
            cplx ca = std::conj(psi.amp[a]);
            for (std::size_t j = 0; j < dn; ++j) v[j] += ca * back.amp[(a << n) | j];
        }
        DenseOperator mu(n);
        for (std::size_t r = 0; r < dn; ++r)
            for (std::size_t c = 0; c < dn; ++c) mu.at(r, c) = v[r] * std::conj(v[c]);
        povm.push_back(std::move(mu));
    }
    return povm;
}

RankResult span_rank_full(const std::vector<DenseOperator>& ops, double tol) {
    RankResult res;
    if (ops.empty()) return res;
    std::size_t d2 = ops[0].m.size();
    std::size_t cols = 2 * d2;

    std::vector<std::vector<double>> rows;
    rows.reserve(ops.size());
    double max_norm = 0;
    for (const DenseOperator& op : ops) {
        if (op.m.size() != d2) throw dimension_error("span_rank: mixed operator dimensions");
        std::vector<double> row(cols);
        double nrm2 = 0;
        for (std::size_t k = 0; k < d2; ++k) {
            row[k] = op.m[k].real();
            row[d2 + k] = op.m[k].imag();
            nrm2 += std::norm(op.m[k]);
        }
        max_norm = std::max(max_norm, std::sqrt(nrm2));
        rows.push_back(std::move(row));
    }
    if (max_norm == 0) return res;
    double thr = tol * max_norm;
    res.min_accepted = 0;
    res.max_rejected = 0;

    // Row-echelon with partial pivoting. Track near-threshold pivot decisions
    // so callers can flag numerically wobbly verdicts.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
        std::size_t best = rank;
        double best_abs = std::abs(rows[rank][col]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            double v = std::abs(rows[r][col]);
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
        if (best_abs <= thr) {
            if (best_abs > res.max_rejected) res.max_rejected = best_abs;
            continue;
        }
        if (res.min_accepted == 0 || best_abs < res.min_accepted) res.min_accepted = best_abs;
        std::swap(rows[rank], rows[best]);
        double inv = 1.0 / rows[rank][col];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            double f = rows[r][col] * inv;
            if (f == 0) continue;
            for (std::size_t c = col; c < cols; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    res.rank = int(rank);
    res.near_threshold = (res.min_accepted != 0 && res.min_accepted < 10 * thr) ||
                         (res.max_rejected > thr / 10);
    return res;
}

int span_rank(const std::vector<DenseOperator>& ops, double tol) {
    return span_rank_full(ops, tol).rank;
}

DenseOperator frame_operator_pauli_basis(const std::vector<DenseOperator>& ops) {
    if (ops.empty()) throw dimension_error("frame_operator: empty POVM");
    int n = ops[0].n_qubits;
    std::size_t d = std::size_t(1) << n;
    std::size_t npauli = std::size_t(1) << (2 * n);
    double root_d = std::sqrt(double(d));

    // t[b][p] = Tr(P_p mu_b) / sqrt(d); Pauli index p reads base-4 digits with
    // qubit 0 leading (I=0 X=1 Y=2 Z=3).
    std::vector<std::vector<cplx>> t(ops.size(), std::vector<cplx>(npauli));
    for (std::size_t p = 0; p < npauli; ++p) {
        std::uint64_t x = 0, z = 0;
        std::size_t rest = p;
        for (int q = n - 1; q >= 0; --q) {
            int code = rest & 3;
            rest >>= 2;
            if (code == 1 || code == 2) x |= std::uint64_t(1) << q;
            if (code == 2 || code == 3) z |= std::uint64_t(1) << q;
        }
        PauliString pp = lift(ProjectivePauli{n, x, z});
        for (std::size_t b = 0; b < ops.size(); ++b) {
            const DenseOperator& mu = ops[b];
            if (mu.n_qubits != n) throw dimension_error("frame_operator: mixed widths");
            cplx tr(0, 0);
            for (std::size_t k = 0; k < d; ++k) {
                int ph = (pp.phase + 2 * (std::popcount(pp.z & k) & 1)) & 3;
                tr += kPhase4[ph] * mu.at(k, k ^ pp.x);
            }
            t[b][p] = tr / root_d;
        }
    }

    DenseOperator f(2 * n);
    for (std::size_t pq = 0; pq < npauli; ++pq)
        for (std::size_t qq = 0; qq < npauli; ++qq) {
            cplx acc(0, 0);
            for (std::size_t b = 0; b < ops.size(); ++b) acc += t[b][pq] * std::conj(t[b][qq]);
            f.at(pq, qq) = acc;
        }
    return f;
}

double completeness_error(const std::vector<DenseOperator>& ops) {
    if (ops.empty()) throw dimension_error("completeness_error: empty POVM");
    std::size_t d = ops[0].dim();
    double worst = 0;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            cplx acc(0, 0);
            for (const DenseOperator& op : ops) acc += op.at(r, c);
            if (r == c) acc -= cplx(1, 0);
            worst = std::max(worst, std::abs(acc));
        }
    return worst;
}

std::string dump_operators_json(const std::vector<DenseOperator>& ops) {
    nlohmann::json out;
    out["count"] = ops.size();
    out["dim"] = ops.empty() ? 0 : ops[0].dim();
    nlohmann::json mats = nlohmann::json::array();
    for (const DenseOperator& op : ops) {
        nlohmann::json rowsj = nlohmann::json::array();
        for (const cplx& v : op.m) rowsj.push_back({v.real(), v.imag()});
        mats.push_back(std::move(rowsj));
    }
    out["matrices"] = std::move(mats);
    return out.dump(2);
}

}  // namespace qspan
