#include "qspan/povm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qspan {

namespace {

std::uint64_t pow2u(int e) {
    if (e < 0 || e > 62) throw size_limit_error("2^" + std::to_string(e) + " out of range");
    return std::uint64_t(1) << e;
}

int parity64(std::uint64_t v) { return std::popcount(v) & 1; }

// Membership-with-sign reducer against a signed abelian group, allocation-free
// per query (contains() builds a combo vector we do not need here).
struct LiftReducer {
    const PauliSubgroup* G = nullptr;

    // 0 if the projective string is not in G, else the sign of its
    // Hermitian-positive lift as a group member.
    int sign_of_lift(std::uint64_t x, std::uint64_t z) const {
        PauliString r = lift(ProjectivePauli(G->n_qubits, x, z));
        int n = G->n_qubits;
        for (std::size_t i = 0; i < G->gens.size(); ++i) {
            int c = G->pivots[i];
            bool hit = c < n ? (r.x >> c) & 1 : (r.z >> (c - n)) & 1;
            if (hit) r = multiply(G->gens[i], r);
        }
        if (!r.is_identity_bits()) return 0;
        if (r.phase & 1)
            throw stabilizer_error("non-Hermitian residual while reducing against a signed group");
        return r.phase == 0 ? 1 : -1;
    }
};

// RREF over a fixed input generator list with GF(2) combo tracking, so any
// member can be expressed over the *inputs* (not just over the reduced rows).
// Rows are kept as exact signed products of the inputs.
struct TrackedRref {
    int n = 0;
    int n_inputs = 0;
    std::vector<PauliString> rows;
    std::vector<int> pivs;
    std::vector<Gf2Vec> combos;

    static int pivot_col(const PauliString& g, int n) {
        if (g.x) return std::countr_zero(g.x);
        return n + std::countr_zero(g.z);
    }

    void insert(const PauliString& g, int input_index) {
        PauliString r = g;
        Gf2Vec combo(n_inputs);
        combo.set(input_index, true);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            int c = pivs[i];
            bool hit = c < n ? (r.x >> c) & 1 : (r.z >> (c - n)) & 1;
            if (hit) {
                r = multiply(rows[i], r);
                combo ^= combos[i];
            }
        }
        if (r.is_identity_bits()) {
            if (r.phase != 0)
                throw stabilizer_error("evolved generator set carries an inconsistent sign");
            return;  // dependent; callers treat this as a structural defect
        }
        int c = pivot_col(r, n);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            bool hit = c < n ? (rows[i].x >> c) & 1 : (rows[i].z >> (c - n)) & 1;
            if (hit) {
                rows[i] = multiply(r, rows[i]);
                combos[i] ^= combo;
            }
        }
        std::size_t at = 0;
        while (at < rows.size() && pivs[at] < c) ++at;
        rows.insert(rows.begin() + at, r);
        pivs.insert(pivs.begin() + at, c);
        combos.insert(combos.begin() + at, combo);
    }

    struct Expr {
        bool member = false;
        int sign = 0;  // sign of the positive lift as a product of inputs
        Gf2Vec combo;
    };

    Expr express(const PauliString& g) const {
        Expr e;
        e.combo = Gf2Vec(n_inputs);
        PauliString r = lift(ProjectivePauli(g));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            int c = pivs[i];
            bool hit = c < n ? (r.x >> c) & 1 : (r.z >> (c - n)) & 1;
            if (hit) {
                r = multiply(rows[i], r);
                e.combo ^= combos[i];
            }
        }
        if (!r.is_identity_bits()) return e;
        if (r.phase & 1) throw stabilizer_error("non-Hermitian residual in tracked reduction");
        e.member = true;
        e.sign = r.phase == 0 ? 1 : -1;
        return e;
    }
};

// Exact span of the effective family of a projected stabilizer measurement.
//
// Generators: nu = n + m + t wide; the first n+m are outcome-indexed (free),
// the last t have their syndromes pinned to +1 by gadget projections. The
// ancilla register [n, n+m) is projected onto the +1 state of Z, the gadget
// register [n+m, nu) onto |T>^t. For each free-combo class xi the surviving
// family member is
//   T_xi = sum_phi sign * <Z part> * 2^{-(xy count)/2} * (data direction),
// coefficients accumulated exactly in Z[sqrt(2)] (scaled by 2^{t/2}).
struct ClassSumOut {
    std::uint64_t s_mu = 0;
    std::vector<ProjectivePauli> directions;  // confirmed axis-aligned directions
    bool exact = true;
    std::uint64_t multi_direction_classes = 0;
    std::vector<std::string> warnings;
};

ClassSumOut class_sum_span(const std::vector<PauliString>& gens, int n, int m, int t,
                           const PauliSubgroup& Z) {
    int nu = n + m + t;
    int n_free = n + m;
    if (static_cast<int>(gens.size()) != nu)
        throw dimension_error("class_sum_span: need one generator per qubit");
    if (nu > kMaxEnumerationBits)
        throw size_limit_error("class_sum_span: 2^" + std::to_string(nu) + " elements");

    std::uint64_t mask_n = qubit_mask(n);
    std::uint64_t mask_m = qubit_mask(m);
    LiftReducer zred{&Z};

    // Ancilla-part sign table when small, else reduce per element.
    std::vector<std::int8_t> ztab;
    bool use_ztab = m > 0 && 2 * m <= 16;
    if (use_ztab) {
        ztab.resize(std::size_t(1) << (2 * m));
        for (std::uint64_t zm = 0; zm <= mask_m; ++zm)
            for (std::uint64_t xm = 0; xm <= mask_m; ++xm)
                ztab[(zm << m) | xm] = static_cast<std::int8_t>(zred.sign_of_lift(xm, zm));
    }

    // All 2^t frozen products, plus a direction index for their data parts.
    std::size_t n_frozen = std::size_t(1) << t;
    std::vector<PauliString> frz(n_frozen, PauliString::identity(nu));
    for (std::size_t mask = 1; mask < n_frozen; ++mask) {
        int low = std::countr_zero(mask);
        frz[mask] = multiply(gens[n_free + low], frz[mask ^ (std::size_t(1) << low)]);
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> frz_dirs;
    for (const auto& f : frz) frz_dirs.push_back({f.x & mask_n, f.z & mask_n});
    std::vector<std::pair<std::uint64_t, std::uint64_t>> dir_keys = frz_dirs;
    std::sort(dir_keys.begin(), dir_keys.end());
    dir_keys.erase(std::unique(dir_keys.begin(), dir_keys.end()), dir_keys.end());
    std::vector<std::uint32_t> dir_of(n_frozen);
    for (std::size_t i = 0; i < n_frozen; ++i)
        dir_of[i] = std::uint32_t(
            std::lower_bound(dir_keys.begin(), dir_keys.end(), frz_dirs[i]) - dir_keys.begin());
    std::size_t n_dirs = dir_keys.size();

    std::set<std::pair<std::uint64_t, std::uint64_t>> confirmed;
    using SparseRow = std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>,
                                            std::pair<std::int64_t, std::int64_t>>>;
    std::vector<SparseRow> multi_rows;

    std::vector<std::int64_t> acc_a(n_dirs, 0), acc_b(n_dirs, 0);
    std::vector<std::uint64_t> stamp(n_dirs, 0);
    std::vector<std::uint32_t> touched;
    touched.reserve(n_dirs);

    std::uint64_t full_span = (2 * n <= 62) ? pow2u(2 * n) : 0;
    std::uint64_t n_classes = std::uint64_t(1) << n_free;
    PauliString base = PauliString::identity(nu);
    for (std::uint64_t ci = 0;; ++ci) {
        for (std::size_t fi = 0; fi < n_frozen; ++fi) {
            const PauliString& f = frz[fi];
            std::uint64_t px = f.x ^ base.x;
            std::uint64_t pz = f.z ^ base.z;
            std::uint64_t zt = pz >> n_free;
            std::uint64_t xt = px >> n_free;
            if (zt & ~xt) continue;  // Z letter on the gadget register: killed
            int s_z = 1;
            if (m) {
                std::uint64_t xm = (px >> n) & mask_m;
                std::uint64_t zm = (pz >> n) & mask_m;
                s_z = use_ztab ? ztab[(zm << m) | xm] : zred.sign_of_lift(xm, zm);
                if (s_z == 0) continue;  // ancilla part outside Z: killed
            }
            int phase = (f.phase + base.phase + 2 * parity64(f.z & base.x)) & 3;
            int e = (phase - std::popcount(px & pz)) & 3;  // Hermitian sign exponent
            int coeff = (e == 0 ? 1 : -1) * s_z;
            int w = t - std::popcount(xt);  // power of sqrt(2), scaled by 2^{t/2}
            std::uint32_t d = dir_of[fi];
            if (stamp[d] != ci + 1) {
                stamp[d] = ci + 1;
                touched.push_back(d);
            }
            if (w & 1)
                acc_b[d] += coeff * (std::int64_t(1) << ((w - 1) / 2));
            else
                acc_a[d] += coeff * (std::int64_t(1) << (w / 2));
        }

        // Collect the class's surviving directions.
        std::uint32_t survivors = 0;
        std::uint32_t last = 0;
        for (std::uint32_t d : touched)
            if (acc_a[d] || acc_b[d]) {
                ++survivors;
                last = d;
            }
        if (survivors == 1) {
            confirmed.insert({dir_keys[last].first ^ (base.x & mask_n),
                              dir_keys[last].second ^ (base.z & mask_n)});
        } else if (survivors > 1) {
            SparseRow row;
            for (std::uint32_t d : touched)
                if (acc_a[d] || acc_b[d])
                    row.push_back({{dir_keys[d].first ^ (base.x & mask_n),
                                    dir_keys[d].second ^ (base.z & mask_n)},
                                   {acc_a[d], acc_b[d]}});
            std::sort(row.begin(), row.end());
            multi_rows.push_back(std::move(row));
        }
        for (std::uint32_t d : touched) {
            acc_a[d] = 0;
            acc_b[d] = 0;
        }
        touched.clear();

        if (full_span && multi_rows.empty() && confirmed.size() == full_span) break;
        if (ci + 1 == n_classes) break;
        base = multiply(gens[std::countr_zero(ci + 1)], base);
    }

    ClassSumOut out;
    out.multi_direction_classes = multi_rows.size();

    if (!multi_rows.empty()) {
        // Entries on already-confirmed directions are redundant for the span;
        // strip them, promoting rows that collapse to a single direction.
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<SparseRow> keep;
            for (auto& row : multi_rows) {
                SparseRow reduced;
                for (auto& ent : row)
                    if (!confirmed.count(ent.first)) reduced.push_back(ent);
                if (reduced.empty()) continue;
                if (reduced.size() == 1) {
                    confirmed.insert(reduced[0].first);
                    changed = true;
                    continue;
                }
                keep.push_back(std::move(reduced));
            }
            multi_rows = std::move(keep);
        }
    }

    std::uint64_t extra_rank = 0;
    if (!multi_rows.empty()) {
        out.exact = false;
        // Numeric rank of the residual rows over the leftover directions. The
        // entries are a + b*sqrt(2) with integer a, b, exactly cancelled above,
        // so pivots are well separated from zero at these sizes.
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> col_of;
        for (const auto& row : multi_rows)
            for (const auto& ent : row)
                col_of.emplace(ent.first, col_of.size());
        std::vector<std::vector<long double>> mat;
        long double max_abs = 0;
        const long double root2 = 1.41421356237309504880168872420969808L;
        for (const auto& row : multi_rows) {
            std::vector<long double> r(col_of.size(), 0.0L);
            for (const auto& ent : row) {
                long double v = (long double)ent.second.first + root2 * ent.second.second;
                r[col_of[ent.first]] = v;
                max_abs = std::max(max_abs, std::abs(v));
            }
            mat.push_back(std::move(r));
        }
        long double thr = 1e-9L * max_abs;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < col_of.size() && rank < mat.size(); ++col) {
            std::size_t best = rank;
            long double best_abs = std::abs(mat[rank][col]);
            for (std::size_t r = rank + 1; r < mat.size(); ++r)
                if (std::abs(mat[r][col]) > best_abs) {
                    best_abs = std::abs(mat[r][col]);
                    best = r;
                }
            if (best_abs <= thr) continue;
            if (best_abs < 10 * thr)
                out.warnings.push_back("span rank pivot within 10x of tolerance");
            std::swap(mat[rank], mat[best]);
            long double inv = 1.0L / mat[rank][col];
            for (std::size_t r = 0; r < mat.size(); ++r) {
                if (r == rank) continue;
                long double f2 = mat[r][col] * inv;
                if (f2 == 0.0L) continue;
                for (std::size_t c2 = col; c2 < col_of.size(); ++c2)
                    mat[r][c2] -= f2 * mat[rank][c2];
            }
            ++rank;
        }
        extra_rank = rank;
        out.warnings.push_back("effective span is not spanned by Pauli directions alone (" +
                               std::to_string(multi_rows.size()) + " mixed classes)");
    }

    out.s_mu = confirmed.size() + extra_rank;
    for (const auto& key : confirmed)
        out.directions.push_back(ProjectivePauli(n, key.first, key.second));
    return out;
}

// Affine GF(2) solve: rows * b = rhs over n_free bits. Returns false when
// inconsistent; else writes one particular solution and leaves the homogeneous
// solution space to the caller (via Gf2Matrix::nullspace on the same rows).
bool solve_affine(const std::vector<Gf2Vec>& rows, const std::vector<int>& rhs, int n_free,
                  std::uint64_t* solution) {
    std::vector<std::uint64_t> aug;  // low n_free bits: coefficients; bit n_free: rhs
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint64_t r = rows[i].w.empty() ? 0 : rows[i].w[0];
        r &= qubit_mask(n_free);
        if (rhs[i]) r |= std::uint64_t(1) << n_free;
        aug.push_back(r);
    }
    std::uint64_t sol = 0;
    std::size_t rank = 0;
    for (int c = 0; c < n_free && rank < aug.size(); ++c) {
        std::size_t sel = rank;
        while (sel < aug.size() && !((aug[sel] >> c) & 1)) ++sel;
        if (sel == aug.size()) continue;
        std::swap(aug[rank], aug[sel]);
        for (std::size_t i = 0; i < aug.size(); ++i)
            if (i != rank && ((aug[i] >> c) & 1)) aug[i] ^= aug[rank];
        ++rank;
    }
    for (std::size_t i = rank; i < aug.size(); ++i)
        if (aug[i] >> n_free) return false;  // 0 = 1 row
    for (std::size_t i = 0; i < rank; ++i) {
        if (!(aug[i] >> n_free)) continue;
        int c = std::countr_zero(aug[i] & qubit_mask(n_free));
        sol |= std::uint64_t(1) << c;
    }
    *solution = sol;
    return true;
}

SpanBounds make_bounds(int n, int p, int t_like, std::uint64_t extra_upper) {
    SpanBounds b;
    b.necessary_t = necessary_t(n);
    b.lower = pow2u(n);
    std::uint64_t full = 2 * n <= 62 ? pow2u(2 * n) : ~std::uint64_t(0);
    std::uint64_t ent = n + p <= 62 ? pow2u(n + p) : ~std::uint64_t(0);
    std::uint64_t up = std::min(std::min(full, ent), extra_upper);
    if (t_like > 0) {
        if (t_like <= n) {
            // The 2^{n-t} 3^t ceiling is proven only for maximally entangled
            // configurations, where the doped cut carries p == t. Below that
            // entanglement it is not a valid bound, so leave `upper` alone.
            if (p == t_like) up = std::min(up, bound_t_le_n(n, t_like));
        } else {
            b.best_known = std::min(bound_t_gt_n(n, t_like), up);
        }
    }
    b.upper = up;
    return b;
}

}  // namespace

AncillaSpec AncillaSpec::stabilizer(PauliSubgroup g) {
    AncillaSpec a;
    a.kind = AncillaKind::stabilizer;
    a.size = g.n_qubits;
    a.group = std::move(g);
    validate_ancilla(a);
    return a;
}

AncillaSpec AncillaSpec::magic_t_power(int t) {
    AncillaSpec a;
    a.kind = AncillaKind::magic_t_power;
    a.size = t;
    validate_ancilla(a);
    return a;
}

AncillaSpec AncillaSpec::dense_state(DenseState psi) {
    AncillaSpec a;
    a.kind = AncillaKind::dense;
    a.size = psi.n_qubits;
    a.psi = std::move(psi);
    validate_ancilla(a);
    return a;
}

AncillaSpec AncillaSpec::generic(int m) {
    AncillaSpec a;
    a.kind = AncillaKind::generic;
    a.size = m;
    validate_ancilla(a);
    return a;
}

void validate_ancilla(const AncillaSpec& a) {
    if (a.size < 0) throw dimension_error("ancilla register size must be nonnegative");
    switch (a.kind) {
        case AncillaKind::stabilizer:
            if (!a.group.with_signs)
                throw needs_signs_error("stabilizer ancilla needs a signed group");
            if (a.group.n_qubits != a.size || a.group.dim() != a.size)
                throw structure_error("stabilizer ancilla group must be maximal on its register");
            break;
        case AncillaKind::dense: {
            if (a.psi.n_qubits != a.size)
                throw dimension_error("dense ancilla vector width mismatch");
            double nrm = a.psi.norm();
            if (std::abs(nrm - 1.0) > 1e-12)
                throw dimension_error("dense ancilla vector must be normalized");
            break;
        }
        case AncillaKind::magic_t_power:
        case AncillaKind::generic:
            break;
    }
}

StabilizerPovmForm stabilizer_effective_povm(const PauliSubgroup& S, const PauliSubgroup& Z,
                                             int n) {
    if (!S.with_signs || !Z.with_signs)
        throw needs_signs_error("stabilizer_effective_povm needs signed groups");
    int m = Z.n_qubits;
    if (S.n_qubits != n + m) throw dimension_error("register split does not match group widths");
    if (S.dim() != n + m || !S.abelian)
        throw structure_error("measured group must be maximal abelian");
    if (Z.dim() != m) throw structure_error("ancilla group must be maximal on its register");
    if (n + m > kMaxEnumerationBits)
        throw size_limit_error("outcome table with 2^" + std::to_string(n + m) + " entries");

    PauliSubgroup Zp = embed(Z, n, n + m);
    AlignedGenerators al = align_generators(S, Zp);
    int ell = al.ell;
    if (static_cast<int>(al.g_list.size()) != n)
        throw structure_error("alignment produced a wrong effective generator count");

    StabilizerPovmForm form;
    form.n = n;
    form.m = m;
    form.ell = ell;
    form.nonzero_outcomes = pow2u(n + m - ell);
    form.multiplicity = pow2u(m - ell);
    form.scale = std::ldexp(1.0, ell - m);

    // Sign bookkeeping: for any group member, the physical projector assigns
    // the eigenvalue (-1)^{combo . b} to the exact product of the reduced
    // generators, which equals s_S * lift. Sandwiching the ancilla part of the
    // lift against the Z eigenstate contributes s_Z. Vanishing offsets d and
    // effective signs both come out as s_S * s_Z.
    std::vector<std::uint64_t> h_masks, g_masks, gt_masks;
    std::vector<int> d_bits;
    for (int j = 0; j < ell; ++j) {
        Membership ms = contains(S, al.h_list[j]);
        Membership mz = contains(Z, restrict_range(al.h_list[j], n, m));
        if (!ms.member || !mz.member) throw structure_error("alignment basis escaped the groups");
        h_masks.push_back(ms.combo.w.empty() ? 0 : ms.combo.w[0]);
        d_bits.push_back(ms.sign * mz.sign < 0 ? 1 : 0);
    }
    for (int k = 0; k < n; ++k) {
        const PauliString& g = al.g_list[k];
        Membership ms = contains(S, g);
        Membership mz = contains(Z, restrict_range(g, n, m));
        if (!ms.member || !mz.member)
            throw structure_error("effective generator escaped S or C(Z)");
        g_masks.push_back(ms.combo.w.empty() ? 0 : ms.combo.w[0]);
        form.effective_generators.push_back(restrict_range(ProjectivePauli(g), 0, n));
        form.sign_vector.push_back(ms.sign * mz.sign);
    }
    for (const auto& gt : al.g_tilde_list) {
        Membership ms = contains(S, gt);
        if (!ms.member) throw structure_error("complement generator escaped S");
        gt_masks.push_back(ms.combo.w.empty() ? 0 : ms.combo.w[0]);
    }

    std::uint64_t n_out = pow2u(n + m);
    form.outcome_relabel.resize(n_out);
    for (std::uint64_t b = 0; b < n_out; ++b) {
        OutcomeLabel lab;
        for (int j = 0; j < ell; ++j)
            lab.vanishing |= std::uint32_t(parity64(h_masks[j] & b) ^ d_bits[j]) << j;
        for (std::size_t r = 0; r < gt_masks.size(); ++r)
            lab.repeat_index |= std::uint32_t(parity64(gt_masks[r] & b)) << r;
        for (int k = 0; k < n; ++k)
            lab.effective |= std::uint32_t(parity64(g_masks[k] & b)) << k;
        form.outcome_relabel[b] = lab;
    }
    return form;
}

std::vector<DenseOperator> group_fourier(const std::vector<DenseOperator>& family,
                                         FourierDirection dir) {
    std::size_t n_elems = family.size();
    if (n_elems == 0 || (n_elems & (n_elems - 1)) != 0)
        throw dimension_error("group_fourier: family size must be a power of two");
    std::vector<DenseOperator> out = family;
    std::size_t d2 = out[0].m.size();
    for (const auto& op : out)
        if (op.m.size() != d2) throw dimension_error("group_fourier: mixed operator dimensions");

    for (std::size_t len = 1; len < n_elems; len <<= 1)
        for (std::size_t i = 0; i < n_elems; i += 2 * len)
            for (std::size_t j = i; j < i + len; ++j)
                for (std::size_t k = 0; k < d2; ++k) {
                    cplx a = out[j].m[k], b = out[j + len].m[k];
                    out[j].m[k] = a + b;
                    out[j + len].m[k] = a - b;
                }
    if (dir == FourierDirection::forward) {
        double scale = 1.0 / double(n_elems);
        for (auto& op : out)
            for (auto& v : op.m) v *= scale;
    }
    return out;
}

EffectivePovmReport span_dimension(const PauliSubgroup& S, int n, const AncillaSpec& ancilla,
                                   double dense_tol) {
    validate_ancilla(ancilla);
    int m = S.n_qubits - n;
    if (n < 0 || m < 0 || ancilla.size != m)
        throw dimension_error("span_dimension: register split does not match the ancilla");
    if (S.dim() != n + m || !S.abelian)
        throw structure_error("span_dimension: measured group must be maximal abelian");

    EffectivePovmReport rep;
    rep.n = n;
    rep.m = m;
    rep.t = ancilla.kind == AncillaKind::magic_t_power ? m : 0;

    EntanglementDecomposition ed = entanglement_decomposition(S, n);
    rep.p = ed.p;
    DoubleCosetTable dc = double_coset_table(S, ed.S_A, ed.S_B);

    std::uint64_t surviving = 0;
    std::vector<ProjectivePauli> dirs;
    for (const DoubleCoset& c : dc.cosets) {
        bool alive = false;
        switch (ancilla.kind) {
            case AncillaKind::generic:
                alive = true;
                break;
            case AncillaKind::stabilizer:
                for (const auto& bp : c.b_parts)
                    if (contains(ancilla.group, bp).member) {
                        alive = true;
                        break;
                    }
                break;
            case AncillaKind::magic_t_power:
                for (const auto& bp : c.b_parts)
                    if ((bp.z & ~bp.x) == 0) {
                        alive = true;
                        break;
                    }
                break;
            case AncillaKind::dense: {
                for (const auto& bp : c.b_parts) {
                    double e = std::abs(pauli_expectation(ancilla.psi, lift(bp)).real());
                    if (e > dense_tol) {
                        alive = true;
                        if (e < 10 * dense_tol)
                            rep.warnings.push_back("ancilla expectation " + std::to_string(e) +
                                                   " within 10x of tolerance");
                        break;
                    } else if (e > dense_tol / 10) {
                        rep.warnings.push_back("ancilla expectation " + std::to_string(e) +
                                               " within 10x below tolerance");
                    }
                }
                break;
            }
        }
        if (alive) {
            ++surviving;
            dirs.insert(dirs.end(), c.a_parts.begin(), c.a_parts.end());
        }
    }
    rep.surviving_cosets = surviving;
    rep.killed_cosets = dc.cosets.size() - surviving;
    rep.k = surviving;
    rep.s_mu = surviving * pow2u(n - ed.p);
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());
    if (dirs.size() != rep.s_mu)
        rep.warnings.push_back("direction multiset inconsistent with coset count");
    rep.reconstructed_directions = std::move(dirs);
    rep.ic = (2 * n <= 62) && rep.s_mu == pow2u(2 * n);

    std::uint64_t extra_upper = ~std::uint64_t(0);
    if (ancilla.kind == AncillaKind::stabilizer) extra_upper = pow2u(n);
    rep.bounds = make_bounds(n, ed.p, ancilla.kind == AncillaKind::magic_t_power ? m : 0,
                             extra_upper);
    return rep;
}

EffectivePovmReport analyze_doped(const DopedCircuit& c,
                                  const PauliSubgroup& physical_measurement,
                                  const AncillaSpec& ancilla) {
    int n = c.n_data, m = c.n_ancilla;
    if (!physical_measurement.with_signs)
        throw needs_signs_error("physical measurement must be a signed stabilizer basis");
    if (physical_measurement.n_qubits != n + m || physical_measurement.dim() != n + m ||
        !physical_measurement.abelian)
        throw structure_error("physical measurement must be a maximal abelian group on n+m");

    GadgetizedCircuit gc = gadgetize(c);
    int t = gc.t;
    int nu = n + m + t;

    // Heisenberg picture: evolved measurement stabilizers first (their
    // syndromes are the physical outcome bits), then the evolved gadget
    // projections (syndromes pinned at +1).
    std::vector<PauliString> evolved;
    PauliSubgroup phys_wide = embed(physical_measurement, 0, nu);
    for (const auto& g : phys_wide.gens)
        evolved.push_back(evolve_string(gc.clifford_gates, g, EvolveDirection::adjoint));
    for (int kk = 0; kk < t; ++kk) {
        PauliString zq(nu, 0, std::uint64_t(1) << (n + m + kk), 0);
        evolved.push_back(evolve_string(gc.clifford_gates, zq, EvolveDirection::adjoint));
    }
    return analyze_evolved(evolved, n, m, t, ancilla);
}

EffectivePovmReport analyze_evolved(const std::vector<PauliString>& evolved, int n, int m, int t,
                                    const AncillaSpec& ancilla) {
    if (ancilla.kind != AncillaKind::stabilizer)
        throw structure_error("doped analysis needs a stabilizer ancilla");
    validate_ancilla(ancilla);
    if (ancilla.size != m) throw dimension_error("ancilla width does not match the register");
    int nu = n + m + t;
    if (static_cast<int>(evolved.size()) != nu)
        throw dimension_error("need one evolved generator per qubit");
    for (const auto& g : evolved)
        if (g.n_qubits != nu) throw dimension_error("evolved generator width mismatch");
    for (std::size_t i = 0; i < evolved.size(); ++i)
        for (std::size_t j = i + 1; j < evolved.size(); ++j)
            if (!commutes(evolved[i], evolved[j]))
                throw stabilizer_error("evolved generators must commute");

    EffectivePovmReport rep;
    rep.n = n;
    rep.m = m;
    rep.t = t;

    ClassSumOut span = class_sum_span(evolved, n, m, t, ancilla.group);
    rep.s_mu = span.s_mu;
    rep.reconstructed_directions = span.directions;
    rep.warnings = span.warnings;

    // Structural picture: alignment against the ancilla group gives the
    // post-projection group on the data+gadget registers, plus syndrome
    // bookkeeping over the physical outcome bits.
    TrackedRref tracked;
    tracked.n = nu;
    tracked.n_inputs = nu;
    for (int i = 0; i < nu; ++i) tracked.insert(evolved[i], i);
    if (static_cast<int>(tracked.rows.size()) != nu)
        throw structure_error("evolved generators are not independent");
    PauliSubgroup S_full = canonicalize(evolved, nu, true);
    PauliSubgroup Zp = embed(ancilla.group, n, nu);
    AlignedGenerators al = align_generators(S_full, Zp);

    std::uint64_t free_mask = qubit_mask(n + m);
    std::vector<Gf2Vec> h_free;
    std::vector<int> h_rhs;
    for (const auto& h : al.h_list) {
        TrackedRref::Expr ex = tracked.express(h);
        Membership mz = contains(ancilla.group, restrict_range(h, n, m));
        if (!ex.member || !mz.member) throw structure_error("alignment basis escaped the groups");
        Gf2Vec row(n + m);
        if (!row.w.empty()) row.w[0] = (ex.combo.w.empty() ? 0 : ex.combo.w[0]) & free_mask;
        h_free.push_back(row);
        h_rhs.push_back(ex.sign * mz.sign < 0 ? 1 : 0);
    }
    std::uint64_t b0 = 0;
    bool feasible = (n + m == 0) || solve_affine(h_free, h_rhs, n + m, &b0);
    if (!feasible) {
        rep.warnings.push_back("every outcome vanishes: a gadget branch has zero probability");
    }

    // Free syndromes: image of the nonvanishing outcome slice under the
    // post-generator syndrome map.
    Gf2Matrix hmat(n + m);
    for (const auto& r : h_free) hmat.add_row(r);
    std::vector<Gf2Vec> b_space = hmat.nullspace();

    std::vector<PauliString> post_lifts;
    std::vector<int> reg_post;
    for (int q = 0; q < n; ++q) reg_post.push_back(q);
    for (int q = n + m; q < nu; ++q) reg_post.push_back(q);
    Gf2Matrix sy(static_cast<int>(b_space.size()));
    for (std::size_t k = 0; k < al.g_list.size(); ++k) {
        const PauliString& g = al.g_list[k];
        TrackedRref::Expr ex = tracked.express(g);
        Membership mz = contains(ancilla.group, restrict_range(g, n, m));
        if (!ex.member || !mz.member) throw structure_error("post generator escaped S or C(Z)");
        std::uint64_t fmask = (ex.combo.w.empty() ? 0 : ex.combo.w[0]) & free_mask;
        Gf2Vec sr(static_cast<int>(b_space.size()));
        bool varies = false;
        for (std::size_t bi = 0; bi < b_space.size(); ++bi) {
            int bit = parity64(fmask & (b_space[bi].w.empty() ? 0 : b_space[bi].w[0]));
            if (bit) varies = true;
            sr.set(static_cast<int>(bi), bit);
        }
        sy.add_row(sr);
        PauliString lifted = lift(ProjectivePauli(restrict_to(g, reg_post)));
        post_lifts.push_back(lifted);
        if (!varies && feasible) {
            int sgn = ex.sign * mz.sign * (parity64(fmask & b0) ? -1 : 1);
            rep.pinned_generators.push_back({format_pauli(lifted), sgn});
        }
    }
    rep.free_generators = sy.rank();

    int p = 0;
    std::uint64_t surviving = 0, total_cosets = 0;
    PauliSubgroup post = canonicalize(post_lifts, n + t, false);
    if (post.dim() == n + t && post.abelian) {
        EntanglementDecomposition ed = entanglement_decomposition(post, n);
        p = ed.p;
        DoubleCosetTable dc = double_coset_table(post, ed.S_A, ed.S_B);
        total_cosets = dc.cosets.size();
        for (const DoubleCoset& dcs : dc.cosets) {
            for (const auto& bp : dcs.b_parts)
                if ((bp.z & ~bp.x) == 0) {
                    ++surviving;
                    break;
                }
        }
    } else {
        rep.warnings.push_back("post-projection group degenerate; structural summary skipped");
    }
    rep.p = p;
    rep.surviving_cosets = surviving;
    rep.killed_cosets = total_cosets - surviving;
    if (rep.s_mu % pow2u(n - p) == 0) {
        rep.k = rep.s_mu / pow2u(n - p);
        if (rep.k != surviving)
            rep.warnings.push_back("coset survival count does not explain the exact span");
    } else {
        rep.warnings.push_back("span is not a multiple of 2^(n-p)");
    }

    rep.ic = (2 * n <= 62) && rep.s_mu == pow2u(2 * n);
    rep.bounds = make_bounds(n, p, t, ~std::uint64_t(0));
    return rep;
}

std::uint64_t bound_t_le_n(int n, int t) {
    if (n < 0 || t < 0 || t > n) throw dimension_error("bound_t_le_n needs 0 <= t <= n");
    unsigned __int128 v = pow2u(n - t);
    for (int i = 0; i < t; ++i) v *= 3;
    if (v > ~std::uint64_t(0)) throw size_limit_error("bound overflows 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t bound_t_gt_n(int n, int t) {
    if (n < 1 || t <= n) throw dimension_error("bound_t_gt_n needs t > n >= 1");
    int ell = t - n;
    int a = t / ell;
    int r = t - a * ell;
    auto pw = [](unsigned __int128 base, int e) {
        unsigned __int128 v = 1;
        for (int i = 0; i < e; ++i) {
            v *= base;
            if (v >> 100) throw size_limit_error("bound overflows");
        }
        return v;
    };
    unsigned __int128 p3a = pw(3, a);
    unsigned __int128 num = pw(3 * p3a - 1, r) * pw(p3a - 1, ell - r);
    unsigned __int128 den = static_cast<unsigned __int128>(1) << ell;
    if (num % den != 0) throw structure_error("bound formula produced a non-integer");
    unsigned __int128 v = num / den;
    if (v > ~std::uint64_t(0)) throw size_limit_error("bound overflows 64 bits");
    return static_cast<std::uint64_t>(v);
}

int necessary_t(int n) {
    if (n < 0) throw dimension_error("necessary_t needs n >= 0");
    unsigned __int128 target = static_cast<unsigned __int128>(1) << (2 * n);
    unsigned __int128 p3 = 1;
    int t = 0;
    while (p3 < target) {
        p3 *= 3;
        ++t;
    }
    return t;
}

bool ic_condition_check(const PauliSubgroup& S_t_projection, const PauliSubgroup& pi_t_S) {
    for (const auto& g : S_t_projection.gens)
        if (!contains(pi_t_S, g).member)
            throw structure_error("ic_condition_check: first group is not a subgroup");
    CosetTable ct = coset_table(pi_t_S, S_t_projection);
    for (const Coset& c : ct.cosets) {
        bool found = false;
        for (const auto& g : c.members)
            if ((g.z & ~g.x) == 0) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

std::string report_to_json(const EffectivePovmReport& r) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["n"] = r.n;
    j["m"] = r.m;
    j["t"] = r.t;
    j["s_mu"] = r.s_mu;
    j["p"] = r.p;
    if (r.k)
        j["k"] = *r.k;
    else
        j["k"] = nullptr;
    j["ic"] = r.ic;
    j["surviving_cosets"] = r.surviving_cosets;
    j["killed_cosets"] = r.killed_cosets;
    nlohmann::ordered_json dirs = nlohmann::ordered_json::array();
    for (const auto& d : r.reconstructed_directions) dirs.push_back(format_pauli(d));
    j["reconstructed_directions"] = std::move(dirs);
    j["bounds"] = {{"necessary_t", r.bounds.necessary_t},
                   {"lower", r.bounds.lower},
                   {"upper", r.bounds.upper},
                   {"best_known", r.bounds.best_known}};
    if (r.oracle_checked)
        j["oracle_checked"] = *r.oracle_checked;
    else
        j["oracle_checked"] = nullptr;
    if (r.free_generators)
        j["free_generators"] = *r.free_generators;
    else
        j["free_generators"] = nullptr;
    nlohmann::ordered_json pins = nlohmann::ordered_json::array();
    for (const auto& pg : r.pinned_generators)
        pins.push_back({{"generator", pg.generator}, {"sign", pg.sign}});
    j["pinned_generators"] = std::move(pins);
    j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string report_csv_header() { return "n,m,t,p,s_mu,k,ic"; }

std::string report_csv_row(const EffectivePovmReport& r) {
    std::ostringstream os;
    os << r.n << ',' << r.m << ',' << r.t << ',' << r.p << ',' << r.s_mu << ',';
    if (r.k) os << *r.k;
    os << ',' << (r.ic ? 1 : 0);
    return os.str();
}

std::uint64_t dense_s_mu_for_group(const PauliSubgroup& S_signed, int n,
                                   const AncillaSpec& ancilla, Rng* generic_rng, double tol) {
    validate_ancilla(ancilla);
    if (!S_signed.with_signs) throw needs_signs_error("dense cross-check needs a signed basis");
    int m = S_signed.n_qubits - n;
    if (ancilla.size != m) throw dimension_error("ancilla width mismatch");
    if (S_signed.dim() != n + m || !S_signed.abelian)
        throw structure_error("dense cross-check needs a maximal abelian basis group");

    DenseState psi;
    switch (ancilla.kind) {
        case AncillaKind::stabilizer:
            psi = m ? stabilizer_state(ancilla.group, 0) : basis_state(0, 0);
            break;
        case AncillaKind::magic_t_power:
            psi = t_power_state(m);
            break;
        case AncillaKind::dense:
            psi = ancilla.psi;
            break;
        case AncillaKind::generic:
            if (!generic_rng)
                throw structure_error("generic ancilla cross-check needs an RNG");
            psi = random_haar_state(m, *generic_rng);
            break;
    }
    std::vector<DenseState> basis;
    std::uint64_t n_out = pow2u(n + m);
    basis.reserve(n_out);
    for (std::uint64_t b = 0; b < n_out; ++b) basis.push_back(stabilizer_state(S_signed, b));
    std::vector<DenseOperator> ops = effective_povm({}, n, m, psi, basis);
    return span_rank(ops, tol);
}

std::uint64_t dense_s_mu_for_doped(const DopedCircuit& c, const PauliSubgroup& phys_signed,
                                   const AncillaSpec& ancilla, double tol) {
    validate_ancilla(ancilla);
    if (ancilla.kind != AncillaKind::stabilizer)
        throw structure_error("doped cross-check needs a stabilizer ancilla");
    int n = c.n_data, m = c.n_ancilla;
    if (ancilla.size != m) throw dimension_error("ancilla width mismatch");
    DenseState psi = m ? stabilizer_state(ancilla.group, 0) : basis_state(0, 0);
    std::vector<DenseState> basis;
    std::uint64_t n_out = pow2u(n + m);
    basis.reserve(n_out);
    for (std::uint64_t b = 0; b < n_out; ++b) basis.push_back(stabilizer_state(phys_signed, b));
    std::vector<DenseOperator> ops = effective_povm(c.gates, n, m, psi, basis);
    return span_rank(ops, tol);
}

}  // namespace qspan
