#include "qspan/group.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>

namespace qspan {

namespace {

void check_same_width(int a, int b) {
    if (a != b)
        throw dimension_error("group qubit count mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b));
}

// Symplectic column index of the lowest nonzero bit: x block first, then z block.
int pivot_column(const PauliString& p, int n) {
    if (p.x) return std::countr_zero(p.x);
    if (p.z) return n + std::countr_zero(p.z);
    return -1;
}

bool has_column(const PauliString& p, int n, int col) {
    if (col < n) return (p.x >> col) & 1;
    return (p.z >> (col - n)) & 1;
}

PauliString normalize_row(const PauliString& p, bool with_signs) {
    if (with_signs) return p;
    return lift(ProjectivePauli(p));  // unsigned rows kept as positive lifts
}

void guard_enumeration(int dim) {
    if (dim > kMaxEnumerationBits)
        throw size_limit_error("refusing to enumerate 2^" + std::to_string(dim) +
                               " group elements (cap 2^" + std::to_string(kMaxEnumerationBits) + ")");
}

// Insert g into the RREF rows. Returns false if g was dependent. In signed mode
// a dependent g reducing to -I raises stabilizer_error.
bool rref_insert(std::vector<PauliString>& rows, std::vector<int>& pivs, PauliString g, int n,
                 bool with_signs) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (has_column(g, n, pivs[i])) g = multiply(rows[i], g);
    if (g.is_identity_bits()) {
        // Residual phase 2 means the span contains -I; odd residual phases can
        // only arise from anticommuting inputs, equally fatal in signed mode.
        if (with_signs && (g.phase & 3) != 0)
            throw stabilizer_error("generator set spans -I (inconsistent signs)");
        return false;
    }
    int c = pivot_column(g, n);
    g = normalize_row(g, with_signs);
    // Eliminate the new pivot from existing rows, then insert sorted by pivot.
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (has_column(rows[i], n, c)) rows[i] = normalize_row(multiply(g, rows[i]), with_signs);
    std::size_t at = 0;
    while (at < rows.size() && pivs[at] < c) ++at;
    rows.insert(rows.begin() + at, g);
    pivs.insert(pivs.begin() + at, c);
    return true;
}

PauliSubgroup make_group(std::vector<PauliString> rows, std::vector<int> pivs, int n,
                         bool with_signs) {
    PauliSubgroup G;
    G.n_qubits = n;
    G.with_signs = with_signs;
    G.gens = std::move(rows);
    G.pivots = std::move(pivs);
    G.abelian = true;
    for (std::size_t i = 0; i < G.gens.size() && G.abelian; ++i)
        for (std::size_t j = i + 1; j < G.gens.size(); ++j)
            if (!commutes(G.gens[i], G.gens[j])) {
                G.abelian = false;
                break;
            }
    return G;
}

}  // namespace

PauliSubgroup PauliSubgroup::trivial(int n, bool with_signs) {
    PauliSubgroup G;
    G.n_qubits = n;
    G.with_signs = with_signs;
    return G;
}

PauliSubgroup canonicalize(const std::vector<PauliString>& gens, int n_qubits, bool with_signs,
                           int* dropped_out) {
    std::vector<PauliString> rows;
    std::vector<int> pivs;
    int dropped = 0;
    for (const PauliString& g : gens) {
        check_same_width(g.n_qubits, n_qubits);
        if (with_signs && !g.is_hermitian())
            throw stabilizer_error("signed generator is not Hermitian: " + format_pauli(g));
        if (!rref_insert(rows, pivs, g, n_qubits, with_signs)) ++dropped;
    }
    PauliSubgroup G = make_group(std::move(rows), std::move(pivs), n_qubits, with_signs);
    if (with_signs && !G.abelian)
        throw stabilizer_error("signed generators do not commute (span would contain -I)");
    if (dropped_out) *dropped_out = dropped;
    return G;
}

Membership contains(const PauliSubgroup& G, const PauliString& g) {
    check_same_width(G.n_qubits, g.n_qubits);
    Membership m;
    m.combo = Gf2Vec(G.dim());
    // Reduce the Hermitian-positive lift so the reported sign is relative to it.
    PauliString r = lift(ProjectivePauli(g));
    for (int i = 0; i < G.dim(); ++i) {
        if (has_column(r, G.n_qubits, G.pivots[i])) {
            r = multiply(G.gens[i], r);
            m.combo.flip(i);
        }
    }
    if (!r.is_identity_bits()) {
        m.combo = Gf2Vec(G.dim());
        return m;
    }
    m.member = true;
    if (G.with_signs) {
        // r = product * lift = i^e I, with everything Hermitian and commuting,
        // so e is 0 or 2 and the group element equals i^e * lift.
        m.sign = ((r.phase & 3) == 0) ? 1 : -1;
    }
    return m;
}

Membership contains(const PauliSubgroup& G, const ProjectivePauli& g) {
    return contains(G, lift(g));
}

PauliSubgroup intersect(const PauliSubgroup& A, const PauliSubgroup& B) {
    check_same_width(A.n_qubits, B.n_qubits);
    int n = A.n_qubits;
    // Zassenhaus: rows (a|a) for A, (b|0) for B; after RREF the rows with zero
    // left half carry a basis of the intersection in their right half.
    Gf2Matrix M(4 * n);
    auto pack = [n](const PauliString& p, bool doubled) {
        Gf2Vec v(4 * n);
        for (int k = 0; k < n; ++k) {
            if ((p.x >> k) & 1) v.set(k, true);
            if ((p.z >> k) & 1) v.set(n + k, true);
            if (doubled) {
                if ((p.x >> k) & 1) v.set(2 * n + k, true);
                if ((p.z >> k) & 1) v.set(3 * n + k, true);
            }
        }
        return v;
    };
    for (const auto& a : A.gens) M.add_row(pack(a, true));
    for (const auto& b : B.gens) M.add_row(pack(b, false));
    M.rref();
    bool signed_result = A.with_signs && B.with_signs;
    std::vector<PauliString> gens;
    for (const auto& row : M.rows) {
        bool left_zero = true;
        for (int c = 0; c < 2 * n && left_zero; ++c) left_zero = !row.get(c);
        if (!left_zero) continue;
        std::uint64_t x = 0, z = 0;
        for (int k = 0; k < n; ++k) {
            if (row.get(2 * n + k)) x |= 1ull << k;
            if (row.get(3 * n + k)) z |= 1ull << k;
        }
        if (x == 0 && z == 0) continue;
        PauliString p = lift(ProjectivePauli(n, x, z));
        if (signed_result) {
            Membership ma = contains(A, p);
            if (ma.sign < 0) p = multiply(PauliString(n, 0, 0, 2), p);
        }
        gens.push_back(p);
    }
    return canonicalize(gens, n, signed_result);
}

PauliSubgroup centralizer_within(const PauliSubgroup& A, const PauliSubgroup& B) {
    check_same_width(A.n_qubits, B.n_qubits);
    // Combos alpha over A's generators with sum_i alpha_i <a_i, b_j> = 0 for all j.
    Gf2Matrix M(A.dim());
    for (const auto& b : B.gens) {
        Gf2Vec row(A.dim());
        for (int i = 0; i < A.dim(); ++i) row.set(i, !commutes(A.gens[i], b));
        M.add_row(std::move(row));
    }
    std::vector<PauliString> gens;
    for (const Gf2Vec& combo : M.nullspace()) {
        PauliString p = PauliString::identity(A.n_qubits);
        for (int i = 0; i < A.dim(); ++i)
            if (combo.get(i)) p = multiply(p, A.gens[i]);
        gens.push_back(A.with_signs ? p : lift(ProjectivePauli(p)));
    }
    return canonicalize(gens, A.n_qubits, A.with_signs);
}

PauliSubgroup full_pauli_group(int n) {
    std::vector<PauliString> gens;
    gens.reserve(2 * n);
    for (int k = 0; k < n; ++k) gens.emplace_back(n, 1ull << k, 0, 0);
    for (int k = 0; k < n; ++k) gens.emplace_back(n, 0, 1ull << k, 0);
    return canonicalize(gens, n, false);
}

PauliSubgroup embed(const PauliSubgroup& local, int offset, int total) {
    if (offset < 0 || offset + local.n_qubits > total)
        throw dimension_error("embed: register does not fit");
    std::vector<PauliString> gens;
    for (const auto& g : local.gens)
        gens.emplace_back(total, g.x << offset, g.z << offset, g.phase);
    return canonicalize(gens, total, local.with_signs);
}

std::vector<PauliString> elements(const PauliSubgroup& G) {
    guard_enumeration(G.dim());
    std::vector<PauliString> out;
    out.reserve(std::size_t(1) << G.dim());
    for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << G.dim()); ++idx) {
        PauliString p = PauliString::identity(G.n_qubits);
        for (int i = 0; i < G.dim(); ++i)
            if ((idx >> i) & 1) p = multiply(p, G.gens[i]);
        out.push_back(G.with_signs ? p : lift(ProjectivePauli(p)));
    }
    return out;
}

std::vector<PauliString> extend_basis(const PauliSubgroup& sub, const PauliSubgroup& sup) {
    check_same_width(sub.n_qubits, sup.n_qubits);
    std::vector<PauliString> rows = sub.gens;
    std::vector<int> pivs = sub.pivots;
    std::vector<PauliString> extra;
    for (const auto& g : sup.gens)
        if (rref_insert(rows, pivs, g, sup.n_qubits, false)) extra.push_back(g);
    return extra;
}

AlignedGenerators align_generators(const PauliSubgroup& S, const PauliSubgroup& Z) {
    check_same_width(S.n_qubits, Z.n_qubits);
    if (!S.abelian || S.dim() != S.n_qubits)
        throw structure_error("align_generators: S must be maximal abelian");
    if (!Z.abelian) throw structure_error("align_generators: Z must be abelian");

    AlignedGenerators out;
    PauliSubgroup SZ = intersect(S, Z);
    out.ell = SZ.dim();
    out.h_list = SZ.gens;

    PauliSubgroup SC = centralizer_within(S, Z);
    out.g_list = extend_basis(SZ, SC);
    out.g_tilde_list = extend_basis(SC, S);
    out.h_tilde_list = extend_basis(SZ, Z);

    int q = static_cast<int>(out.g_tilde_list.size());
    if (static_cast<int>(out.h_tilde_list.size()) != q)
        throw structure_error("align_generators: dim(S) - dim(S cap C(Z)) != dim(Z) - dim(S cap Z)");

    // Pairing sweep: arrange {g_tilde_k, h_tilde_j} = 0 iff j == k. At each step
    // pick an anticommuting pair for slot k, then clear the rest of row/column k.
    auto& gt = out.g_tilde_list;
    auto& ht = out.h_tilde_list;
    for (int k = 0; k < q; ++k) {
        int pi = -1, pj = -1;
        for (int j = k; j < q && pi < 0; ++j)
            for (int i = k; i < q; ++i)
                if (!commutes(gt[i], ht[j])) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi < 0) throw structure_error("align_generators: no anticommuting partner found");
        std::swap(gt[k], gt[pi]);
        std::swap(ht[k], ht[pj]);
        for (int i = k + 1; i < q; ++i)
            if (!commutes(gt[i], ht[k])) gt[i] = multiply(gt[i], gt[k]);
        for (int j = k + 1; j < q; ++j)
            if (!commutes(gt[k], ht[j])) ht[j] = multiply(ht[j], ht[k]);
    }
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            if (commutes(gt[i], ht[j]) != (i != j))
                throw structure_error("align_generators: anticommutation pattern failed");

    for (const auto& h : out.h_list) out.h_combos.push_back(contains(S, h).combo);
    for (const auto& g : out.g_list) out.g_combos.push_back(contains(S, g).combo);
    for (const auto& g : out.g_tilde_list) out.g_tilde_combos.push_back(contains(S, g).combo);
    return out;
}

EntanglementDecomposition entanglement_decomposition(const PauliSubgroup& S, int n_a) {
    if (!S.abelian || S.dim() != S.n_qubits)
        throw structure_error("entanglement_decomposition: S must be maximal abelian");
    if (n_a < 0 || n_a > S.n_qubits) throw dimension_error("entanglement_decomposition: bad cut");
    int n = S.n_qubits;
    int n_b = n - n_a;
    std::uint64_t mask_a = qubit_mask(n_a);
    std::uint64_t mask_b = qubit_mask(n_b) << n_a;

    // Combos whose product is supported on one side only: nullspace of the
    // other side's bit-restriction map.
    auto local_combos = [&](std::uint64_t kill_mask) {
        Gf2Matrix M(S.dim());
        for (int k = 0; k < n; ++k) {
            if (!((kill_mask >> k) & 1)) continue;
            Gf2Vec rx(S.dim()), rz(S.dim());
            for (int i = 0; i < S.dim(); ++i) {
                rx.set(i, (S.gens[i].x >> k) & 1);
                rz.set(i, (S.gens[i].z >> k) & 1);
            }
            M.add_row(std::move(rx));
            M.add_row(std::move(rz));
        }
        return M.nullspace();
    };
    auto build = [&](const std::vector<Gf2Vec>& combos) {
        std::vector<PauliString> gens;
        for (const auto& c : combos) {
            PauliString p = PauliString::identity(n);
            for (int i = 0; i < S.dim(); ++i)
                if (c.get(i)) p = multiply(p, S.gens[i]);
            gens.push_back(p);
        }
        return canonicalize(gens, n, S.with_signs);
    };

    PauliSubgroup SA_full = build(local_combos(mask_b));  // trivial on B
    PauliSubgroup SB_full = build(local_combos(mask_a));  // trivial on A

    EntanglementDecomposition out;
    {
        std::vector<PauliString> la, lb;
        for (const auto& g : SA_full.gens) la.push_back(restrict_range(g, 0, n_a));
        for (const auto& g : SB_full.gens) lb.push_back(restrict_range(g, n_a, n_b));
        out.S_A = canonicalize(la, n_a, S.with_signs);
        out.S_B = canonicalize(lb, n_b, S.with_signs);
    }

    // Nonlocal generators: extend S_A * S_B to S, then pair them up by the
    // A-side commutation form (symplectic Gram-Schmidt). Commutation of full
    // operators plus A-side anticommutation forces the mirrored B-side pattern.
    std::vector<PauliString> locals = SA_full.gens;
    locals.insert(locals.end(), SB_full.gens.begin(), SB_full.gens.end());
    PauliSubgroup J = canonicalize(locals, n, S.with_signs);
    std::vector<PauliString> rest = extend_basis(J, S);
    if (rest.size() % 2 != 0)
        throw structure_error("entanglement_decomposition: odd nonlocal generator count");

    auto sym_a = [&](const PauliString& u, const PauliString& v) {
        int s = std::popcount(u.x & v.z & mask_a) + std::popcount(u.z & v.x & mask_a);
        return s & 1;
    };
    while (!rest.empty()) {
        PauliString u = rest.front();
        rest.erase(rest.begin());
        int partner = -1;
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (sym_a(u, rest[i])) {
                partner = static_cast<int>(i);
                break;
            }
        if (partner < 0)
            throw structure_error("entanglement_decomposition: unpaired nonlocal generator");
        PauliString v = rest[partner];
        rest.erase(rest.begin() + partner);
        for (auto& w : rest) {
            if (sym_a(w, v)) w = multiply(w, u);
            if (sym_a(w, u)) w = multiply(w, v);
        }
        NonlocalPair pair;
        pair.g = u;
        pair.g_bar = v;
        pair.g_a = ProjectivePauli(restrict_range(ProjectivePauli(u), 0, n_a));
        pair.g_b = ProjectivePauli(restrict_range(ProjectivePauli(u), n_a, n_b));
        pair.g_bar_a = ProjectivePauli(restrict_range(ProjectivePauli(v), 0, n_a));
        pair.g_bar_b = ProjectivePauli(restrict_range(ProjectivePauli(v), n_a, n_b));
        out.nonlocal_pairs.push_back(std::move(pair));
    }
    out.p = static_cast<int>(out.nonlocal_pairs.size());
    if (2 * out.p != n_a + n_b - out.S_A.dim() - out.S_B.dim())
        throw structure_error("entanglement_decomposition: dimension count mismatch");
    return out;
}

namespace {

CosetTable enumerate_cosets(const PauliSubgroup& S, const PauliSubgroup& H,
                            const std::vector<PauliString>& complement) {
    guard_enumeration(static_cast<int>(complement.size()));
    guard_enumeration(H.dim());
    std::vector<PauliString> h_elems = elements(H);
    CosetTable table;
    for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << complement.size()); ++idx) {
        PauliString rep0 = PauliString::identity(S.n_qubits);
        for (std::size_t i = 0; i < complement.size(); ++i)
            if ((idx >> i) & 1) rep0 = multiply(rep0, complement[i]);
        Coset c;
        for (const auto& h : h_elems) c.members.emplace_back(multiply(rep0, h));
        std::sort(c.members.begin(), c.members.end());
        c.rep = c.members.front();
        table.cosets.push_back(std::move(c));
    }
    std::sort(table.cosets.begin(), table.cosets.end(),
              [](const Coset& a, const Coset& b) { return a.rep < b.rep; });
    return table;
}

}  // namespace

CosetTable coset_table(const PauliSubgroup& S, const PauliSubgroup& H) {
    check_same_width(S.n_qubits, H.n_qubits);
    guard_enumeration(S.dim());  // total member count is 2^dim(S)
    for (const auto& h : H.gens)
        if (!contains(S, h).member)
            throw structure_error("coset_table: H is not a subgroup of S");
    std::vector<PauliString> complement = extend_basis(H, S);
    return enumerate_cosets(S, H, complement);
}

DoubleCosetTable double_coset_table(const PauliSubgroup& S, const PauliSubgroup& S_A_local,
                                    const PauliSubgroup& S_B_local) {
    int n_a = S_A_local.n_qubits;
    int n_b = S_B_local.n_qubits;
    if (n_a + n_b != S.n_qubits)
        throw dimension_error("double_coset_table: local registers do not fill the cut");
    std::vector<PauliString> joint;
    for (const auto& g : embed(S_A_local, 0, S.n_qubits).gens) joint.push_back(g);
    for (const auto& g : embed(S_B_local, n_a, S.n_qubits).gens) joint.push_back(g);
    PauliSubgroup J = canonicalize(joint, S.n_qubits, false);
    CosetTable flat = coset_table(S, J);

    DoubleCosetTable out;
    out.n_a = n_a;
    out.n_b = n_b;
    for (auto& c : flat.cosets) {
        DoubleCoset d;
        d.rep = c.rep;
        d.members = std::move(c.members);
        for (const auto& m : d.members) {
            d.a_parts.push_back(restrict_range(m, 0, n_a));
            d.b_parts.push_back(restrict_range(m, n_a, n_b));
        }
        auto dedupe = [](std::vector<ProjectivePauli>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        dedupe(d.a_parts);
        dedupe(d.b_parts);
        out.cosets.push_back(std::move(d));
    }
    return out;
}

double stabilizer_overlap(const PauliSubgroup& S1, const PauliSubgroup& S2) {
    if (!S1.with_signs || !S2.with_signs)
        throw needs_signs_error("stabilizer_overlap requires signed groups");
    check_same_width(S1.n_qubits, S2.n_qubits);
    int n = S1.n_qubits;
    if (S1.dim() != n || S2.dim() != n)
        throw structure_error("stabilizer_overlap requires maximal groups");
    PauliSubgroup I = intersect(S1, S2);
    // Sign discrepancy is multiplicative over the intersection, so checking the
    // basis elements suffices.
    for (const auto& g : I.gens) {
        Membership m1 = contains(S1, g);
        Membership m2 = contains(S2, g);
        if (m1.sign != m2.sign) return 0.0;
    }
    return std::ldexp(1.0, I.dim() - n);  // 2^(dim - n)
}

std::uint64_t zfree_centralizer_count(const PauliSubgroup& H) {
    if (!H.abelian) throw structure_error("zfree_centralizer_count: H must be abelian");
    int t = H.n_qubits;
    if (t > 38) throw size_limit_error("zfree_centralizer_count: 3^t exceeds exact integer range");
    guard_enumeration(H.dim());
    std::vector<std::int64_t> pow3(t + 1, 1);
    for (int i = 1; i <= t; ++i) pow3[i] = pow3[i - 1] * 3;
    __int128 sum = 0;
    for (const auto& h : elements(H)) {
        WeightCounts w = weight_counts(ProjectivePauli(h));
        std::int64_t term = pow3[w.n_I];
        sum += (w.n_Z & 1) ? -static_cast<__int128>(term) : static_cast<__int128>(term);
    }
    __int128 order = static_cast<__int128>(1) << H.dim();
    if (sum < 0 || sum % order != 0)
        throw error("zfree_centralizer_count: non-integer result (group not abelian?)");
    return static_cast<std::uint64_t>(sum / order);
}

GroupLoadResult load_group(std::istream& in, bool with_signs) {
    std::vector<PauliString> gens;
    std::string line;
    int n = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(b, e - b + 1);
        PauliString p;
        try {
            p = parse_pauli(tok);
        } catch (const parse_error& pe) {
            throw parse_error("line " + std::to_string(line_no) + ": " + pe.bare, pe.position);
        }
        if (n < 0) n = p.n_qubits;
        if (p.n_qubits != n)
            throw parse_error("line " + std::to_string(line_no) + ": inconsistent qubit count", 0);
        gens.push_back(p);
    }
    if (n < 0) throw parse_error("group file contains no generators", 0);
    GroupLoadResult res;
    res.group = canonicalize(gens, n, with_signs, &res.dropped);
    return res;
}

GroupLoadResult load_group_text(const std::string& text, bool with_signs) {
    std::istringstream in(text);
    return load_group(in, with_signs);
}

std::string save_group(const PauliSubgroup& G) {
    std::string out;
    for (const auto& g : G.gens) {
        std::string s = format_pauli(g);
        if (G.with_signs && !s.empty() && s[0] != '-') out += '+';
        out += s;
        out += '\n';
    }
    return out;
}

}  // namespace qspan
