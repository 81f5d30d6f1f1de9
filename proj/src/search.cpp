#include "qspan/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace qspan {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Symplectic vectors. A string on t qubits is a 2t-bit word with x_q at bit 2q
// and z_q at bit 2q+1, so two strings commute iff the symplectic inner product
// below is zero.

using symvec = std::uint64_t;

symvec swap_xz(symvec v) {
    const symvec odd = 0xAAAAAAAAAAAAAAAAull;
    return ((v << 1) & odd) | ((v & odd) >> 1);
}

int sym_inner(symvec a, symvec b) { return std::popcount(a & swap_xz(b)) & 1; }

symvec pauli_to_vec(const ProjectivePauli& g) {
    symvec v = 0;
    for (int q = 0; q < g.n_qubits; ++q) {
        v |= ((g.x >> q) & 1) << (2 * q);
        v |= ((g.z >> q) & 1) << (2 * q + 1);
    }
    return v;
}

PauliString vec_to_pauli(symvec v, int t) {
    std::uint64_t x = 0, z = 0;
    for (int q = 0; q < t; ++q) {
        x |= ((v >> (2 * q)) & 1) << q;
        z |= ((v >> (2 * q + 1)) & 1) << q;
    }
    return lift(ProjectivePauli(t, x, z));
}

// GF(2) linear basis keyed by leading bit, for independence tests.
struct XorBasis {
    symvec row[64] = {0};

    symvec reduce(symvec v) const {
        while (v) {
            int b = 63 - std::countl_zero(v);
            if (!row[b]) return v;
            v ^= row[b];
        }
        return 0;
    }

    bool add(symvec v) {
        v = reduce(v);
        if (!v) return false;
        row[63 - std::countl_zero(v)] = v;
        return true;
    }
};

std::uint64_t pow2_checked(int e) {
    if (e < 0 || e > 62) throw size_limit_error("2^" + std::to_string(e) + " out of range");
    return std::uint64_t(1) << e;
}

std::uint64_t pow3_checked(int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > ~std::uint64_t(0) / 3) throw size_limit_error("3^t overflow");
        r *= 3;
    }
    return r;
}

std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > ~std::uint64_t(0) / a) throw size_limit_error("count overflow");
    return a * b;
}

// ---------------------------------------------------------------------------
// Symmetry orbit reduction: qubit permutations and per-qubit X<->Y swaps. The
// X<->Y swap is z ^= x on that qubit (the S-gate action modulo phase), which
// fixes Z and so preserves Z-freeness.

PauliSubgroup transform_group(const PauliSubgroup& G, const std::vector<int>& perm,
                              std::uint64_t xy_mask) {
    int t = G.n_qubits;
    std::vector<PauliString> out;
    out.reserve(G.gens.size());
    for (const PauliString& g : G.gens) {
        std::uint64_t x = 0, z = 0;
        for (int q = 0; q < t; ++q) {
            std::uint64_t xb = (g.x >> q) & 1;
            std::uint64_t zb = (g.z >> q) & 1;
            if ((xy_mask >> q) & 1) zb ^= xb;
            x |= xb << perm[q];
            z |= zb << perm[q];
        }
        out.push_back(lift(ProjectivePauli(t, x, z)));
    }
    return canonicalize(out, t, false);
}

bool is_orbit_representative(const PauliSubgroup& G) {
    int t = G.n_qubits;
    std::string self = save_group(G);
    std::vector<int> perm(t);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << t); ++mask) {
            if (save_group(transform_group(G, perm, mask)) < self) return false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

// ---------------------------------------------------------------------------
// Scan plumbing shared by the drivers.

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rng sample_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 1)));
}

struct ScanClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

constexpr std::size_t kMaxWitnesses = 6;

// Partial results of one worker. Scan-specific counters ride along so the
// merge stays a single associative function.
struct Accum {
    std::uint64_t examined = 0;
    std::map<std::uint64_t, std::uint64_t> hist;
    std::vector<std::pair<std::uint64_t, SearchWitness>> witnesses;  // keyed by stream index
    bool falsified = false;

    bool has_best = false;
    std::uint64_t best_val = 0, best_idx = 0;
    SearchWitness best_wit;

    std::uint64_t oracle_ok = 0;
    std::uint64_t ic_count = 0;
    std::uint64_t mixed_count = 0;
    std::uint64_t max_serial = 0, max_parallel = 0;

    void offer_best(std::uint64_t val, std::uint64_t idx, SearchWitness w) {
        if (!has_best || val > best_val || (val == best_val && idx < best_idx)) {
            has_best = true;
            best_val = val;
            best_idx = idx;
            best_wit = std::move(w);
        }
    }

    void merge(Accum&& o) {
        examined += o.examined;
        for (auto& [v, c] : o.hist) hist[v] += c;
        for (auto& w : o.witnesses) witnesses.push_back(std::move(w));
        falsified = falsified || o.falsified;
        if (o.has_best) offer_best(o.best_val, o.best_idx, std::move(o.best_wit));
        oracle_ok += o.oracle_ok;
        ic_count += o.ic_count;
        mixed_count += o.mixed_count;
        max_serial = std::max(max_serial, o.max_serial);
        max_parallel = std::max(max_parallel, o.max_parallel);
    }
};

void validate_task_common(const SearchTask& t) {
    if (t.n < 1) throw parse_error("task: n must be >= 1", 0);
    if (t.shard.count < 1 || t.shard.index < 0 || t.shard.index >= t.shard.count)
        throw parse_error("task: shard index/count out of range", 0);
    if (t.threads < 1 || t.threads > 64) throw parse_error("task: threads must be in [1, 64]", 0);
    if (t.budget.max_candidates == 0 || !(t.budget.max_seconds > 0))
        throw parse_error("task: budget.max_candidates and budget.max_seconds are mandatory", 0);
}

// Stream indices assigned to this shard, truncated at the candidate budget.
std::vector<std::uint64_t> shard_indices(std::uint64_t total, const SearchTask& task,
                                         bool* capped) {
    std::vector<std::uint64_t> idx;
    for (std::uint64_t i = task.shard.index; i < total;
         i += static_cast<std::uint64_t>(task.shard.count)) {
        if (idx.size() >= task.budget.max_candidates) {
            *capped = true;
            break;
        }
        idx.push_back(i);
    }
    return idx;
}

// Runs `work` over the index list, split into contiguous blocks when the task
// asks for threads. Workers never stop each other on findings, so the merged
// result is independent of scheduling; only the wall-clock cap can cut a
// block short, and that is reported as incomplete.
Accum run_indexed(const SearchTask& task, const std::vector<std::uint64_t>& idx,
                  const ScanClock& clock,
                  const std::function<void(std::uint64_t, Rng&, Accum&)>& work,
                  bool* hit_time) {
    int nt = static_cast<int>(std::min<std::uint64_t>(
        std::min(task.threads, 16), std::max<std::size_t>(idx.size(), 1)));
    std::atomic<bool> timeout{false};
    std::vector<Accum> parts(nt);

    auto body = [&](int w) {
        std::size_t lo = idx.size() * w / nt, hi = idx.size() * (w + 1) / nt;
        for (std::size_t j = lo; j < hi; ++j) {
            if (timeout.load(std::memory_order_relaxed)) break;
            if (clock.seconds() > task.budget.max_seconds) {
                timeout.store(true, std::memory_order_relaxed);
                break;
            }
            Rng rng = sample_rng(task.seed, idx[j]);
            work(idx[j], rng, parts[w]);
            parts[w].examined += 1;
        }
    };

    if (nt == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) pool.emplace_back(body, w);
        for (auto& th : pool) th.join();
    }

    Accum total;
    for (auto& p : parts) total.merge(std::move(p));
    *hit_time = timeout.load();
    return total;
}

SearchReport assemble(const SearchTask& task, Accum&& acc, const ScanClock& clock,
                      bool complete, std::vector<std::string> notes) {
    SearchReport r;
    r.task = task;
    r.examined = acc.examined;
    for (auto& [v, c] : acc.hist) r.histogram.push_back({v, c});
    std::stable_sort(acc.witnesses.begin(), acc.witnesses.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [i, w] : acc.witnesses) {
        if (r.witnesses.size() >= kMaxWitnesses) break;
        r.witnesses.push_back(std::move(w));
    }
    if (acc.has_best && r.witnesses.size() < kMaxWitnesses) {
        bool dup = false;
        for (const auto& w : r.witnesses) dup = dup || w.label == acc.best_wit.label;
        if (!dup) r.witnesses.push_back(std::move(acc.best_wit));
    }
    r.complete = complete;
    r.verdict = acc.falsified  ? SearchVerdict::falsified
                : complete     ? SearchVerdict::consistent
                               : SearchVerdict::incomplete;
    r.notes = std::move(notes);
    r.seconds = clock.seconds();
    return r;
}

PauliSubgroup z_basis(int width) {
    std::vector<PauliString> gens;
    for (int q = 0; q < width; ++q)
        gens.push_back(PauliString(width, 0, std::uint64_t(1) << q, 0));
    return canonicalize(gens, width, true);
}

SearchWitness make_witness(std::string label, const PauliSubgroup& G, const DopedCircuit* c,
                           EffectivePovmReport rep) {
    SearchWitness w;
    w.label = std::move(label);
    w.group_text = save_group(G);
    if (c) w.circuit_text = save_circuit(*c);
    w.report = std::move(rep);
    return w;
}

// The pairs-plus-X-fill gadget group: dimension t-n on t qubits, every coset
// of its centralizer quotient Z-free-representable. Defined for t >= 2n.
PauliSubgroup paired_gadget_group(int n, int t) {
    std::vector<PauliString> gens;
    for (int i = 0; i < t - n; ++i) {
        if (2 * i + 1 < 2 * n) {
            gens.push_back(lift(ProjectivePauli(t, std::uint64_t(1) << (2 * i),
                                                std::uint64_t(1) << (2 * i + 1))));
        }
    }
    for (int q = 2 * n; q < t; ++q)
        gens.push_back(lift(ProjectivePauli(t, std::uint64_t(1) << q, 0)));
    return canonicalize(gens, t, false);
}

}  // namespace

// ---------------------------------------------------------------------------
// Enumeration

void for_each_abelian_subgroup(int t, int ell, bool symmetry_reduce,
                               const std::function<bool(const PauliSubgroup&)>& fn) {
    if (t < 0 || ell < 0 || ell > t)
        throw dimension_error("subgroup enumeration needs 0 <= ell <= t");
    if (t > 16) throw size_limit_error("subgroup enumeration supported for t <= 16");
    if (symmetry_reduce && t > 5)
        throw size_limit_error("symmetry reduction supported for t <= 5");

    if (ell == 0) {
        fn(PauliSubgroup::trivial(t));
        return;
    }

    const int cols = 2 * t;
    std::vector<int> piv(ell);
    std::iota(piv.begin(), piv.end(), 0);

    std::vector<symvec> rows(ell);
    std::vector<std::pair<int, int>> free_pos;  // (row, column)

    auto next_combination = [&]() {
        int i = ell - 1;
        while (i >= 0 && piv[i] == cols - ell + i) --i;
        if (i < 0) return false;
        ++piv[i];
        for (int j = i + 1; j < ell; ++j) piv[j] = piv[j - 1] + 1;
        return true;
    };

    do {
        std::uint64_t piv_mask = 0;
        for (int c : piv) piv_mask |= std::uint64_t(1) << c;
        free_pos.clear();
        for (int i = 0; i < ell; ++i)
            for (int c = piv[i] + 1; c < cols; ++c)
                if (!((piv_mask >> c) & 1)) free_pos.emplace_back(i, c);

        if (free_pos.size() > 40) throw size_limit_error("subgroup enumeration too large");
        std::uint64_t masks = std::uint64_t(1) << free_pos.size();
        for (std::uint64_t m = 0; m < masks; ++m) {
            for (int i = 0; i < ell; ++i) rows[i] = std::uint64_t(1) << piv[i];
            for (std::size_t b = 0; b < free_pos.size(); ++b)
                if ((m >> b) & 1)
                    rows[free_pos[b].first] |= std::uint64_t(1) << free_pos[b].second;

            bool isotropic = true;
            for (int i = 0; i < ell && isotropic; ++i)
                for (int j = i + 1; j < ell && isotropic; ++j)
                    isotropic = sym_inner(rows[i], rows[j]) == 0;
            if (!isotropic) continue;

            std::vector<PauliString> gens;
            gens.reserve(ell);
            for (int i = 0; i < ell; ++i) gens.push_back(vec_to_pauli(rows[i], t));
            PauliSubgroup G = canonicalize(gens, t, false);
            if (symmetry_reduce && !is_orbit_representative(G)) continue;
            if (!fn(G)) return;
        }
    } while (next_combination());
}

std::vector<PauliSubgroup> enumerate_abelian_subgroups(int t, int ell, bool symmetry_reduce) {
    std::vector<PauliSubgroup> out;
    for_each_abelian_subgroup(t, ell, symmetry_reduce, [&](const PauliSubgroup& g) {
        out.push_back(g);
        return true;
    });
    return out;
}

std::uint64_t count_abelian_subgroups(int t, int ell) {
    if (t < 0 || ell < 0 || ell > t)
        throw dimension_error("subgroup count needs 0 <= ell <= t");
    // Totally isotropic ell-subspaces factor as the Gaussian binomial [t ell]_2
    // times prod_{i<ell} (2^{t-i} + 1).
    std::vector<std::vector<std::uint64_t>> gb(t + 1, std::vector<std::uint64_t>(ell + 1, 0));
    for (int i = 0; i <= t; ++i) {
        gb[i][0] = 1;
        for (int j = 1; j <= std::min(i, ell); ++j) {
            std::uint64_t hi = mul_checked(pow2_checked(j), gb[i - 1][j]);
            if (gb[i - 1][j - 1] > ~std::uint64_t(0) - hi) throw size_limit_error("count overflow");
            gb[i][j] = gb[i - 1][j - 1] + hi;
        }
    }
    std::uint64_t out = gb[t][ell];
    for (int i = 0; i < ell; ++i) out = mul_checked(out, pow2_checked(t - i) + 1);
    return out;
}

PauliSubgroup random_abelian_subgroup(int t, int ell, Rng& rng) {
    if (t < 1 || ell < 0 || ell > t)
        throw dimension_error("random subgroup needs 1 <= t and 0 <= ell <= t");
    if (t > 30) throw size_limit_error("random subgroup supported for t <= 30");
    std::vector<symvec> chosen;
    XorBasis basis;
    symvec mask = (std::uint64_t(1) << (2 * t)) - 1;
    int guard = 0;
    while (static_cast<int>(chosen.size()) < ell) {
        if (++guard > 200000) throw structure_error("random subgroup draw did not converge");
        symvec v = rng() & mask;
        if (!v) continue;
        bool ok = true;
        for (symvec u : chosen) ok = ok && sym_inner(u, v) == 0;
        if (!ok || !basis.add(v)) continue;
        chosen.push_back(v);
    }
    std::vector<PauliString> gens;
    for (symvec v : chosen) gens.push_back(vec_to_pauli(v, t));
    if (gens.empty()) return PauliSubgroup::trivial(t);
    return canonicalize(gens, t, false);
}

// ---------------------------------------------------------------------------
// Group construction helpers

PauliSubgroup complete_to_maximal(const PauliSubgroup& H, int n) {
    int t = H.n_qubits;
    if (!H.abelian) throw structure_error("complete_to_maximal needs an abelian seed");
    if (t < 1 || t > 30) throw size_limit_error("complete_to_maximal supported for 1 <= t <= 30");
    int pairs = t - H.dim();
    if (pairs > n) throw structure_error("not enough data qubits to pair the quotient");
    if (n + t > kMaxEnumerationBits)
        throw size_limit_error("completed group exceeds the enumeration width");

    XorBasis span;
    for (const PauliString& h : H.gens) span.add(pauli_to_vec(ProjectivePauli(h)));

    PauliSubgroup cent = centralizer_within(full_pauli_group(t), H);
    std::vector<symvec> pool;
    for (const PauliString& g : cent.gens) pool.push_back(pauli_to_vec(ProjectivePauli(g)));

    std::vector<std::pair<symvec, symvec>> found;
    while (static_cast<int>(found.size()) < pairs) {
        symvec e = 0;
        for (symvec v : pool)
            if (span.reduce(v)) {
                e = v;
                break;
            }
        if (!e) throw structure_error("symplectic completion ran out of directions");
        symvec f = 0;
        for (symvec v : pool)
            if (sym_inner(e, v)) {
                f = v;
                break;
            }
        if (!f) throw structure_error("symplectic completion found no conjugate partner");
        found.emplace_back(e, f);
        span.add(e);
        span.add(f);
        for (symvec& v : pool) {
            if (sym_inner(v, f)) v ^= e;
            if (sym_inner(v, e)) v ^= f;
        }
    }

    std::vector<PauliString> rows;
    for (const PauliString& h : embed(H, n, n + t).gens) rows.push_back(h);
    for (int i = 0; i < pairs; ++i) {
        auto [e, f] = found[i];
        PauliString pe = vec_to_pauli(e, t), pf = vec_to_pauli(f, t);
        rows.push_back(lift(ProjectivePauli(n + t, (pe.x << n) | (std::uint64_t(1) << i),
                                            pe.z << n)));
        rows.push_back(lift(ProjectivePauli(n + t, pf.x << n,
                                            (pf.z << n) | (std::uint64_t(1) << i))));
    }
    for (int q = pairs; q < n; ++q)
        rows.push_back(PauliString(n + t, 0, std::uint64_t(1) << q, 0));

    PauliSubgroup S = canonicalize(rows, n + t, false);
    if (!S.abelian || S.dim() != n + t)
        throw structure_error("symplectic completion did not produce a maximal abelian group");
    return S;
}

PauliSubgroup bell_pairing(int n) {
    if (n < 1 || 2 * n > kMaxEnumerationBits)
        throw dimension_error("bell_pairing needs 1 <= n and 2n within the enumeration width");
    std::vector<PauliString> gens;
    for (int i = 0; i < n; ++i) {
        std::uint64_t pair = (std::uint64_t(1) << i) | (std::uint64_t(1) << (n + i));
        gens.push_back(PauliString(2 * n, pair, 0, 0));
        gens.push_back(PauliString(2 * n, 0, pair, 0));
    }
    return canonicalize(gens, 2 * n, false);
}

std::uint64_t mixed_ancilla_span(const PauliSubgroup& S, int n) {
    if (n < 1 || n >= S.n_qubits)
        throw dimension_error("mixed_ancilla_span needs 1 <= n < total qubits");
    if (!S.abelian || S.dim() != S.n_qubits)
        throw stabilizer_error("mixed_ancilla_span needs a maximal abelian group");
    // Tracing out a maximally mixed ancilla kills every element with a
    // nontrivial ancilla part, so the span is the data-local subgroup.
    EntanglementDecomposition ed = entanglement_decomposition(S, n);
    return pow2_checked(n - ed.p);
}

// ---------------------------------------------------------------------------
// Ancilla-state scan values

namespace {

// |<psi| g |psi>| for every string on psi's register, indexed by (z << m) | x.
std::vector<double> expectation_table(const DenseState& psi) {
    int m = psi.n_qubits;
    if (2 * m > 24) throw size_limit_error("expectation table supported for m <= 12");
    std::vector<double> tab(std::size_t(1) << (2 * m));
    for (std::uint64_t z = 0; z < (std::uint64_t(1) << m); ++z)
        for (std::uint64_t x = 0; x < (std::uint64_t(1) << m); ++x)
            tab[(z << m) | x] = std::abs(pauli_expectation(psi, lift(ProjectivePauli(m, x, z))));
    return tab;
}

std::uint64_t surviving_cosets(const PauliSubgroup& H, const PauliSubgroup& cent,
                               const std::vector<double>& tab, int m, double tol) {
    CosetTable ct = coset_table(cent, H);
    std::uint64_t surv = 0;
    for (const Coset& c : ct.cosets) {
        bool alive = false;
        for (const ProjectivePauli& g : c.members)
            alive = alive || tab[(g.z << m) | g.x] > tol;
        if (alive) ++surv;
    }
    return surv;
}

std::uint64_t maxent_best(int n, const DenseState& psi, int p, double tol,
                          const std::vector<double>& tab, PauliSubgroup* best_h) {
    int m = psi.n_qubits;
    if (p < 0 || p > std::min(n, m)) throw dimension_error("maxent value needs 0 <= p <= min(n, m)");
    PauliSubgroup full = full_pauli_group(m);
    std::uint64_t best = 0;
    for_each_abelian_subgroup(m, m - p, false, [&](const PauliSubgroup& H) {
        PauliSubgroup cent = centralizer_within(full, H);
        std::uint64_t surv = surviving_cosets(H, cent, tab, m, tol);
        if (surv > best) {
            best = surv;
            if (best_h) *best_h = H;
        }
        return true;
    });
    return mul_checked(best, pow2_checked(n - p));
}

}  // namespace

std::uint64_t maxent_value(int n, const DenseState& psi, int p, double tol) {
    std::vector<double> tab = expectation_table(psi);
    return maxent_best(n, psi, p, tol, tab, nullptr);
}

// ---------------------------------------------------------------------------
// Scan drivers

SearchReport conjecture_2n_scan(const SearchTask& task) {
    validate_task_common(task);
    ScanClock clock;
    int n = task.n, t = task.t;
    if (t < 0 || t > 16) throw parse_error("conjecture_2n: t must be in [0, 16]", 0);
    std::vector<std::string> notes;
    Accum acc;

    if (t < n) {
        notes.push_back("t < n: the doped cut carries at most p = t < n, so no candidate exists");
        return assemble(task, std::move(acc), clock, true, std::move(notes));
    }

    int ell = t - n;
    PauliSubgroup full = full_pauli_group(t);

    // Per-candidate processing: coset check first, then the completed group is
    // analyzed for the histogram, which re-verifies the check.
    auto process = [&](const PauliSubgroup& H, std::uint64_t idx, Accum& a) {
        bool ic = ic_condition_check(H, centralizer_within(full, H));
        PauliSubgroup S = complete_to_maximal(H, n);
        EffectivePovmReport rep = span_dimension(S, n, AncillaSpec::magic_t_power(t));
        a.hist[rep.s_mu] += 1;
        if (ic != rep.ic) {
            a.falsified = true;
            a.witnesses.emplace_back(
                idx, make_witness("coset check and span analysis disagree", S, nullptr, rep));
            return;
        }
        if (ic) {
            a.ic_count += 1;
            if (t < 2 * n) {
                a.falsified = true;
                a.witnesses.emplace_back(
                    idx, make_witness("IC candidate below t = 2n", S, nullptr, rep));
            } else if (a.witnesses.empty()) {
                a.witnesses.emplace_back(idx, make_witness("IC candidate", S, nullptr, rep));
            }
        }
    };

    if (t >= 2 * n) {
        // Existence is settled by the constructive candidate, so check it
        // first instead of walking the full stream.
        PauliSubgroup H0 = paired_gadget_group(n, t);
        bool ic0 = ic_condition_check(H0, centralizer_within(full, H0));
        PauliSubgroup S0 = complete_to_maximal(H0, n);
        EffectivePovmReport rep0 = span_dimension(S0, n, AncillaSpec::magic_t_power(t));
        acc.examined += 1;
        acc.hist[rep0.s_mu] += 1;
        if (!ic0 || !rep0.ic) {
            acc.falsified = true;
            acc.witnesses.emplace_back(
                0, make_witness("constructive candidate failed verification", S0, nullptr, rep0));
            notes.push_back("the paired construction did not verify as IC");
            return assemble(task, std::move(acc), clock, true, std::move(notes));
        }
        acc.ic_count += 1;
        acc.witnesses.emplace_back(
            0, make_witness("constructive IC witness", S0, nullptr, rep0));
        notes.push_back("existence settled by the paired construction; full stream skipped");

        if (task.samples > 0) {
            bool capped = false, hit_time = false;
            std::vector<std::uint64_t> idx = shard_indices(task.samples, task, &capped);
            Accum sampled = run_indexed(
                task, idx, clock,
                [&](std::uint64_t i, Rng& rng, Accum& a) {
                    process(random_abelian_subgroup(t, ell, rng), i + 1, a);
                },
                &hit_time);
            std::uint64_t extra_ic = sampled.ic_count;
            acc.merge(std::move(sampled));
            notes.push_back("random candidates with IC: " + std::to_string(extra_ic));
            bool complete = !capped && !hit_time;
            if (!complete) notes.push_back("budget reached before the sample count");
            return assemble(task, std::move(acc), clock, complete, std::move(notes));
        }
        return assemble(task, std::move(acc), clock, true, std::move(notes));
    }

    // n <= t < 2n: the conjecture predicts zero IC candidates.
    bool complete = true;
    if (task.samples == 0) {
        if (task.threads > 1)
            notes.push_back("exhaustive stream runs single-threaded; use shards to parallelize");
        std::uint64_t index = 0, local = 0;
        bool settled = false;
        for_each_abelian_subgroup(t, ell, task.symmetry_reduce, [&](const PauliSubgroup& H) {
            std::uint64_t i = index++;
            if (task.shard.count > 1 &&
                i % static_cast<std::uint64_t>(task.shard.count) !=
                    static_cast<std::uint64_t>(task.shard.index))
                return true;
            if (local >= task.budget.max_candidates || clock.seconds() > task.budget.max_seconds) {
                complete = false;
                return false;
            }
            ++local;
            process(H, i, acc);
            acc.examined += 1;
            if (acc.falsified) {
                settled = true;
                return false;
            }
            return true;
        });
        if (settled) {
            notes.push_back("stream stopped at the first counterexample");
            complete = true;
        }
    } else {
        bool capped = false, hit_time = false;
        std::vector<std::uint64_t> idx = shard_indices(task.samples, task, &capped);
        acc = run_indexed(
            task, idx, clock,
            [&](std::uint64_t i, Rng& rng, Accum& a) {
                process(random_abelian_subgroup(t, ell, rng), i, a);
            },
            &hit_time);
        complete = !capped && !hit_time;
    }
    notes.push_back("candidates with IC: " + std::to_string(acc.ic_count));
    if (!complete) notes.push_back("budget reached before the stream ended");
    return assemble(task, std::move(acc), clock, complete, std::move(notes));
}

SearchReport conjecture_maxent_scan(const SearchTask& task) {
    validate_task_common(task);
    ScanClock clock;
    int n = task.n, m = task.m;
    if (m < 1 || m > 8) throw parse_error("conjecture_maxent: m must be in [1, 8]", 0);
    if (task.samples == 0) throw parse_error("conjecture_maxent: samples must be > 0", 0);
    const double tol = 1e-9;
    int p_star = std::min(n, m);

    bool capped = false, hit_time = false;
    std::vector<std::uint64_t> idx = shard_indices(task.samples, task, &capped);
    Accum acc = run_indexed(
        task, idx, clock,
        [&](std::uint64_t i, Rng& rng, Accum& a) {
            DenseState psi = random_haar_state(m, rng);
            std::vector<double> tab = expectation_table(psi);
            std::vector<std::uint64_t> v(p_star + 1);
            for (int p = 0; p <= p_star; ++p) v[p] = maxent_best(n, psi, p, tol, tab, nullptr);
            a.hist[v[p_star]] += 1;

            if (v[0] != pow2_checked(n)) {
                // The identity coset always survives, so p = 0 is pinned.
                a.falsified = true;
            }
            int worst = -1;
            for (int p = 0; p < p_star; ++p)
                if (v[p] > v[p_star] && (worst < 0 || v[p] > v[worst])) worst = p;
            if (worst >= 0) {
                a.falsified = true;
                PauliSubgroup H;
                maxent_best(n, psi, worst, tol, tab, &H);
                PauliSubgroup S = complete_to_maximal(H, n);
                EffectivePovmReport rep =
                    span_dimension(S, n, AncillaSpec::dense_state(psi), tol);
                std::string label = "entanglement p = " + std::to_string(worst) +
                                    " beats p = " + std::to_string(p_star) + " (" +
                                    std::to_string(v[worst]) + " > " +
                                    std::to_string(v[p_star]) + ")";
                a.witnesses.emplace_back(i, make_witness(std::move(label), S, nullptr, rep));
            }
        },
        &hit_time);

    std::vector<std::string> notes;
    std::uint64_t violations = 0;
    for (auto& [i, w] : acc.witnesses) {
        (void)i;
        (void)w;
        ++violations;
    }
    notes.push_back("violations: " + std::to_string(violations) + " in " +
                    std::to_string(acc.examined) + " samples");
    if (n == m) {
        std::uint64_t mixed = mixed_ancilla_span(bell_pairing(n), n);
        notes.push_back("maximally mixed ancilla control: s_mu = " + std::to_string(mixed));
        if (mixed != 1) acc.falsified = true;
    }
    bool complete = !capped && !hit_time;
    if (!complete) notes.push_back("budget reached before the sample count");
    return assemble(task, std::move(acc), clock, complete, std::move(notes));
}

namespace {

DopedCircuit random_doped_circuit(int n, int m, int t, bool parallel, Rng& rng) {
    DopedCircuit c;
    c.n_data = n;
    c.n_ancilla = m;
    int width = n + m;
    auto clifford_block = [&]() {
        std::vector<Gate> block = random_clifford(width, rng());
        c.gates.insert(c.gates.end(), block.begin(), block.end());
    };
    if (!parallel) {
        int wire = static_cast<int>(rng_below(rng, width));
        clifford_block();
        for (int k = 0; k < t; ++k) {
            c.gates.push_back(Gate::t(wire));
            clifford_block();
        }
    } else {
        clifford_block();
        int placed = 0;
        while (placed < t) {
            int layer = std::min(width, t - placed);
            for (int q = 0; q < layer; ++q) c.gates.push_back(Gate::t(q));
            placed += layer;
            clifford_block();
        }
    }
    return c;
}

}  // namespace

SearchReport random_doped_scan(const SearchTask& task) {
    validate_task_common(task);
    ScanClock clock;
    int n = task.n, m = task.m, t = task.t;
    if (m < 1) throw parse_error("random_doped_scan: m must be >= 1", 0);
    if (t < 0) throw parse_error("random_doped_scan: t must be >= 0", 0);
    if (n + m + t > kMaxEnumerationBits)
        throw size_limit_error("random_doped_scan: n + m + t exceeds the enumeration width");
    if (task.samples == 0) throw parse_error("random_doped_scan: samples must be > 0", 0);

    PauliSubgroup basis = z_basis(n + m);
    AncillaSpec anc = AncillaSpec::stabilizer(z_basis(m));
    std::uint64_t oracle_stride = std::max<std::uint64_t>(1, task.samples / 32);
    bool oracle_feasible = n + m <= 10;
    std::uint64_t ceiling_3t = t < 40 ? pow3_checked(t) : ~std::uint64_t(0);
    std::uint64_t full_span = pow2_checked(2 * n);

    bool capped = false, hit_time = false;
    std::vector<std::uint64_t> idx = shard_indices(task.samples, task, &capped);
    Accum acc = run_indexed(
        task, idx, clock,
        [&](std::uint64_t i, Rng& rng, Accum& a) {
            bool parallel = (i & 1) != 0;
            DopedCircuit c = random_doped_circuit(n, m, t, parallel, rng);
            EffectivePovmReport rep = analyze_doped(c, basis, anc);
            a.hist[rep.s_mu] += 1;
            if (parallel)
                a.max_parallel = std::max(a.max_parallel, rep.s_mu);
            else
                a.max_serial = std::max(a.max_serial, rep.s_mu);

            auto fail = [&](const std::string& why) {
                a.falsified = true;
                a.witnesses.emplace_back(i, make_witness(why, basis, &c, rep));
            };
            // Pinned gadget syndromes slice the outcome family, so the span can
            // mix Pauli directions and stop being a multiple of 2^{n-p}. That is
            // expected here; only the undoped full-outcome family forces it.
            if (!rep.k.has_value()) a.mixed_count += 1;
            if (rep.s_mu > rep.bounds.upper) fail("proven upper bound violated");
            if (rep.ic) {
                a.ic_count += 1;
                if (ceiling_3t < full_span) fail("IC despite 3^t < 4^n");
                if (t < 2 * n) fail("IC instance below t = 2n");
            }
            if (oracle_feasible && i % oracle_stride == 0) {
                std::uint64_t dense = dense_s_mu_for_doped(c, basis, anc);
                if (dense != rep.s_mu)
                    fail("dense oracle disagrees (" + std::to_string(dense) + ")");
                else
                    a.oracle_ok += 1;
            }
            a.offer_best(rep.s_mu, i,
                         make_witness("largest span at sample " + std::to_string(i), basis, &c,
                                      rep));
        },
        &hit_time);

    std::vector<std::string> notes;
    notes.push_back("serial layout max s_mu = " + std::to_string(acc.max_serial) +
                    ", parallel layout max s_mu = " + std::to_string(acc.max_parallel));
    notes.push_back("IC instances: " + std::to_string(acc.ic_count));
    notes.push_back("instances with a non-multiple span: " + std::to_string(acc.mixed_count));
    notes.push_back("dense oracle agreed on " + std::to_string(acc.oracle_ok) +
                    " subsampled instances");
    bool complete = !capped && !hit_time;
    if (!complete) notes.push_back("budget reached before the sample count");
    return assemble(task, std::move(acc), clock, complete, std::move(notes));
}

SearchReport bound_saturation_scan(const SearchTask& task) {
    validate_task_common(task);
    ScanClock clock;
    int n = task.n, t = task.t;
    if (t < 1) throw parse_error("bound_saturation: t must be >= 1", 0);
    int width = n + t;
    if (width > kMaxEnumerationBits)
        throw size_limit_error("bound_saturation: n + t exceeds the enumeration width");

    std::uint64_t target = t <= n ? bound_t_le_n(n, t) : bound_t_gt_n(n, t);
    AncillaSpec anc = AncillaSpec::magic_t_power(t);

    Accum acc;
    std::vector<std::string> notes;
    bool complete = true;

    auto process = [&](const PauliSubgroup& S, std::uint64_t i, Accum& a) {
        EffectivePovmReport rep = span_dimension(S, n, anc);
        a.hist[rep.s_mu] += 1;
        if (rep.s_mu > rep.bounds.upper) {
            a.falsified = true;
            a.witnesses.emplace_back(i, make_witness("proven upper bound violated", S, nullptr, rep));
        }
        a.offer_best(rep.s_mu, i, make_witness("largest span", S, nullptr, rep));
    };

    if (task.samples == 0) {
        if (width > 5) throw size_limit_error("bound_saturation: exhaustive mode needs n + t <= 5");
        if (task.threads > 1)
            notes.push_back("exhaustive stream runs single-threaded; use shards to parallelize");
        std::uint64_t index = 0, local = 0;
        for_each_abelian_subgroup(width, width, task.symmetry_reduce, [&](const PauliSubgroup& S) {
            std::uint64_t i = index++;
            if (task.shard.count > 1 &&
                i % static_cast<std::uint64_t>(task.shard.count) !=
                    static_cast<std::uint64_t>(task.shard.index))
                return true;
            if (local >= task.budget.max_candidates || clock.seconds() > task.budget.max_seconds) {
                complete = false;
                return false;
            }
            ++local;
            process(S, i, acc);
            acc.examined += 1;
            return true;
        });
    } else {
        bool capped = false, hit_time = false;
        std::vector<std::uint64_t> idx = shard_indices(task.samples, task, &capped);
        acc = run_indexed(
            task, idx, clock,
            [&](std::uint64_t i, Rng& rng, Accum& a) {
                process(random_abelian_subgroup(width, width, rng), i, a);
            },
            &hit_time);
        complete = !capped && !hit_time;
    }

    std::uint64_t best = acc.has_best ? acc.best_val : 0;
    bool saturated = best == target;
    notes.push_back("max observed s_mu = " + std::to_string(best) + ", target = " +
                    std::to_string(target) + (t <= n ? " (proven ceiling)" : " (best known)") +
                    (saturated ? ", saturated" : ", not saturated"));
    if (task.samples == 0 && complete && t <= n && !saturated) {
        // The ceiling is attainable, so a complete exhaustive scan that misses
        // it has found a real discrepancy.
        acc.falsified = true;
    }
    if (!complete) notes.push_back("budget reached before the stream ended");
    return assemble(task, std::move(acc), clock, complete, std::move(notes));
}

SearchReport run_task(const SearchTask& task) {
    switch (task.kind) {
        case TaskKind::conjecture_2n: return conjecture_2n_scan(task);
        case TaskKind::conjecture_maxent: return conjecture_maxent_scan(task);
        case TaskKind::random_doped_scan: return random_doped_scan(task);
        case TaskKind::bound_saturation: return bound_saturation_scan(task);
    }
    throw structure_error("unknown task kind");
}

UniversalWitness ic_witness_2n(int n) {
    if (n < 1 || 4 * n > kMaxEnumerationBits)
        throw size_limit_error("ic_witness_2n supported for 1 <= n <= 5");
    UniversalWitness w;
    w.group = paired_gadget_group(n, 2 * n);
    w.group_ic =
        ic_condition_check(w.group, centralizer_within(full_pauli_group(2 * n), w.group));
    w.circuit = universal_2n_circuit(n);
    EffectivePovmReport rep =
        analyze_doped(w.circuit, z_basis(2 * n), AncillaSpec::stabilizer(z_basis(n)));
    w.circuit_ic = rep.ic;
    return w;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

const char* kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::conjecture_2n: return "conjecture_2n";
        case TaskKind::conjecture_maxent: return "conjecture_maxent";
        case TaskKind::random_doped_scan: return "random_doped_scan";
        case TaskKind::bound_saturation: return "bound_saturation";
    }
    return "unknown";
}

TaskKind kind_from(const std::string& s) {
    if (s == "conjecture_2n") return TaskKind::conjecture_2n;
    if (s == "conjecture_maxent") return TaskKind::conjecture_maxent;
    if (s == "random_doped_scan") return TaskKind::random_doped_scan;
    if (s == "bound_saturation") return TaskKind::bound_saturation;
    throw parse_error("unknown task kind: " + s, 0);
}

const char* verdict_name(SearchVerdict v) {
    switch (v) {
        case SearchVerdict::consistent: return "consistent";
        case SearchVerdict::falsified: return "falsified";
        case SearchVerdict::incomplete: return "incomplete";
    }
    return "unknown";
}

json task_json(const SearchTask& t) {
    json j;
    j["version"] = 1;
    j["kind"] = kind_name(t.kind);
    j["n"] = t.n;
    j["m"] = t.m;
    j["t"] = t.t;
    j["samples"] = t.samples;
    j["seed"] = t.seed;
    j["shard"] = {{"index", t.shard.index}, {"count", t.shard.count}};
    j["threads"] = t.threads;
    j["symmetry_reduce"] = t.symmetry_reduce;
    j["budget"] = {{"max_candidates", t.budget.max_candidates},
                   {"max_seconds", t.budget.max_seconds}};
    return j;
}

}  // namespace

SearchTask task_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("task JSON: ") + e.what(), 0);
    }
    if (!j.is_object()) throw parse_error("task JSON: expected an object", 0);
    try {
        SearchTask t;
        if (j.contains("version") && j["version"].get<int>() != 1)
            throw parse_error("task JSON: unsupported version", 0);
        t.kind = kind_from(j.at("kind").get<std::string>());
        t.n = j.at("n").get<int>();
        t.m = j.value("m", 0);
        t.t = j.value("t", 0);
        t.samples = j.value("samples", std::uint64_t(0));
        t.seed = j.value("seed", std::uint64_t(1));
        if (j.contains("shard")) {
            t.shard.index = j["shard"].value("index", 0);
            t.shard.count = j["shard"].value("count", 1);
        }
        t.threads = j.value("threads", 1);
        t.symmetry_reduce = j.value("symmetry_reduce", false);
        if (!j.contains("budget"))
            throw parse_error("task JSON: budget.max_candidates and budget.max_seconds are mandatory", 0);
        t.budget.max_candidates = j["budget"].value("max_candidates", std::uint64_t(0));
        t.budget.max_seconds = j["budget"].value("max_seconds", 0.0);
        validate_task_common(t);
        return t;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("task JSON: ") + e.what(), 0);
    }
}

std::string task_to_json(const SearchTask& task) { return task_json(task).dump(2); }

std::string search_report_to_json(const SearchReport& r) {
    json j;
    j["version"] = 1;
    j["task"] = task_json(r.task);
    j["examined"] = r.examined;
    j["histogram"] = json::array();
    for (const HistogramBin& b : r.histogram)
        j["histogram"].push_back({{"s_mu", b.s_mu}, {"count", b.count}});
    j["witnesses"] = json::array();
    for (const SearchWitness& w : r.witnesses) {
        json jw;
        jw["label"] = w.label;
        jw["group"] = w.group_text;
        jw["circuit"] = w.circuit_text;
        jw["report"] = json::parse(report_to_json(w.report));
        j["witnesses"].push_back(std::move(jw));
    }
    j["verdict"] = verdict_name(r.verdict);
    j["complete"] = r.complete;
    j["notes"] = r.notes;
    return j.dump(2);
}

std::string search_histogram_csv(const SearchReport& r) {
    std::ostringstream out;
    out << "s_mu,count\n";
    for (const HistogramBin& b : r.histogram) out << b.s_mu << "," << b.count << "\n";
    return out.str();
}

int verdict_exit_code(const SearchReport& r) {
    switch (r.verdict) {
        case SearchVerdict::consistent: return 0;
        case SearchVerdict::falsified: return 2;
        case SearchVerdict::incomplete: return 3;
    }
    return 3;
}

}  // namespace qspan
