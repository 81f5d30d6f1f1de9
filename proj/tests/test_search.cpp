#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qspan/search.hpp"

using namespace qspan;

namespace {

SearchTask base_task(TaskKind kind) {
    SearchTask t;
    t.kind = kind;
    t.budget.max_candidates = 1000000;
    t.budget.max_seconds = 120.0;
    return t;
}

// Orbit closure under the symmetries the reduced stream quotients by: qubit
// permutations and per-qubit X<->Y swaps. Reimplemented here from the
// definition rather than calling into the enumeration code.
std::set<std::string> orbit_closure(const std::vector<PauliSubgroup>& reps, int t) {
    std::vector<int> perm(t);
    for (int i = 0; i < t; ++i) perm[i] = i;
    std::set<std::string> seen;
    do {
        for (std::uint64_t mask = 0; mask < (1ull << t); ++mask) {
            for (const auto& rep : reps) {
                std::vector<PauliString> gens;
                for (const auto& g : rep.gens) {
                    std::uint64_t x = 0, z = 0;
                    for (int q = 0; q < t; ++q) {
                        std::uint64_t xb = (g.x >> q) & 1, zb = (g.z >> q) & 1;
                        if ((mask >> q) & 1) zb ^= xb;  // X <-> Y on this qubit
                        x |= xb << perm[q];
                        z |= zb << perm[q];
                    }
                    gens.push_back(lift(ProjectivePauli(t, x, z)));
                }
                seen.insert(save_group(canonicalize(gens, t, false)));
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return seen;
}

}  // namespace

TEST_CASE("subgroup counts match the closed form") {
    CHECK(count_abelian_subgroups(1, 1) == 3);
    CHECK(count_abelian_subgroups(2, 1) == 15);
    CHECK(count_abelian_subgroups(2, 2) == 15);
    CHECK(count_abelian_subgroups(3, 1) == 63);
    CHECK(count_abelian_subgroups(3, 2) == 315);
    CHECK(count_abelian_subgroups(3, 3) == 135);
    CHECK(count_abelian_subgroups(5, 2) == 86955);
    CHECK(count_abelian_subgroups(2, 0) == 1);
}

TEST_CASE("enumeration emits each subgroup exactly once") {
    for (int t = 1; t <= 3; ++t)
        for (int ell = 1; ell <= t; ++ell) {
            auto subs = enumerate_abelian_subgroups(t, ell);
            CHECK(subs.size() == count_abelian_subgroups(t, ell));
            std::set<std::string> keys;
            for (const auto& s : subs) {
                CHECK(s.dim() == ell);
                CHECK(s.abelian);
                CHECK_FALSE(s.with_signs);
                keys.insert(save_group(s));
            }
            CHECK(keys.size() == subs.size());  // no duplicates
        }
}

TEST_CASE("enumeration agrees with a brute force over generator pairs") {
    // collect canonical forms of <g> for every non-identity g, and <g,h> for
    // every commuting independent pair, then compare against the stream
    std::set<std::string> dim1, dim2;
    int t = 2;
    for (std::uint64_t xz = 1; xz < 16; ++xz) {
        PauliString g = lift(ProjectivePauli(t, xz & 3, xz >> 2));
        dim1.insert(save_group(canonicalize({g}, t, false)));
        for (std::uint64_t xz2 = 1; xz2 < 16; ++xz2) {
            PauliString h = lift(ProjectivePauli(t, xz2 & 3, xz2 >> 2));
            if (!commutes(g, h)) continue;
            PauliSubgroup gh = canonicalize({g, h}, t, false);
            if (gh.dim() == 2) dim2.insert(save_group(gh));
        }
    }
    auto stream1 = enumerate_abelian_subgroups(t, 1);
    auto stream2 = enumerate_abelian_subgroups(t, 2);
    CHECK(stream1.size() == dim1.size());
    CHECK(stream2.size() == dim2.size());
    for (const auto& s : stream1) CHECK(dim1.count(save_group(s)) == 1);
    for (const auto& s : stream2) CHECK(dim2.count(save_group(s)) == 1);
}

TEST_CASE("visitor can stop the stream early") {
    int visited = 0;
    for_each_abelian_subgroup(3, 1, false, [&](const PauliSubgroup&) {
        return ++visited < 10;
    });
    CHECK(visited == 10);
}

TEST_CASE("symmetry reduced stream covers every orbit") {
    auto reduced = enumerate_abelian_subgroups(3, 1, true);
    auto full = enumerate_abelian_subgroups(3, 1, false);
    CHECK(reduced.size() < full.size());
    std::set<std::string> closure = orbit_closure(reduced, 3);
    CHECK(closure.size() == full.size());
    for (const auto& s : full) CHECK(closure.count(save_group(s)) == 1);
}

TEST_CASE("random subgroup draws are seeded and well formed") {
    Rng a(9), b(9), c(10);
    for (int trial = 0; trial < 20; ++trial) {
        PauliSubgroup s1 = random_abelian_subgroup(4, 2, a);
        PauliSubgroup s2 = random_abelian_subgroup(4, 2, b);
        CHECK(s1 == s2);
        CHECK(s1.dim() == 2);
        CHECK(s1.abelian);
    }
    CHECK_FALSE(random_abelian_subgroup(4, 2, c) == random_abelian_subgroup(4, 2, c));
}

TEST_CASE("completing to a maximal group preserves the ancilla subgroup") {
    Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        int t = 2 + int(rng() % 3);
        int ell = int(rng() % (t + 1));
        PauliSubgroup h = random_abelian_subgroup(t, ell, rng);
        int pairs = t - h.dim();
        int n = pairs + int(rng() % 2);  // at least the required width
        PauliSubgroup s = complete_to_maximal(h, n);
        CHECK(s.dim() == n + t);
        CHECK(s.abelian);
        EntanglementDecomposition ed = entanglement_decomposition(s, n);
        CHECK(ed.p == pairs);
        // the ancilla-local subgroup is exactly H (projectively)
        CHECK(ed.S_B.dim() == h.dim());
        for (const auto& g : h.gens) CHECK(contains(ed.S_B, ProjectivePauli(g)).member);
    }
}

TEST_CASE("bell pairing basis and the mixed ancilla collapse") {
    PauliSubgroup bell = bell_pairing(2);
    CHECK(bell.n_qubits == 4);
    CHECK(bell.dim() == 4);
    EntanglementDecomposition ed = entanglement_decomposition(bell, 2);
    CHECK(ed.p == 2);
    CHECK(mixed_ancilla_span(bell, 2) == 1);
    CHECK(mixed_ancilla_span(bell_pairing(1), 1) == 1);
    // a product basis keeps the full local span instead
    std::vector<PauliString> gens;
    for (int q = 0; q < 4; ++q) gens.emplace_back(4, 0, std::uint64_t(1) << q, 0);
    CHECK(mixed_ancilla_span(canonicalize(gens, 4, true), 2) == 4);
}

TEST_CASE("maxent value for stabilizer ancillas is the stabilizer span") {
    DenseState zero = zero_state(2);
    CHECK(maxent_value(2, zero, 0) == 4);
    CHECK(maxent_value(2, zero, 1) == 4);
    CHECK(maxent_value(2, zero, 2) == 4);
    DenseState t2 = t_power_state(2);
    CHECK(maxent_value(2, t2, 2) == 9);  // saturates 2^{n-t} 3^t at p = t = n = 2
    CHECK(maxent_value(1, t_power_state(1), 1) == 3);
}

TEST_CASE("witness construction at the doping threshold") {
    for (int n = 1; n <= 2; ++n) {
        UniversalWitness w = ic_witness_2n(n);
        CHECK(w.group_ic);
        CHECK(w.circuit_ic);
        CHECK(w.group.n_qubits == 2 * n);
        CHECK(w.group.dim() == n);
        CHECK(w.circuit.t_count() == 2 * n);
    }
}

TEST_CASE("exhaustive 2n conjecture scan at tiny sizes") {
    // n <= t < 2n streams the dimension t-n subgroups only
    SearchTask task = base_task(TaskKind::conjecture_2n);
    task.n = 1;
    task.t = 1;
    SearchReport rep = run_task(task);
    CHECK(rep.examined == count_abelian_subgroups(1, 0));
    CHECK(rep.verdict == SearchVerdict::consistent);
    CHECK(rep.complete);
    CHECK(verdict_exit_code(rep) == 0);

    task.n = 2;
    task.t = 3;
    SearchReport wider = run_task(task);
    CHECK(wider.examined == count_abelian_subgroups(3, 1));
    CHECK(wider.verdict == SearchVerdict::consistent);

    task.n = 1;
    task.t = 0;
    SearchReport trivial = run_task(task);
    CHECK(trivial.examined == 0);
    CHECK(trivial.verdict == SearchVerdict::consistent);

    // at the threshold the constructive witness settles existence immediately
    task.t = 2;
    SearchReport settled = run_task(task);
    CHECK(settled.examined == 1);
    CHECK(settled.verdict == SearchVerdict::consistent);
    REQUIRE(!settled.witnesses.empty());
    CHECK(settled.witnesses.front().report.ic);
}

TEST_CASE("maxent scan on a single qubit pair") {
    SearchTask task = base_task(TaskKind::conjecture_maxent);
    task.n = 1;
    task.m = 1;
    task.samples = 40;
    task.seed = 5;
    SearchReport rep = run_task(task);
    CHECK(rep.examined >= 40);
    CHECK(rep.verdict == SearchVerdict::consistent);
    CHECK(rep.complete);
}

TEST_CASE("random doped scan checks witnesses against the oracle") {
    SearchTask task = base_task(TaskKind::random_doped_scan);
    task.n = 1;
    task.m = 1;
    task.t = 2;
    task.samples = 30;
    task.seed = 3;
    SearchReport rep = run_task(task);
    CHECK(rep.examined == 30);
    CHECK(rep.verdict == SearchVerdict::consistent);
    std::uint64_t total = 0;
    for (const auto& bin : rep.histogram) total += bin.count;
    CHECK(total == 30);
    bool oracle_note = false;
    for (const auto& note : rep.notes)
        if (note.find("oracle") != std::string::npos) oracle_note = true;
    CHECK(oracle_note);
}

TEST_CASE("bound saturation scan finds the single qubit ceiling") {
    SearchTask task = base_task(TaskKind::bound_saturation);
    task.n = 1;
    task.t = 1;
    SearchReport rep = run_task(task);
    CHECK(rep.examined == 15);  // maximal abelian groups on two qubits
    REQUIRE(!rep.histogram.empty());
    CHECK(rep.histogram.back().s_mu == 3);
    CHECK(rep.verdict == SearchVerdict::consistent);
    REQUIRE(!rep.witnesses.empty());
    CHECK(rep.witnesses.front().report.s_mu == 3);
}

TEST_CASE("shard union reproduces the unsharded histogram") {
    auto histogram_of = [](const SearchReport& r) {
        std::map<std::uint64_t, std::uint64_t> h;
        for (const auto& bin : r.histogram) h[bin.s_mu] += bin.count;
        return h;
    };
    SearchTask task = base_task(TaskKind::bound_saturation);
    task.n = 1;
    task.t = 2;
    SearchReport whole = run_task(task);
    std::map<std::uint64_t, std::uint64_t> merged;
    std::uint64_t examined = 0;
    for (int i = 0; i < 3; ++i) {
        SearchTask piece = task;
        piece.shard.index = i;
        piece.shard.count = 3;
        SearchReport rep = run_task(piece);
        examined += rep.examined;
        for (const auto& [k, v] : histogram_of(rep)) merged[k] += v;
    }
    CHECK(examined == whole.examined);
    CHECK(merged == histogram_of(whole));
}

TEST_CASE("thread count does not change the outcome") {
    SearchTask task = base_task(TaskKind::bound_saturation);
    task.n = 1;
    task.t = 2;
    SearchReport one = run_task(task);
    task.threads = 4;
    SearchReport four = run_task(task);
    // the summary echoes the thread count, so compare semantics not bytes
    CHECK(one.examined == four.examined);
    REQUIRE(one.histogram.size() == four.histogram.size());
    for (std::size_t i = 0; i < one.histogram.size(); ++i) {
        CHECK(one.histogram[i].s_mu == four.histogram[i].s_mu);
        CHECK(one.histogram[i].count == four.histogram[i].count);
    }
    CHECK(one.verdict == four.verdict);
}

TEST_CASE("identical tasks produce byte identical summaries") {
    SearchTask task = base_task(TaskKind::conjecture_2n);
    task.n = 1;
    task.t = 2;
    task.samples = 25;
    task.seed = 12;
    SearchReport a = run_task(task);
    SearchReport b = run_task(task);
    CHECK(search_report_to_json(a) == search_report_to_json(b));
}

TEST_CASE("budget caps flip the report to incomplete") {
    SearchTask task = base_task(TaskKind::bound_saturation);
    task.n = 2;
    task.t = 1;
    task.budget.max_candidates = 10;
    SearchReport rep = run_task(task);
    CHECK_FALSE(rep.complete);
    CHECK(rep.verdict == SearchVerdict::incomplete);
    CHECK(verdict_exit_code(rep) == 3);
    CHECK(rep.examined == 10);
}

TEST_CASE("task json round trip and validation") {
    std::string text = R"({
        "version": 1,
        "kind": "bound_saturation",
        "n": 2, "t": 1, "samples": 0, "seed": 7,
        "shard": {"index": 1, "count": 4},
        "threads": 2,
        "budget": {"max_candidates": 500, "max_seconds": 30.0}
    })";
    SearchTask task = task_from_json(text);
    CHECK(task.kind == TaskKind::bound_saturation);
    CHECK(task.n == 2);
    CHECK(task.shard.index == 1);
    CHECK(task.shard.count == 4);
    CHECK(task.budget.max_candidates == 500);
    SearchTask back = task_from_json(task_to_json(task));
    CHECK(task_to_json(back) == task_to_json(task));

    CHECK_THROWS_AS(task_from_json("{\"version\": 1, \"kind\": \"bound_saturation\"}"),
                    parse_error);  // budget is mandatory
    CHECK_THROWS_AS(task_from_json("{\"version\": 2, \"kind\": \"bound_saturation\","
                                   "\"budget\": {\"max_candidates\": 1, \"max_seconds\": 1}}"),
                    parse_error);  // unknown version
    CHECK_THROWS_AS(task_from_json("{\"version\": 1, \"kind\": \"nope\","
                                   "\"budget\": {\"max_candidates\": 1, \"max_seconds\": 1}}"),
                    parse_error);  // unknown kind
    CHECK_THROWS_AS(task_from_json("not json"), parse_error);
}

TEST_CASE("histogram csv layout") {
    SearchTask task = base_task(TaskKind::bound_saturation);
    task.n = 1;
    task.t = 1;
    SearchReport rep = run_task(task);
    std::string csv = search_histogram_csv(rep);
    CHECK(csv.find("s_mu,count") != std::string::npos);
    CHECK(csv.find("3,") != std::string::npos);
}
