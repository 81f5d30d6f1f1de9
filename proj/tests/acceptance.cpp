// Acceptance gate: every shipped guarantee is rechecked here from scratch.
// Each criterion prints exactly one PASS/FAIL line; the process exit code is
// the number of failed criteria, so 0 means the full gate is green.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qspan/circuit.hpp"
#include "qspan/dense.hpp"
#include "qspan/examples.hpp"
#include "qspan/group.hpp"
#include "qspan/povm.hpp"
#include "qspan/search.hpp"

using namespace qspan;

namespace {

// A criterion body returns an empty string on success, a failure detail line
// otherwise. Exceptions count as failures with the message as detail.
struct Criterion {
    int id;
    std::string label;
    std::function<std::string()> run;
};

PauliSubgroup computational(int n) {
    std::vector<PauliString> gens;
    for (int q = 0; q < n; ++q) gens.emplace_back(n, 0, std::uint64_t(1) << q, 0);
    return canonicalize(gens, n, true);
}

// Random signed maximal group: the computational basis pulled back through a
// seeded Clifford circuit.
PauliSubgroup random_basis(int width, std::uint64_t seed) {
    if (width == 0) return PauliSubgroup::trivial(0, true);
    auto gates = random_clifford(width, seed);
    std::vector<PauliString> gens;
    for (int q = 0; q < width; ++q)
        gens.push_back(evolve_string(gates, PauliString(width, 0, std::uint64_t(1) << q, 0),
                                     EvolveDirection::adjoint));
    return canonicalize(gens, width, true);
}

std::string run_named_examples(const std::vector<std::string>& names) {
    std::ostringstream bad;
    for (const std::string& name : names) {
        auto outcomes = run_examples(name);
        bool found = false, ok = false;
        for (const auto& o : outcomes)
            if (o.name == name) {
                found = true;
                ok = o.pass;
                if (!ok)
                    bad << name << " expected [" << o.expected << "] observed [" << o.observed
                        << "]; ";
            }
        if (!found) bad << name << " missing from the catalog; ";
        else if (!ok && bad.str().empty()) bad << name << " failed; ";
    }
    return bad.str();
}

SearchTask make_task(TaskKind kind, int n, int t) {
    SearchTask task;
    task.kind = kind;
    task.n = n;
    task.t = t;
    task.budget.max_candidates = 10000000;
    task.budget.max_seconds = 480.0;
    return task;
}

std::string criterion_golden_examples() {
    return run_named_examples({
        "ghz-plus-ancilla-form", "ghz-bell-ancilla-form", "five-qubit-ghz-ancilla-form",
        "ancilla-sweep-dense", "ancilla-sweep-magic", "ancilla-sweep-stabilizer",
        "ancilla-sweep-generic", "magic-span-eight", "magic-minimal-ic", "zfree-quotient-pass",
        "zfree-quotient-fail-span-three", "pinned-syndrome-form", "two-t-gadget-ic",
        "single-t-span-six",
    });
}

std::string criterion_zfree_counts() {
    std::string fixed = run_named_examples({
        "zfree-count-single-mixed", "zfree-count-single-zz", "zfree-count-trivial",
        "zfree-count-two-generators",
    });
    if (!fixed.empty()) return fixed;

    // 200 random abelian groups against a direct scan over all strings
    Rng rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        int t = 1 + int(rng() % 5);
        int ell = int(rng() % std::uint64_t(t + 1));
        PauliSubgroup h = random_abelian_subgroup(t, ell, rng);
        std::uint64_t brute = 0;
        for (std::uint64_t x = 0; x < (std::uint64_t(1) << t); ++x)
            for (std::uint64_t z = 0; z < (std::uint64_t(1) << t); ++z) {
                if (z & ~x) continue;  // string contains a Z letter
                PauliString g = lift(ProjectivePauli(t, x, z));
                bool central = true;
                for (const auto& gen : h.gens)
                    if (!commutes(g, gen)) { central = false; break; }
                if (central) ++brute;
            }
        std::uint64_t fast = zfree_centralizer_count(h);
        if (fast != brute) {
            std::ostringstream os;
            os << "count mismatch at trial " << trial << " (t=" << t << ", ell=" << ell
               << "): formula " << fast << ", scan " << brute;
            return os.str();
        }
    }
    return "";
}

std::string criterion_universal_frame_and_ic() {
    return run_named_examples({
        "universal-frame-diagonal", "universal-ic-one-qubit", "universal-ic-two-qubit",
        "universal-ic-three-qubit",
    });
}

std::string criterion_stabilizer_span() {
    Rng rng(411);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + int(rng() % 4);
        int m = int(rng() % 5);
        PauliSubgroup s = random_basis(n + m, rng());
        AncillaSpec anc = AncillaSpec::stabilizer(random_basis(m, rng()));
        EffectivePovmReport rep = span_dimension(s, n, anc);
        std::uint64_t want = std::uint64_t(1) << n;
        if (rep.s_mu != want) {
            std::ostringstream os;
            os << "trial " << trial << " (n=" << n << ", m=" << m << "): s_mu " << rep.s_mu
               << " instead of " << want;
            return os.str();
        }
        std::uint64_t dense = dense_s_mu_for_group(s, n, anc);
        if (dense != want) {
            std::ostringstream os;
            os << "trial " << trial << " (n=" << n << ", m=" << m << "): dense rank " << dense
               << " instead of " << want;
            return os.str();
        }
    }
    return "";
}

std::string criterion_oracle_equivalence() {
    // circuit fixtures shared with the golden suite
    DopedCircuit two_t;
    two_t.n_data = 1;
    two_t.n_ancilla = 1;
    two_t.gates = {Gate::cnot(0, 1), Gate::h(1), Gate::t(1), Gate::h(1),
                   Gate::cnot(1, 0), Gate::t(0), Gate::h(0)};

    std::ostringstream os;
    auto check_group = [&](const std::string& tag, const PauliSubgroup& s, int n,
                           const AncillaSpec& anc, Rng* generic_rng) {
        EffectivePovmReport rep = span_dimension(s, n, anc);
        std::uint64_t dense = dense_s_mu_for_group(s, n, anc, generic_rng);
        if (rep.s_mu != dense) {
            os << tag << ": group path " << rep.s_mu << ", dense " << dense << "; ";
            return false;
        }
        return true;
    };
    auto check_doped = [&](const std::string& tag, const DopedCircuit& c,
                           const PauliSubgroup& phys, const AncillaSpec& anc) {
        EffectivePovmReport rep = analyze_doped(c, phys, anc);
        std::uint64_t dense = dense_s_mu_for_doped(c, phys, anc);
        if (rep.s_mu != dense) {
            os << tag << ": doped path " << rep.s_mu << ", dense " << dense << "; ";
            return false;
        }
        return true;
    };

    PauliSubgroup sweep = load_group_text("XIII\nIIXI\nIXIX\nIYIY", true).group;
    Rng fixture_rng(5);
    DenseState bloch(1);
    {
        double c = std::sqrt((1.0 + 1.0 / std::sqrt(3.0)) / 2.0);
        double ssin = std::sqrt(1.0 - c * c);
        bloch.amp[0] = c;
        bloch.amp[1] = std::polar(ssin, std::acos(-1.0) / 4);
    }
    check_group("sweep/dense", sweep, 2,
                AncillaSpec::dense_state(tensor(basis_state(1, 0), bloch)), nullptr);
    check_group("sweep/magic", sweep, 2, AncillaSpec::magic_t_power(2), nullptr);
    check_group("sweep/stabilizer", sweep, 2, AncillaSpec::stabilizer(computational(2)), nullptr);
    check_group("sweep/generic", sweep, 2, AncillaSpec::generic(2), &fixture_rng);
    PauliSubgroup ghz = load_group_text("ZZI\nZIZ\nXXX", true).group;
    check_group("ghz/single-magic", ghz, 2, AncillaSpec::magic_t_power(1), nullptr);
    check_doped("two-t", two_t, computational(2), AncillaSpec::stabilizer(computational(1)));

    // 500 random mixed instances, all within the dense range
    Rng rng(511);
    int done = 0;
    for (int trial = 0; trial < 500; ++trial) {
        if (trial % 5 == 4) {
            // doped circuit instance: random Clifford skeleton with T gates spliced in
            int n = 1 + int(rng() % 2);
            int m = int(rng() % 3);
            int t = int(rng() % 4);
            DopedCircuit c;
            c.n_data = n;
            c.n_ancilla = m;
            c.gates = random_clifford(n + m, rng());
            for (int k = 0; k < t; ++k) {
                std::size_t pos = rng() % (c.gates.size() + 1);
                c.gates.insert(c.gates.begin() + long(pos), Gate::t(int(rng() % std::uint64_t(n + m))));
            }
            AncillaSpec anc = AncillaSpec::stabilizer(random_basis(m, rng()));
            if (!check_doped("random doped trial " + std::to_string(trial), c,
                             random_basis(n + m, rng()), anc))
                return os.str();
        } else {
            int n = 1 + int(rng() % 3);
            int m = int(rng() % 4);
            PauliSubgroup s = random_basis(n + m, rng());
            AncillaSpec anc;
            Rng* generic_rng = nullptr;
            Rng local(rng());
            switch (trial % 5) {
                case 0: anc = AncillaSpec::stabilizer(random_basis(m, rng())); break;
                case 1: anc = AncillaSpec::magic_t_power(m); break;
                case 2: anc = AncillaSpec::dense_state(random_haar_state(m, local)); break;
                default: anc = AncillaSpec::generic(m); generic_rng = &local; break;
            }
            if (!check_group("random group trial " + std::to_string(trial), s, n, anc,
                             generic_rng))
                return os.str();
        }
        ++done;
    }
    if (done != 500) os << "only " << done << " of 500 instances ran; ";
    return os.str();
}

std::string criterion_magic_ceiling() {
    struct Config { int n, t; std::uint64_t max_s, examined; };
    const Config configs[] = {{1, 1, 3, 15}, {2, 1, 6, 135}, {2, 2, 9, 2295}};
    std::ostringstream os;
    for (const Config& cfg : configs) {
        SearchTask task = make_task(TaskKind::bound_saturation, cfg.n, cfg.t);
        SearchReport rep = run_task(task);
        std::uint64_t best = rep.histogram.empty() ? 0 : rep.histogram.back().s_mu;
        if (!rep.complete || rep.verdict != SearchVerdict::consistent || best != cfg.max_s ||
            rep.examined != cfg.examined) {
            os << "(n=" << cfg.n << ", t=" << cfg.t << "): max " << best << " over "
               << rep.examined << " groups, verdict " << int(rep.verdict) << "; ";
        }
    }
    if (!os.str().empty()) return os.str();

    // necessity: no configuration with 3^t < 4^n may come back IC
    for (const Config& cfg : configs) {
        bool any_ic = false;
        for_each_abelian_subgroup(cfg.n + cfg.t, cfg.n + cfg.t, false,
                                  [&](const PauliSubgroup& s) {
                                      EffectivePovmReport rep =
                                          span_dimension(s, cfg.n, AncillaSpec::magic_t_power(cfg.t));
                                      if (rep.ic) any_ic = true;
                                      return !any_ic;
                                  });
        if (any_ic) {
            os << "IC instance below the necessity threshold at (n=" << cfg.n << ", t=" << cfg.t
               << "); ";
            return os.str();
        }
    }
    return "";
}

std::string criterion_doping_threshold() {
    std::ostringstream os;
    // exhaustive sweeps below the threshold: no IC candidate may exist
    const std::pair<int, int> sweeps[] = {{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {2, 3}};
    for (auto [n, t] : sweeps) {
        SearchReport rep = run_task(make_task(TaskKind::conjecture_2n, n, t));
        if (rep.verdict != SearchVerdict::consistent || !rep.complete) {
            os << "exhaustive (n=" << n << ", t=" << t << ") verdict " << int(rep.verdict)
               << ", complete " << rep.complete << "; ";
            return os.str();
        }
    }
    for (int n = 1; n <= 3; ++n) {
        UniversalWitness w = ic_witness_2n(n);
        if (!w.group_ic || !w.circuit_ic) {
            os << "threshold witness failed at n=" << n << " (group " << w.group_ic << ", circuit "
               << w.circuit_ic << "); ";
            return os.str();
        }
    }
    // statistical reproduction one step below the threshold at n=4; this is a
    // sampled scan, not an exhaustive one, and is flagged as such in the line
    SearchTask big = make_task(TaskKind::conjecture_2n, 4, 7);
    big.samples = 100000;
    big.seed = 424242;
    big.threads = 4;
    SearchReport rep = run_task(big);
    if (rep.verdict != SearchVerdict::consistent || !rep.complete || rep.examined != 100000) {
        os << "sampled n=4 scan: verdict " << int(rep.verdict) << ", complete " << rep.complete
           << ", examined " << rep.examined << "; ";
    }
    return os.str();
}

std::string criterion_entangled_advantage() {
    SearchTask task = make_task(TaskKind::conjecture_maxent, 2, 0);
    task.m = 2;
    task.samples = 500;
    task.seed = 20240601;
    task.threads = 4;
    SearchReport rep = run_task(task);
    std::ostringstream os;
    if (rep.verdict != SearchVerdict::consistent || !rep.complete || rep.examined < 500)
        os << "scan verdict " << int(rep.verdict) << ", complete " << rep.complete << ", examined "
           << rep.examined << "; ";
    std::uint64_t mixed = mixed_ancilla_span(bell_pairing(2), 2);
    if (mixed != 1) os << "mixed ancilla control: span " << mixed << " instead of 1; ";
    return os.str();
}

std::string criterion_structural_invariants() {
    std::ostringstream os;
    Rng rng(9001);

    // span factorization and coset accounting for undoped measurements
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + int(rng() % 3);
        int m = int(rng() % 4);
        PauliSubgroup s = random_basis(n + m, rng());
        AncillaSpec anc;
        Rng local(rng());
        Rng* generic_rng = nullptr;
        switch (trial % 4) {
            case 0: anc = AncillaSpec::stabilizer(random_basis(m, rng())); break;
            case 1: anc = AncillaSpec::magic_t_power(m); break;
            case 2: anc = AncillaSpec::dense_state(random_haar_state(m, local)); break;
            default: anc = AncillaSpec::generic(m); generic_rng = &local; break;
        }
        (void)generic_rng;
        EffectivePovmReport rep = span_dimension(s, n, anc);
        if (!rep.k.has_value() ||
            rep.s_mu != *rep.k * (std::uint64_t(1) << (n - rep.p))) {
            os << "span not an integer multiple of 2^(n-p) at undoped trial " << trial << "; ";
            return os.str();
        }
        if (rep.surviving_cosets + rep.killed_cosets !=
            (std::uint64_t(1) << (2 * rep.p))) {
            os << "coset accounting off at trial " << trial << "; ";
            return os.str();
        }
    }

    // bipartite generator decomposition identities
    for (int trial = 0; trial < 80; ++trial) {
        int n_a = 1 + int(rng() % 3);
        int n_b = 1 + int(rng() % 3);
        PauliSubgroup s = random_basis(n_a + n_b, rng());
        EntanglementDecomposition ed = entanglement_decomposition(s, n_a);
        if (2 * ed.p != n_a + n_b - ed.S_A.dim() - ed.S_B.dim()) {
            os << "dimension identity failed at trial " << trial << "; ";
            return os.str();
        }
        for (const auto& pair : ed.nonlocal_pairs)
            if (commutes(lift(pair.g_a), lift(pair.g_bar_a)) ||
                commutes(lift(pair.g_b), lift(pair.g_bar_b)) || !commutes(pair.g, pair.g_bar)) {
                os << "nonlocal pair pattern failed at trial " << trial << "; ";
                return os.str();
            }
    }

    // aligned generating sets: anticommutation exactly on the diagonal
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + int(rng() % 2);
        int m = 1 + int(rng() % 2);
        PauliSubgroup s = random_basis(n + m, rng());
        PauliSubgroup z = embed(random_basis(m, rng()), n, n + m);
        AlignedGenerators ag = align_generators(s, z);
        for (std::size_t j = 0; j < ag.g_tilde_list.size(); ++j)
            for (std::size_t k = 0; k < ag.h_tilde_list.size(); ++k)
                if (commutes(ag.g_tilde_list[j], ag.h_tilde_list[k]) != (j != k)) {
                    os << "alignment pattern failed at trial " << trial << "; ";
                    return os.str();
                }
    }

    // transform round trip and POVM completeness/positivity on doped circuits
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + int(rng() % 2);
        int m = int(rng() % 2);
        DopedCircuit c;
        c.n_data = n;
        c.n_ancilla = m;
        c.gates = random_clifford(n + m, rng());
        int t = int(rng() % 3);
        for (int k = 0; k < t; ++k)
            c.gates.push_back(Gate::t(int(rng() % std::uint64_t(n + m))));
        DenseState psi = m ? stabilizer_state(random_basis(m, rng()), 0) : basis_state(0, 0);
        auto ops = effective_povm(c.gates, n, m, psi);

        if (completeness_error(ops) > 1e-9) {
            os << "completeness failed at trial " << trial << "; ";
            return os.str();
        }
        Rng probe_rng(trial + 1);
        for (const auto& op : ops) {
            DenseState v = random_haar_state(n, probe_rng);
            cplx val = 0;
            for (std::size_t r = 0; r < op.dim(); ++r)
                for (std::size_t col = 0; col < op.dim(); ++col)
                    val += std::conj(v.amp[r]) * op.at(r, col) * v.amp[col];
            if (val.real() < -1e-9 || std::abs(val.imag()) > 1e-9) {
                os << "positivity probe failed at trial " << trial << "; ";
                return os.str();
            }
        }

        auto hat = group_fourier(ops, FourierDirection::forward);
        auto back = group_fourier(hat, FourierDirection::inverse);
        double worst = 0;
        for (std::size_t i = 0; i < ops.size(); ++i)
            for (std::size_t j = 0; j < ops[i].m.size(); ++j)
                worst = std::max(worst, std::abs(ops[i].m[j] - back[i].m[j]));
        if (worst > 1e-9) {
            os << "transform round trip drifted (" << worst << ") at trial " << trial << "; ";
            return os.str();
        }
    }
    return "";
}

}  // namespace

int main() {
    std::vector<Criterion> gate = {
        {1, "golden example suite", criterion_golden_examples},
        {2, "ancilla-register counting formula", criterion_zfree_counts},
        {3, "universal frame and complete span", criterion_universal_frame_and_ic},
        {4, "stabilizer protocols span 2^n", criterion_stabilizer_span},
        {5, "group and dense paths agree", criterion_oracle_equivalence},
        {6, "magic ceiling saturation and necessity", criterion_magic_ceiling},
        {7, "doping threshold scans (n=4 pass is sampled, not exhaustive)",
         criterion_doping_threshold},
        {8, "entangled ancilla advantage", criterion_entangled_advantage},
        {9, "structural invariant properties", criterion_structural_invariants},
    };

    int failures = 0;
    for (const Criterion& c : gate) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("criterion %d: PASS  %s\n", c.id, c.label.c_str());
        } else {
            ++failures;
            std::printf("criterion %d: FAIL  %s  [%s]\n", c.id, c.label.c_str(), detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("acceptance gate: all %d criteria passed\n", int(gate.size()));
    else
        std::printf("acceptance gate: %d of %d criteria failed\n", failures, int(gate.size()));
    return failures;
}
