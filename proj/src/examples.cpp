#include "qspan/examples.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>

#include "qspan/circuit.hpp"
#include "qspan/dense.hpp"
#include "qspan/group.hpp"
#include "qspan/pauli.hpp"
#include "qspan/povm.hpp"
#include "qspan/search.hpp"

namespace qspan {

namespace {

PauliSubgroup sg(const std::string& text) { return load_group_text(text, true).group; }
PauliSubgroup ug(const std::string& text) { return load_group_text(text, false).group; }

ExampleOutcome verdict(std::string name, std::string expected, std::string observed) {
    ExampleOutcome out;
    out.name = std::move(name);
    out.expected = std::move(expected);
    out.observed = std::move(observed);
    out.pass = out.expected == out.observed;
    return out;
}

std::string form_brief(const StabilizerPovmForm& f) {
    std::ostringstream os;
    os << "ell=" << f.ell << " nonzero=" << f.nonzero_outcomes << " mult=" << f.multiplicity
       << " scale=" << f.scale << " gens=";
    for (std::size_t i = 0; i < f.effective_generators.size(); ++i) {
        if (i) os << ',';
        os << (f.sign_vector[i] < 0 ? '-' : '+') << format_pauli(f.effective_generators[i]);
    }
    std::uint64_t vanishing = 0;
    for (const auto& label : f.outcome_relabel)
        if (label.vanishing != 0) ++vanishing;
    os << " vanishing=" << vanishing;
    return os.str();
}

std::string span_brief(const EffectivePovmReport& r) {
    std::ostringstream os;
    os << "s_mu=" << r.s_mu << " p=" << r.p;
    return os.str();
}

std::string doped_brief(const EffectivePovmReport& r) {
    std::ostringstream os;
    os << "s_mu=" << r.s_mu << " ic=" << (r.ic ? 1 : 0) << " p=" << r.p;
    if (r.k) os << " k=" << *r.k;
    if (r.free_generators) os << " free=" << *r.free_generators;
    os << " pinned=";
    for (std::size_t i = 0; i < r.pinned_generators.size(); ++i) {
        if (i) os << ',';
        os << (r.pinned_generators[i].sign < 0 ? '-' : '+') << r.pinned_generators[i].generator;
    }
    return os.str();
}

// The three-qubit repetition-plus-X group used by several cases below.
PauliSubgroup ghz3() { return sg("ZZI\nZIZ\nXXX"); }

// Five-qubit maximal group whose 2+3 split has one nonlocal pair.
PauliSubgroup five_qubit_basis() { return sg("ZXZZY\nXIIIZ\nXIIZZ\nZXYZX\nZIYZX"); }

// 2+2 split with one nonlocal pair; the span depends on the ancilla kind.
PauliSubgroup sweep_basis() { return sg("XIII\nIIXI\nIXIX\nIYIY"); }

// Product of |0> and the +1 eigenstate of (X+Y+Z)/sqrt(3), written on two
// qubits so every Pauli expectation on the second factor is nonzero.
DenseState zero_tensor_bloch() {
    DenseState bloch(1);
    double c = std::sqrt((1.0 + 1.0 / std::sqrt(3.0)) / 2.0);
    double s = std::sqrt((1.0 - 1.0 / std::sqrt(3.0)) / 2.0);
    bloch.amp[0] = c;
    bloch.amp[1] = std::polar(s, 3.14159265358979323846 / 4.0);
    return tensor(basis_state(1, 0), bloch);
}

DopedCircuit two_t_circuit() {
    DopedCircuit c;
    c.n_data = 1;
    c.n_ancilla = 1;
    c.gates = {Gate::cnot(0, 1), Gate::h(1), Gate::t(1), Gate::h(1),
               Gate::cnot(1, 0), Gate::t(0), Gate::h(0)};
    return c;
}

PauliSubgroup computational_basis(int n) {
    std::vector<PauliString> gens;
    for (int q = 0; q < n; ++q) gens.push_back(PauliString(n, 0, std::uint64_t(1) << q, 0));
    return canonicalize(gens, n, true);
}

ExampleOutcome run_universal_ic(const std::string& name, int n, bool with_oracle) {
    DopedCircuit u = universal_2n_circuit(n);
    auto rep = analyze_doped(u, computational_basis(2 * n),
                             AncillaSpec::stabilizer(computational_basis(n)));
    std::ostringstream exp, obs;
    std::uint64_t target = std::uint64_t(1) << (2 * n);
    exp << "s_mu=" << target << " ic=1";
    obs << "s_mu=" << rep.s_mu << " ic=" << (rep.ic ? 1 : 0);
    if (with_oracle) {
        exp << " oracle=" << target;
        obs << " oracle="
            << dense_s_mu_for_doped(u, computational_basis(2 * n),
                                    AncillaSpec::stabilizer(computational_basis(n)));
    }
    return verdict(name, exp.str(), obs.str());
}

ExampleOutcome run_zfree_count(const std::string& name, const PauliSubgroup& h,
                               std::uint64_t expect) {
    std::ostringstream exp, obs;
    exp << expect;
    obs << zfree_centralizer_count(h);
    return verdict(name, exp.str(), obs.str());
}

std::vector<ExampleCase> build_catalog() {
    std::vector<ExampleCase> cat;

    cat.push_back({"ghz-plus-ancilla-form",
                   "GHZ-basis measurement, one |+> ancilla: four distinct rank-1 elements",
                   [] {
                       auto f = stabilizer_effective_povm(ghz3(), sg("X"), 2);
                       return verdict("ghz-plus-ancilla-form",
                                      "ell=0 nonzero=8 mult=2 scale=0.5 gens=+XX,+ZZ vanishing=0",
                                      form_brief(f));
                   }});

    cat.push_back({"ghz-bell-ancilla-form",
                   "GHZ-basis measurement, entangled two-qubit ancilla: half the outcomes vanish",
                   [] {
                       auto f = stabilizer_effective_povm(ghz3(), sg("XX\nYY"), 1);
                       return verdict("ghz-bell-ancilla-form",
                                      "ell=1 nonzero=4 mult=2 scale=0.5 gens=+X vanishing=4",
                                      form_brief(f));
                   }});

    cat.push_back({"five-qubit-ghz-ancilla-form",
                   "Five-qubit basis with a GHZ ancilla: 32 outcomes, four distinct elements",
                   [] {
                       auto f = stabilizer_effective_povm(five_qubit_basis(), ghz3(), 2);
                       return verdict(
                           "five-qubit-ghz-ancilla-form",
                           "ell=0 nonzero=32 mult=8 scale=0.125 gens=+XI,+IX vanishing=0",
                           form_brief(f));
                   }});

    cat.push_back({"ancilla-sweep-dense",
                   "Same measured basis, dense product ancilla: full span 8",
                   [] {
                       auto rep = span_dimension(sweep_basis(), 2,
                                                 AncillaSpec::dense_state(zero_tensor_bloch()));
                       return verdict("ancilla-sweep-dense", "s_mu=8 p=1", span_brief(rep));
                   }});

    cat.push_back({"ancilla-sweep-magic",
                   "Same measured basis, |T>|T> ancilla: one coset dies, span 6",
                   [] {
                       auto rep = span_dimension(sweep_basis(), 2, AncillaSpec::magic_t_power(2));
                       return verdict("ancilla-sweep-magic", "s_mu=6 p=1", span_brief(rep));
                   }});

    cat.push_back({"ancilla-sweep-stabilizer",
                   "Same measured basis, |00> ancilla: stabilizer floor 4",
                   [] {
                       auto rep = span_dimension(sweep_basis(), 2,
                                                 AncillaSpec::stabilizer(sg("ZI\nIZ")));
                       return verdict("ancilla-sweep-stabilizer", "s_mu=4 p=1", span_brief(rep));
                   }});

    cat.push_back({"ancilla-sweep-generic",
                   "Same measured basis, generic ancilla: every coset survives",
                   [] {
                       auto rep = span_dimension(sweep_basis(), 2, AncillaSpec::generic(2));
                       return verdict("ancilla-sweep-generic", "s_mu=8 p=1", span_brief(rep));
                   }});

    cat.push_back({"magic-span-eight",
                   "Five-qubit basis with |T>^3: span 8 out of the ceiling 8",
                   [] {
                       auto rep = span_dimension(five_qubit_basis(), 2,
                                                 AncillaSpec::magic_t_power(3));
                       return verdict("magic-span-eight", "s_mu=8 p=1", span_brief(rep));
                   }});

    cat.push_back({"magic-minimal-ic",
                   "One data qubit, |T>|T> ancilla: span 4 reaches informational completeness",
                   [] {
                       auto rep = span_dimension(sg("IXZ\nXYY\nYZY"), 1,
                                                 AncillaSpec::magic_t_power(2));
                       std::ostringstream obs;
                       obs << "s_mu=" << rep.s_mu << " ic=" << (rep.ic ? 1 : 0);
                       return verdict("magic-minimal-ic", "s_mu=4 ic=1", obs.str());
                   }});

    cat.push_back({"zfree-quotient-pass",
                   "Every coset of C(<XZ>)/<XZ> has a Z-free representative",
                   [] {
                       PauliSubgroup h = ug("XZ");
                       PauliSubgroup c = centralizer_within(full_pauli_group(2), h);
                       std::ostringstream obs;
                       obs << (ic_condition_check(h, c) ? 1 : 0);
                       return verdict("zfree-quotient-pass", "1", obs.str());
                   }});

    cat.push_back({"zfree-quotient-fail-span-three",
                   "C(<XX>)/<XX> has a coset with no Z-free member; a witness basis gives span 3",
                   [] {
                       PauliSubgroup h = ug("XX");
                       PauliSubgroup c = centralizer_within(full_pauli_group(2), h);
                       auto rep = span_dimension(sg("IXX\nXYY\nYYZ"), 1,
                                                 AncillaSpec::magic_t_power(2));
                       std::ostringstream obs;
                       obs << "ic_condition=" << (ic_condition_check(h, c) ? 1 : 0)
                           << " s_mu=" << rep.s_mu;
                       return verdict("zfree-quotient-fail-span-three", "ic_condition=0 s_mu=3",
                                      obs.str());
                   }});

    cat.push_back({"pinned-syndrome-form",
                   "Heisenberg-form input with two gadget qubits: one pinned generator, span 2",
                   [] {
                       std::vector<PauliString> ev = {parse_pauli("ZIII"), parse_pauli("IIYY"),
                                                      parse_pauli("IZII"), parse_pauli("IIXX")};
                       auto rep = analyze_evolved(ev, 1, 1, 2, AncillaSpec::stabilizer(sg("Z")));
                       return verdict("pinned-syndrome-form", "s_mu=2 ic=0 p=0 k=1 free=2 pinned=+IXX",
                                      doped_brief(rep));
                   }});

    cat.push_back({"two-t-gadget-ic",
                   "Two-T circuit on 1+1 qubits: span 4, informationally complete",
                   [] {
                       auto rep = analyze_doped(two_t_circuit(), sg("ZI\nIZ"),
                                                AncillaSpec::stabilizer(sg("Z")));
                       return verdict("two-t-gadget-ic", "s_mu=4 ic=1 p=1 k=4 free=2 pinned=+IXZ",
                                      doped_brief(rep));
                   }});

    cat.push_back({"single-t-span-six",
                   "GHZ basis with a single |T> ancilla: span 6",
                   [] {
                       auto rep = span_dimension(ghz3(), 2, AncillaSpec::magic_t_power(1));
                       std::ostringstream obs;
                       obs << rep.s_mu;
                       return verdict("single-t-span-six", "6", obs.str());
                   }});

    cat.push_back(
        {"universal-frame-diagonal",
         "Frame operator of the 1-qubit universal measurement is diag(1/2,1/8,1/8,1/4)",
         [] {
             DopedCircuit u = universal_2n_circuit(1);
             auto ops = effective_povm(u.gates, 1, 1, basis_state(1, 0));
             DenseOperator f = frame_operator_pauli_basis(ops);
             const double want[4] = {0.5, 0.125, 0.125, 0.25};
             double worst = 0;
             for (int r = 0; r < 4; ++r)
                 for (int c = 0; c < 4; ++c) {
                     double target = (r == c) ? want[r] : 0.0;
                     worst = std::max(worst, std::abs(f.at(r, c) - std::complex<double>(target)));
                 }
             worst = std::max(worst, completeness_error(ops));
             ExampleOutcome out;
             out.name = "universal-frame-diagonal";
             out.expected = "diag 0.5 0.125 0.125 0.25, deviation below 1e-10";
             std::ostringstream obs;
             obs << "diag " << f.at(0, 0).real() << ' ' << f.at(1, 1).real() << ' '
                 << f.at(2, 2).real() << ' ' << f.at(3, 3).real() << ", max deviation " << worst;
             out.observed = obs.str();
             out.pass = worst < 1e-10;
             return out;
         }});

    cat.push_back({"universal-ic-one-qubit",
                   "Universal circuit n=1 (t=2): span 4, confirmed by the dense oracle",
                   [] { return run_universal_ic("universal-ic-one-qubit", 1, true); }});

    cat.push_back({"universal-ic-two-qubit",
                   "Universal circuit n=2 (t=4): span 16, confirmed by the dense oracle",
                   [] { return run_universal_ic("universal-ic-two-qubit", 2, true); }});

    cat.push_back({"universal-ic-three-qubit",
                   "Universal circuit n=3 (t=6): span 64 via the group-theoretic path",
                   [] { return run_universal_ic("universal-ic-three-qubit", 3, false); }});

    cat.push_back({"paired-gadget-witness",
                   "Constructive t=2n witness at n=2 verifies both group- and circuit-side",
                   [] {
                       auto w = ic_witness_2n(2);
                       std::ostringstream obs;
                       obs << "group_ic=" << (w.group_ic ? 1 : 0)
                           << " circuit_ic=" << (w.circuit_ic ? 1 : 0);
                       return verdict("paired-gadget-witness", "group_ic=1 circuit_ic=1",
                                      obs.str());
                   }});

    cat.push_back({"zfree-count-single-mixed",
                   "Z-free strings in C(<IIZX>) on four qubits",
                   [] { return run_zfree_count("zfree-count-single-mixed", ug("IIZX"), 36); }});

    cat.push_back({"zfree-count-single-zz",
                   "Z-free strings in C(<IIZZ>) on four qubits",
                   [] { return run_zfree_count("zfree-count-single-zz", ug("IIZZ"), 45); }});

    cat.push_back({"zfree-count-trivial",
                   "Z-free strings on four qubits with no constraint: 3^4",
                   [] {
                       return run_zfree_count("zfree-count-trivial", PauliSubgroup::trivial(4), 81);
                   }});

    cat.push_back({"zfree-count-two-generators",
                   "Z-free strings in C(<IIXZ, XZII>) on four qubits",
                   [] {
                       return run_zfree_count("zfree-count-two-generators", ug("IIXZ\nXZII"), 16);
                   }});

    cat.push_back({"necessity-thresholds",
                   "Smallest t with 3^t >= 4^n for n = 1..4",
                   [] {
                       std::ostringstream obs;
                       for (int n = 1; n <= 4; ++n) {
                           if (n > 1) obs << ',';
                           obs << necessary_t(n);
                       }
                       return verdict("necessity-thresholds", "2,3,4,6", obs.str());
                   }});

    cat.push_back({"ceiling-small-t",
                   "Proven ceiling 2^{n-t} 3^t at (n,t) = (1,1), (2,1), (2,2)",
                   [] {
                       std::ostringstream obs;
                       obs << bound_t_le_n(1, 1) << ',' << bound_t_le_n(2, 1) << ','
                           << bound_t_le_n(2, 2);
                       return verdict("ceiling-small-t", "3,6,9", obs.str());
                   }});

    cat.push_back({"ceiling-large-t",
                   "Constructive targets above t = n at (n,t) = (1,2), (2,4)",
                   [] {
                       std::ostringstream obs;
                       obs << bound_t_gt_n(1, 2) << ',' << bound_t_gt_n(2, 4);
                       return verdict("ceiling-large-t", "4,16", obs.str());
                   }});

    cat.push_back(
        {"fourier-round-trip",
         "Forward then inverse outcome transform returns the original family",
         [] {
             DopedCircuit u = universal_2n_circuit(1);
             auto ops = effective_povm(u.gates, 1, 1, basis_state(1, 0));
             auto there = group_fourier(ops, FourierDirection::forward);
             auto back = group_fourier(there, FourierDirection::inverse);
             double worst = 0;
             for (std::size_t i = 0; i < ops.size(); ++i)
                 for (std::size_t j = 0; j < ops[i].m.size(); ++j)
                     worst = std::max(worst, std::abs(ops[i].m[j] - back[i].m[j]));
             ExampleOutcome out;
             out.name = "fourier-round-trip";
             out.expected = "round-trip deviation below 1e-12";
             std::ostringstream obs;
             obs << "max deviation " << worst;
             out.observed = obs.str();
             out.pass = worst < 1e-12;
             return out;
         }});

    cat.push_back({"mixed-ancilla-collapse",
                   "Tracing out a maximally mixed half of a Bell pairing leaves span 1",
                   [] {
                       std::ostringstream obs;
                       obs << mixed_ancilla_span(bell_pairing(1), 1);
                       return verdict("mixed-ancilla-collapse", "1", obs.str());
                   }});

    return cat;
}

}  // namespace

const std::vector<ExampleCase>& example_catalog() {
    static const std::vector<ExampleCase> cat = build_catalog();
    return cat;
}

std::vector<ExampleOutcome> run_examples(const std::string& filter) {
    std::vector<ExampleOutcome> out;
    for (const auto& ex : example_catalog()) {
        if (!filter.empty() && ex.name.find(filter) == std::string::npos) continue;
        out.push_back(ex.run());
    }
    return out;
}

}  // namespace qspan
