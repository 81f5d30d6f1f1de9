#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "qspan/dense.hpp"
#include "qspan/pauli.hpp"

using namespace qspan;

namespace {

const double kRt2 = std::sqrt(2.0);

}  // namespace

TEST_CASE("basis states and tensor order") {
    DenseState s = basis_state(2, 1);  // qubit 0 set
    CHECK(s.amp[1] == cplx(1, 0));
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(pauli_expectation(s, parse_pauli("ZI")).real() == doctest::Approx(-1.0));
    CHECK(pauli_expectation(s, parse_pauli("IZ")).real() == doctest::Approx(1.0));

    // b occupies the high bits: |a> (x) |b> at joint index b<<1 | a here
    DenseState joint = tensor(basis_state(1, 1), basis_state(1, 0));
    CHECK(joint.amp[1] == cplx(1, 0));
    joint = tensor(basis_state(1, 0), basis_state(1, 1));
    CHECK(joint.amp[2] == cplx(1, 0));
}

TEST_CASE("gate application against known states") {
    DenseState s = zero_state(1);
    apply_gate(s, Gate::h(0), false);
    CHECK(s.amp[0].real() == doctest::Approx(1 / kRt2));
    CHECK(s.amp[1].real() == doctest::Approx(1 / kRt2));
    apply_gate(s, Gate::t(0), false);
    CHECK(std::arg(s.amp[1]) == doctest::Approx(std::acos(-1.0) / 4));
    apply_gate(s, Gate::t(0), true);
    apply_gate(s, Gate::h(0), false);
    CHECK(std::abs(s.amp[0] - cplx(1, 0)) < 1e-12);

    DenseState bell = zero_state(2);
    apply_gates(bell, {Gate::h(0), Gate::cnot(0, 1)}, false);
    CHECK(pauli_expectation(bell, parse_pauli("XX")).real() == doctest::Approx(1.0));
    CHECK(pauli_expectation(bell, parse_pauli("ZZ")).real() == doctest::Approx(1.0));
    CHECK(pauli_expectation(bell, parse_pauli("ZI")).real() == doctest::Approx(0.0));
}

TEST_CASE("t power state expectations") {
    DenseState t1 = t_power_state(1);
    CHECK(pauli_expectation(t1, parse_pauli("X")).real() == doctest::Approx(1 / kRt2));
    CHECK(pauli_expectation(t1, parse_pauli("Y")).real() == doctest::Approx(1 / kRt2));
    CHECK(pauli_expectation(t1, parse_pauli("Z")).real() == doctest::Approx(0.0));
    DenseState t2 = t_power_state(2);
    CHECK(pauli_expectation(t2, parse_pauli("XX")).real() == doctest::Approx(0.5));
    CHECK(t2.norm() == doctest::Approx(1.0));
}

TEST_CASE("stabilizer states match generator expectations") {
    PauliSubgroup s = load_group_text("XX\nZZ", true).group;
    for (std::uint64_t bits = 0; bits < 4; ++bits) {
        DenseState psi = stabilizer_state(s, bits);
        CHECK(psi.norm() == doctest::Approx(1.0));
        for (std::size_t i = 0; i < s.gens.size(); ++i) {
            double want = ((bits >> i) & 1) ? -1.0 : 1.0;
            CHECK(pauli_expectation(psi, s.gens[i]).real() == doctest::Approx(want));
        }
    }
    // sign baked into the group works the same way
    DenseState minus = stabilizer_state(load_group_text("-Z", true).group, 0);
    CHECK(minus.amp[1] != cplx(0, 0));
}

TEST_CASE("haar sampling is seeded and normalized") {
    Rng a(5), b(5), c(6);
    DenseState s1 = random_haar_state(3, a);
    DenseState s2 = random_haar_state(3, b);
    DenseState s3 = random_haar_state(3, c);
    CHECK(s1.amp == s2.amp);
    CHECK(s1.amp != s3.amp);
    CHECK(s1.norm() == doctest::Approx(1.0));
}

TEST_CASE("simulate runs the doped circuit on data plus ancilla") {
    DopedCircuit c;
    c.n_data = 1;
    c.n_ancilla = 0;
    c.gates = {Gate::h(0), Gate::t(0)};
    DenseState out = simulate(c, zero_state(1));
    DenseState manual = zero_state(1);
    apply_gates(manual, c.gates, false);
    CHECK(std::abs(out.amp[0] - manual.amp[0]) < 1e-12);
    CHECK(std::abs(out.amp[1] - manual.amp[1]) < 1e-12);
}

TEST_CASE("effective povm of the identity circuit reads out the basis") {
    auto ops = effective_povm({}, 1, 0, zero_state(0));
    REQUIRE(ops.size() == 2);
    CHECK(completeness_error(ops) < 1e-12);
    CHECK(ops[0].at(0, 0).real() == doctest::Approx(1.0));
    CHECK(ops[1].at(1, 1).real() == doctest::Approx(1.0));
    CHECK(std::abs(ops[0].at(1, 1)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(effective_povm({}, 1, 1, zero_state(0)), dimension_error);
}

TEST_CASE("povm completeness holds for random circuits with ancillas") {
    Rng rng(13);
    auto gates = random_clifford(3, 21);
    gates.push_back(Gate::t(1));
    gates.push_back(Gate::h(2));
    DenseState psi = random_haar_state(1, rng);
    auto ops = effective_povm(gates, 2, 1, psi);
    CHECK(ops.size() == 8);
    CHECK(completeness_error(ops) < 1e-10);
    // positivity probe: each diagonal entry is a <v|mu|v> with v a basis vector
    for (const auto& op : ops)
        for (std::size_t i = 0; i < op.dim(); ++i) CHECK(op.at(i, i).real() > -1e-12);
}

TEST_CASE("span rank counts independent operators") {
    auto pm = [](const char* s) { return pauli_matrix(parse_pauli(s)); };
    CHECK(span_rank({pm("I"), pm("X")}) == 2);
    CHECK(span_rank({pm("I"), pm("X"), pm("X")}) == 2);
    CHECK(span_rank({pm("I"), pm("X"), pm("Y"), pm("Z")}) == 4);
    CHECK(span_rank({pm("II"), pm("XX"), pm("YY"), pm("ZZ")}) == 4);

    // a scaled copy adds nothing
    DenseOperator half = pm("Z");
    for (auto& v : half.m) v *= 0.5;
    RankResult r = span_rank_full({pm("Z"), half});
    CHECK(r.rank == 1);
    CHECK(r.min_accepted > r.max_rejected);
}

TEST_CASE("frame operator of the universal single qubit povm") {
    DopedCircuit u = universal_2n_circuit(1);
    auto ops = effective_povm(u.gates, 1, 1, basis_state(1, 0));
    DenseOperator f = frame_operator_pauli_basis(ops);
    std::vector<double> want = {0.5, 0.125, 0.125, 0.25};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(f.at(i, i).real() == doctest::Approx(want[i]).epsilon(1e-10));
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(f.at(i, j)) < 1e-10);
    }
}

TEST_CASE("operator dumps are valid json") {
    auto ops = effective_povm({}, 1, 0, zero_state(0));
    std::string text = dump_operators_json(ops);
    CHECK(text.find("matrices") != std::string::npos);
    CHECK(text.find("\"count\": 2") != std::string::npos);
    CHECK(text.find("\"dim\": 2") != std::string::npos);
}
