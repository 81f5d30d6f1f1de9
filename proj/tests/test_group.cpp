#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qspan/circuit.hpp"
#include "qspan/group.hpp"
#include "qspan/pauli.hpp"

using namespace qspan;

namespace {

PauliSubgroup sg(const std::string& text) { return load_group_text(text, true).group; }
PauliSubgroup ug(const std::string& text) { return load_group_text(text, false).group; }

// Random signed maximal abelian group: the computational basis evolved through
// a seeded Clifford circuit.
PauliSubgroup random_basis(int width, std::uint64_t seed) {
    auto gates = random_clifford(width, seed);
    std::vector<PauliString> gens;
    for (int q = 0; q < width; ++q) {
        PauliString z(width, 0, std::uint64_t(1) << q, 0);
        gens.push_back(evolve_string(gates, z, EvolveDirection::adjoint));
    }
    return canonicalize(gens, width, true);
}

}  // namespace

TEST_CASE("canonical form is representation independent") {
    CHECK(sg("ZZ\nIZ") == sg("ZI\nIZ"));
    CHECK(sg("ZZ\nIZ") == sg("IZ\nZI"));
    CHECK(ug("XY\nYX") == ug("YX\nZZ"));  // XY*YX spans ZZ projectively
    int dropped = 0;
    canonicalize({parse_pauli("XX"), parse_pauli("XX")}, 2, true, &dropped);
    CHECK(dropped == 1);
}

TEST_CASE("signed canonicalization rejects illegal stabilizer input") {
    CHECK_THROWS_AS(sg("X\nZ"), stabilizer_error);   // anticommuting pair
    CHECK_THROWS_AS(sg("X\n-X"), stabilizer_error);  // -I in the span
    CHECK_NOTHROW(ug("X\nZ"));                       // projective groups may be non-abelian
    CHECK_FALSE(ug("X\nZ").abelian);
}

TEST_CASE("membership carries the exact sign") {
    PauliSubgroup g = sg("ZZI\nZIZ\nXXX");
    auto mem = contains(g, parse_pauli("ZZI"));
    CHECK(mem.member);
    CHECK(mem.sign == 1);
    // ZZI * ZIZ = IZZ with positive sign
    CHECK(contains(g, parse_pauli("IZZ")).sign == 1);
    CHECK_FALSE(contains(g, parse_pauli("ZZZ")).member);

    PauliSubgroup neg = sg("-X");
    CHECK(contains(neg, parse_pauli("X")).sign == -1);
}

TEST_CASE("intersection is projective with signs from the left input") {
    PauliSubgroup a = sg("XX\nZZ");
    CHECK(intersect(a, sg("XX\n-YY")).dim() == 2);  // XX*ZZ = -YY, same group
    // <XX,YY> has the same projective span, so the full group comes back
    // carrying a's signs (-YY, not B's +YY).
    PauliSubgroup full = intersect(a, sg("XX\nYY"));
    CHECK(full.dim() == 2);
    CHECK(contains(full, parse_pauli("YY")).sign == -1);
    PauliSubgroup b = intersect(a, sg("XI\nIX"));
    CHECK(b.dim() == 1);
    CHECK(contains(b, parse_pauli("XX")).sign == 1);
}

TEST_CASE("centralizer within the full string group") {
    PauliSubgroup c = centralizer_within(full_pauli_group(2), ug("XZ"));
    CHECK(c.dim() == 3);
    for (const auto& g : c.gens) CHECK(commutes(g, parse_pauli("XZ")));
    // the centralizer of an abelian group contains it
    CHECK(contains(c, parse_pauli("XZ")).member);
}

TEST_CASE("embed places a local group at an offset") {
    PauliSubgroup e = embed(ug("XZ"), 1, 4);
    CHECK(e.n_qubits == 4);
    CHECK(e.dim() == 1);
    CHECK(ProjectivePauli(e.gens[0]) == ProjectivePauli(parse_pauli("IXZI")));
}

TEST_CASE("element streams are combo ordered") {
    auto els = elements(sg("-X"));
    REQUIRE(els.size() == 2);
    CHECK(els[0] == parse_pauli("I"));
    CHECK(els[1] == parse_pauli("-X"));
    CHECK(elements(ug("XI\nIX")).size() == 4);
}

TEST_CASE("extend basis gives independent generators modulo the subgroup") {
    PauliSubgroup sub = sg("ZZ");
    PauliSubgroup sup = sg("ZI\nIZ");
    auto ext = extend_basis(sub, sup);
    REQUIRE(ext.size() == 1);
    CHECK_FALSE(contains(sub, ext[0]).member);
    CHECK(contains(sup, ext[0]).member);
}

TEST_CASE("aligned generators obey the diagonal anticommutation pattern") {
    // Random maximal S against a random stabilizer Z on the ancilla slice.
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        int n = 1 + int(seed % 3), m = 1 + int((seed / 2) % 2);
        PauliSubgroup s = random_basis(n + m, seed);
        PauliSubgroup z = embed(random_basis(m, seed + 100), n, n + m);
        AlignedGenerators ag = align_generators(s, z);
        CHECK(ag.ell == int(ag.h_list.size()));
        CHECK(ag.g_tilde_list.size() == ag.h_tilde_list.size());
        for (std::size_t j = 0; j < ag.g_tilde_list.size(); ++j)
            for (std::size_t k = 0; k < ag.h_tilde_list.size(); ++k)
                CHECK(commutes(ag.g_tilde_list[j], ag.h_tilde_list[k]) == (j != k));
        for (const auto& g : ag.g_list)
            for (const auto& h : ag.h_tilde_list) CHECK(commutes(g, h));
        for (const auto& h : ag.h_list)
            for (const auto& ht : ag.h_tilde_list) CHECK(commutes(h, ht));
    }
}

TEST_CASE("entanglement decomposition satisfies the dimension identity") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        int n_a = 1 + int(seed % 3);
        int n_b = 1 + int((seed * 7) % 3);
        PauliSubgroup s = random_basis(n_a + n_b, seed * 31);
        EntanglementDecomposition ed = entanglement_decomposition(s, n_a);
        CHECK(2 * ed.p == n_a + n_b - ed.S_A.dim() - ed.S_B.dim());
        CHECK(int(ed.nonlocal_pairs.size()) == ed.p);
        for (const auto& pair : ed.nonlocal_pairs) {
            CHECK_FALSE(commutes(pair.g_a, pair.g_bar_a));
            CHECK_FALSE(commutes(pair.g_b, pair.g_bar_b));
            CHECK(commutes(pair.g, pair.g_bar));
        }
    }
}

TEST_CASE("known decomposition of the GHZ-extended basis") {
    PauliSubgroup s = sg("XIII\nIIXI\nIXIX\nIYIY");
    EntanglementDecomposition ed = entanglement_decomposition(s, 2);
    CHECK(ed.p == 1);
    DoubleCosetTable dct = double_coset_table(s, ed.S_A, ed.S_B);
    CHECK(dct.cosets.size() == 4);
    for (const auto& c : dct.cosets) CHECK(c.a_parts.size() == 2);
}

TEST_CASE("coset table uses minimal representatives") {
    CosetTable ct = coset_table(full_pauli_group(1), ug("X"));
    REQUIRE(ct.cosets.size() == 2);
    CHECK(format_pauli(ct.cosets[0].rep) == "I");
    CHECK(format_pauli(ct.cosets[1].rep) == "Y");  // {Z, Y} sorts Y first
    CHECK(ct.cosets[1].members.size() == 2);
}

TEST_CASE("stabilizer overlap formula") {
    CHECK(stabilizer_overlap(sg("Z"), sg("Z")) == doctest::Approx(1.0));
    CHECK(stabilizer_overlap(sg("Z"), sg("-Z")) == doctest::Approx(0.0));
    CHECK(stabilizer_overlap(sg("Z"), sg("X")) == doctest::Approx(0.5));
    CHECK(stabilizer_overlap(sg("XX\nZZ"), sg("ZI\nIZ")) == doctest::Approx(0.5));
    CHECK(stabilizer_overlap(sg("XX\nZZ"), sg("ZI\n-IZ")) == doctest::Approx(0.0));
    CHECK(stabilizer_overlap(sg("XX\nZZ"), sg("-ZI\n-IZ")) == doctest::Approx(0.5));
}

TEST_CASE("zfree centralizer count matches direct enumeration") {
    auto brute = [](const PauliSubgroup& h) {
        int t = h.n_qubits;
        std::uint64_t count = 0;
        for (std::uint64_t x = 0; x < (1ull << t); ++x)
            for (std::uint64_t z = 0; z < (1ull << t); ++z) {
                ProjectivePauli g(t, x, z);
                if (z & ~x) continue;  // skip strings with a Z letter anywhere
                bool central = true;
                for (const auto& gen : h.gens)
                    if (!commutes(lift(g), gen)) { central = false; break; }
                if (central) ++count;
            }
        return count;
    };
    for (const char* text : {"XX", "ZI", "YY\nXX", "XYZ", "ZZZ\nXXI"}) {
        PauliSubgroup h = ug(text);
        CHECK(zfree_centralizer_count(h) == brute(h));
    }
    CHECK(zfree_centralizer_count(PauliSubgroup::trivial(4)) == 81);
}

TEST_CASE("group text round trip and line errors") {
    PauliSubgroup g = sg("-ZZI\nZIZ\nXXX");
    PauliSubgroup back = load_group_text(save_group(g), true).group;
    CHECK(back == g);
    try {
        load_group_text("ZZ\nZZZ", false);
        CHECK(false);
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}
