#include "doctest.h"

#include <vector>

#include "qspan/pauli.hpp"

using namespace qspan;

TEST_CASE("parse and format round trip") {
    for (const char* text : {"I", "X", "-Y", "iZ", "-iX", "XIZY", "YYYY", "-ZXIY"}) {
        PauliString p = parse_pauli(text);
        CHECK(format_pauli(p) == text);
    }
    // A leading '+' is accepted but not printed back.
    CHECK(format_pauli(parse_pauli("+XZ")) == "XZ");
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(parse_pauli(""), parse_error);
    CHECK_THROWS_AS(parse_pauli("XQZ"), parse_error);
    CHECK_THROWS_AS(parse_pauli("-"), parse_error);
    try {
        parse_pauli("XQZ");
    } catch (const parse_error& e) {
        CHECK(e.position == 1);
    }
}

TEST_CASE("single qubit products carry exact phases") {
    PauliString X = parse_pauli("X"), Y = parse_pauli("Y"), Z = parse_pauli("Z");
    CHECK(X * Y == parse_pauli("iZ"));
    CHECK(Y * X == parse_pauli("-iZ"));
    CHECK(Y * Z == parse_pauli("iX"));
    CHECK(Z * X == parse_pauli("iY"));
    CHECK(X * Z == parse_pauli("-iY"));
    CHECK(X * X == parse_pauli("I"));
    CHECK(Y * Y == parse_pauli("I"));
}

TEST_CASE("product phase matches commutation") {
    // ab == ba when they commute, ab == -ba otherwise, on random-ish strings.
    std::vector<PauliString> pool;
    for (const char* s : {"XXIZ", "IYZY", "ZZZZ", "XYZI", "-IIXY", "iYIXZ"})
        pool.push_back(parse_pauli(s));
    pool[5] = parse_pauli("YIXZ");  // keep everything Hermitian for sign()
    for (const auto& a : pool)
        for (const auto& b : pool) {
            PauliString ab = a * b, ba = b * a;
            CHECK(ab.x == ba.x);
            CHECK(ab.z == ba.z);
            if (commutes(a, b))
                CHECK(ab.phase == ba.phase);
            else
                CHECK(((ab.phase - ba.phase) & 3) == 2);
        }
}

TEST_CASE("hermiticity and sign") {
    CHECK(parse_pauli("Y").is_hermitian());
    CHECK(parse_pauli("Y").sign() == 1);
    CHECK(parse_pauli("-YXY").sign() == -1);
    CHECK_FALSE(parse_pauli("iX").is_hermitian());
    CHECK_THROWS(parse_pauli("iX").sign());
}

TEST_CASE("lift is the positive Hermitian representative") {
    ProjectivePauli y(1, 1, 1);
    PauliString ly = lift(y);
    CHECK(ly == parse_pauli("Y"));
    CHECK(ly.sign() == 1);
    CHECK(lift(ProjectivePauli(3, 0b101, 0b110)) == parse_pauli("XZY"));
}

TEST_CASE("commutation table") {
    CHECK_FALSE(commutes(parse_pauli("X"), parse_pauli("Z")));
    CHECK(commutes(parse_pauli("XX"), parse_pauli("YY")));
    CHECK(commutes(parse_pauli("XX"), parse_pauli("ZZ")));
    CHECK_FALSE(commutes(parse_pauli("XI"), parse_pauli("ZZ")));
    CHECK(commutes(ProjectivePauli(2, 3, 0), ProjectivePauli(2, 0, 3)));
}

TEST_CASE("restriction keeps the phase only for identity complements") {
    PauliString g = parse_pauli("-XYZI");
    CHECK(restrict_range(g, 1, 2) == parse_pauli("YZ"));  // complement X.I, lift
    CHECK(restrict_range(g, 0, 4) == g);                  // full window keeps the sign
    CHECK(restrict_to(g, {0, 2}) == parse_pauli("XZ"));
    PauliString h = parse_pauli("-IYII");
    CHECK(restrict_range(h, 1, 1) == parse_pauli("-Y"));  // identity outside, sign survives
}

TEST_CASE("projective restriction and ordering") {
    ProjectivePauli g(4, 0b0011, 0b0110);
    CHECK(restrict_range(g, 1, 2) == ProjectivePauli(2, 0b01, 0b11));
    CHECK(ProjectivePauli(parse_pauli("IX")) < ProjectivePauli(parse_pauli("XI")));
    CHECK(ProjectivePauli(parse_pauli("XI")) < ProjectivePauli(parse_pauli("YI")));
    CHECK_FALSE(ProjectivePauli(parse_pauli("ZZ")) < ProjectivePauli(parse_pauli("ZZ")));
}

TEST_CASE("weight counts") {
    WeightCounts w = weight_counts(parse_pauli("XXYZI"));
    CHECK(w.n_X == 2);
    CHECK(w.n_Y == 1);
    CHECK(w.n_Z == 1);
    CHECK(w.n_I == 1);
}

TEST_CASE("qubit mask") {
    CHECK(qubit_mask(0) == 0);
    CHECK(qubit_mask(3) == 7);
    CHECK(qubit_mask(64) == ~0ull);
}

TEST_CASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(multiply(parse_pauli("X"), parse_pauli("XX")), dimension_error);
}
