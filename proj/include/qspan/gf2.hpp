#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "qspan/common.hpp"

namespace qspan {

// Packed GF(2) row vector of arbitrary width. Small helper for the places where
// 64 bits are not enough (commutation matrices against up-to-2n generators,
// Zassenhaus double-width rows).
struct Gf2Vec {
    int bits = 0;
    std::vector<std::uint64_t> w;

    Gf2Vec() = default;
    explicit Gf2Vec(int nbits) : bits(nbits), w((nbits + 63) / 64, 0) {}

    bool get(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void set(int i, bool v) {
        std::uint64_t m = 1ull << (i & 63);
        if (v) w[i >> 6] |= m; else w[i >> 6] &= ~m;
    }
    void flip(int i) { w[i >> 6] ^= 1ull << (i & 63); }

    void operator^=(const Gf2Vec& o) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] ^= o.w[k];
    }

    bool any() const {
        for (auto v : w) if (v) return true;
        return false;
    }

    int popcount() const {
        int c = 0;
        for (auto v : w) c += std::popcount(v);
        return c;
    }

    // Index of the lowest set bit, or -1.
    int lowest() const {
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k]) return static_cast<int>(k) * 64 + std::countr_zero(w[k]);
        return -1;
    }

    bool operator==(const Gf2Vec& o) const { return bits == o.bits && w == o.w; }
};

// Dense GF(2) matrix as a list of packed rows.
struct Gf2Matrix {
    int cols = 0;
    std::vector<Gf2Vec> rows;

    Gf2Matrix() = default;
    explicit Gf2Matrix(int ncols) : cols(ncols) {}

    void add_row(Gf2Vec r) { rows.push_back(std::move(r)); }

    // In-place reduced row echelon form; returns pivot column per kept row.
    // Zero rows are removed. Column order is plain ascending index.
    std::vector<int> rref() {
        std::vector<int> pivots;
        std::size_t r = 0;
        for (int c = 0; c < cols && r < rows.size(); ++c) {
            std::size_t sel = r;
            while (sel < rows.size() && !rows[sel].get(c)) ++sel;
            if (sel == rows.size()) continue;
            std::swap(rows[r], rows[sel]);
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
            pivots.push_back(c);
            ++r;
        }
        rows.resize(r);
        return pivots;
    }

    int rank() const {
        Gf2Matrix copy = *this;
        return static_cast<int>(copy.rref().size());
    }

    // Basis of { v : M v = 0 } (column-vector kernel), each returned as a row
    // of length cols. Standard free-variable construction off the RREF.
    std::vector<Gf2Vec> nullspace() const {
        Gf2Matrix red = *this;
        std::vector<int> pivots = red.rref();
        std::vector<int> pivot_of_col(cols, -1);
        for (std::size_t i = 0; i < pivots.size(); ++i) pivot_of_col[pivots[i]] = static_cast<int>(i);
        std::vector<Gf2Vec> basis;
        for (int c = 0; c < cols; ++c) {
            if (pivot_of_col[c] >= 0) continue;  // pivot column, not free
            Gf2Vec v(cols);
            v.set(c, true);
            for (std::size_t i = 0; i < pivots.size(); ++i)
                if (red.rows[i].get(c)) v.set(pivots[i], true);
            basis.push_back(std::move(v));
        }
        return basis;
    }
};

}  // namespace qspan
