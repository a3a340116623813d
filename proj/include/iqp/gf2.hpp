#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iqp/rng.hpp"

namespace iqp {

/// A fixed-length vector over GF(2), packed 64 bits per word.
/// Invariant: bits past `size()` in the last word are always zero.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitVector from_string(std::string_view s) {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); i++) {
            if (s[i] == '1') {
                v.set(i, true);
            } else if (s[i] != '0') {
                throw std::invalid_argument("bit string may only contain 0 and 1");
            }
        }
        return v;
    }

    std::size_t size() const { return len_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(std::size_t i, bool value) {
        std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVector& operator^=(const BitVector& other) {
        check_same_length(other);
        for (std::size_t w = 0; w < words_.size(); w++) {
            words_[w] ^= other.words_[w];
        }
        return *this;
    }

    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }

    /// GF(2) inner product: parity of the AND of the two vectors.
    int dot(const BitVector& other) const {
        check_same_length(other);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); w++) {
            acc ^= words_[w] & other.words_[w];
        }
        return std::popcount(acc) & 1;
    }

    std::size_t weight() const {
        std::size_t total = 0;
        for (std::uint64_t w : words_) {
            total += static_cast<std::size_t>(std::popcount(w));
        }
        return total;
    }

    bool is_zero() const {
        for (std::uint64_t w : words_) {
            if (w != 0) {
                return false;
            }
        }
        return true;
    }

    /// First set bit index, or size() if the vector is zero.
    std::size_t leading_bit() const {
        for (std::size_t w = 0; w < words_.size(); w++) {
            if (words_[w] != 0) {
                return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
            }
        }
        return len_;
    }

    bool operator==(const BitVector& other) const = default;

    /// Order as 0/1 strings read from index 0 ('0' < '1').
    static bool lex_less(const BitVector& a, const BitVector& b) {
        a.check_same_length(b);
        for (std::size_t w = 0; w < a.words_.size(); w++) {
            std::uint64_t diff = a.words_[w] ^ b.words_[w];
            if (diff != 0) {
                int bit = std::countr_zero(diff);
                return ((b.words_[w] >> bit) & 1) != 0;
            }
        }
        return false;
    }

    std::string to_string() const {
        std::string s(len_, '0');
        for (std::size_t i = 0; i < len_; i++) {
            if (get(i)) {
                s[i] = '1';
            }
        }
        return s;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    std::size_t hash() const {
        std::size_t h = len_;
        for (std::uint64_t w : words_) {
            h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }

  private:
    void check_same_length(const BitVector& other) const {
        if (len_ != other.len_) {
            throw std::invalid_argument("BitVector length mismatch");
        }
    }

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitVectorHash {
    std::size_t operator()(const BitVector& v) const { return v.hash(); }
};

/// A k-by-n matrix over GF(2), stored as k packed row vectors.
/// Rows play the part of program elements / matroid points; columns span a code.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows, BitVector(cols)), cols_(cols) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m.rows_[i].set(i, true);
        }
        return m;
    }

    static BitMatrix from_rows(std::vector<BitVector> rows, std::size_t cols) {
        for (const BitVector& r : rows) {
            if (r.size() != cols) {
                throw std::invalid_argument("ragged rows");
            }
        }
        BitMatrix m;
        m.rows_ = std::move(rows);
        m.cols_ = cols;
        return m;
    }

    static BitMatrix from_strings(const std::vector<std::string>& rows) {
        std::vector<BitVector> parsed;
        parsed.reserve(rows.size());
        std::size_t cols = rows.empty() ? 0 : rows[0].size();
        for (const std::string& r : rows) {
            parsed.push_back(BitVector::from_string(r));
        }
        return from_rows(std::move(parsed), cols);
    }

    std::size_t row_count() const { return rows_.size(); }
    std::size_t col_count() const { return cols_; }

    const BitVector& row(std::size_t i) const { return rows_[i]; }
    BitVector& row(std::size_t i) { return rows_[i]; }

    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v) { rows_[i].set(j, v); }

    void append_row(BitVector r) {
        if (r.size() != cols_) {
            throw std::invalid_argument("row length mismatch");
        }
        rows_.push_back(std::move(r));
    }

    BitVector column(std::size_t j) const {
        BitVector c(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); i++) {
            if (rows_[i].get(j)) {
                c.set(i, true);
            }
        }
        return c;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_.size());
        for (std::size_t i = 0; i < rows_.size(); i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                if (rows_[i].get(j)) {
                    t.rows_[j].set(i, true);
                }
            }
        }
        return t;
    }

    /// M · sᵀ: one bit per row (s has col_count() entries).
    BitVector mul_vec(const BitVector& s) const {
        if (s.size() != cols_) {
            throw std::invalid_argument("vector length mismatch");
        }
        BitVector out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); i++) {
            if (rows_[i].dot(s)) {
                out.set(i, true);
            }
        }
        return out;
    }

    /// XOR of all rows (the zero vector for an empty matrix).
    BitVector row_sum() const {
        BitVector acc(cols_);
        for (const BitVector& r : rows_) {
            acc ^= r;
        }
        return acc;
    }

    /// M · A, where A has col_count() rows.
    BitMatrix multiplied(const BitMatrix& a) const {
        if (a.row_count() != cols_) {
            throw std::invalid_argument("matrix dimension mismatch");
        }
        BitMatrix out(rows_.size(), a.col_count());
        for (std::size_t i = 0; i < rows_.size(); i++) {
            for (std::size_t j = 0; j < cols_; j++) {
                if (rows_[i].get(j)) {
                    out.rows_[i] ^= a.rows_[j];
                }
            }
        }
        return out;
    }

    /// Columns restricted to [0, keep).
    BitMatrix left_columns(std::size_t keep) const {
        BitMatrix out(rows_.size(), keep);
        for (std::size_t i = 0; i < rows_.size(); i++) {
            for (std::size_t j = 0; j < keep; j++) {
                if (rows_[i].get(j)) {
                    out.rows_[i].set(j, true);
                }
            }
        }
        return out;
    }

    bool operator==(const BitMatrix& other) const = default;

  private:
    std::vector<BitVector> rows_;
    std::size_t cols_ = 0;
};

namespace detail {

// In-place reduced row echelon form. If `transform` is non-null it must start
// as the identity and is carried through every row operation, so that
// transform · original = result. Returns the pivot column of each pivot row.
inline std::vector<std::size_t> rref_inplace(BitMatrix& m, BitMatrix* transform) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.col_count() && r < m.row_count(); c++) {
        std::size_t pivot = r;
        while (pivot < m.row_count() && !m.get(pivot, c)) {
            pivot++;
        }
        if (pivot == m.row_count()) {
            continue;
        }
        std::swap(m.row(r), m.row(pivot));
        if (transform != nullptr) {
            std::swap(transform->row(r), transform->row(pivot));
        }
        for (std::size_t i = 0; i < m.row_count(); i++) {
            if (i != r && m.get(i, c)) {
                m.row(i) ^= m.row(r);
                if (transform != nullptr) {
                    transform->row(i) ^= transform->row(r);
                }
            }
        }
        pivots.push_back(c);
        r++;
    }
    return pivots;
}

}  // namespace detail

inline std::size_t rank(const BitMatrix& m) {
    BitMatrix copy = m;
    return detail::rref_inplace(copy, nullptr).size();
}

struct ColEchelonResult {
    BitMatrix reduced;    // k x rank, canonical, no zero columns
    BitMatrix transform;  // invertible n x n; M·transform = [reduced | 0]
};

/// Canonical column-echelon reduction. The reduced matrix is the canonical
/// representative of the column span: invariant under any invertible column
/// action on the input.
inline ColEchelonResult col_echelon_reduce(const BitMatrix& m) {
    BitMatrix t = m.transposed();
    BitMatrix e = BitMatrix::identity(m.col_count());
    std::size_t r = detail::rref_inplace(t, &e).size();
    // t is RREF of Mᵀ: its first r rows are the canonical row basis, so the
    // first r columns of tᵀ are the canonical column basis of M.
    ColEchelonResult out;
    out.reduced = t.transposed().left_columns(r);
    out.transform = e.transposed();
    return out;
}

/// Some x with M·xᵀ = b, or nullopt if the system is inconsistent.
/// Deterministic: returns the lexicographically smallest solution.
inline std::optional<BitVector> solve_linear(const BitMatrix& m, const BitVector& b) {
    if (b.size() != m.row_count()) {
        throw std::invalid_argument("solve_linear: rhs length mismatch");
    }
    std::size_t k = m.row_count();
    std::size_t n = m.col_count();
    // Augmented elimination: [M | b].
    BitMatrix aug(k, n + 1);
    for (std::size_t i = 0; i < k; i++) {
        for (std::size_t j = 0; j < n; j++) {
            if (m.get(i, j)) {
                aug.set(i, j, true);
            }
        }
        if (b.get(i)) {
            aug.set(i, n, true);
        }
    }
    std::vector<std::size_t> pivots = detail::rref_inplace(aug, nullptr);
    if (!pivots.empty() && pivots.back() == n) {
        return std::nullopt;  // pivot in the augmented column
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : pivots) {
        is_pivot[c] = true;
    }
    // Particular solution with all free variables zero.
    BitVector x(n);
    for (std::size_t r = 0; r < pivots.size(); r++) {
        if (aug.get(r, n)) {
            x.set(pivots[r], true);
        }
    }
    // Right-kernel basis, one vector per free column.
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < n; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVector v(n);
        v.set(f, true);
        for (std::size_t r = 0; r < pivots.size(); r++) {
            if (aug.get(r, f)) {
                v.set(pivots[r], true);
            }
        }
        basis.push_back(std::move(v));
    }
    // Echelonize the basis so each vector owns a distinct leading bit, then
    // greedily clear the earliest positions of x; that yields the
    // lexicographic minimum of the solution coset.
    std::vector<BitVector> reduced;
    for (BitVector v : basis) {
        for (const BitVector& u : reduced) {
            if (v.get(u.leading_bit())) {
                v ^= u;
            }
        }
        if (!v.is_zero()) {
            std::size_t lead = v.leading_bit();
            for (BitVector& u : reduced) {
                if (u.get(lead)) {
                    u ^= v;
                }
            }
            reduced.push_back(std::move(v));
        }
    }
    std::sort(reduced.begin(), reduced.end(), [](const BitVector& a, const BitVector& b) {
        return a.leading_bit() < b.leading_bit();
    });
    for (const BitVector& v : reduced) {
        if (x.get(v.leading_bit())) {
            x ^= v;
        }
    }
    return x;
}

/// Basis of the left kernel {v : v·M = 0}, with k − rank(M) rows.
inline BitMatrix kernel(const BitMatrix& m) {
    BitMatrix copy = m;
    BitMatrix e = BitMatrix::identity(m.row_count());
    std::size_t r = detail::rref_inplace(copy, &e).size();
    // Rows of e that reduced a row of m to zero annihilate m from the left.
    BitMatrix basis(m.row_count() - r, m.row_count());
    for (std::size_t i = r; i < m.row_count(); i++) {
        basis.row(i - r) = e.row(i);
    }
    return basis;
}

/// Uniformly random invertible n x n matrix (rejection sampling).
inline BitMatrix random_invertible(std::size_t n, Rng& rng) {
    if (n == 0) {
        throw std::invalid_argument("random_invertible: n must be >= 1");
    }
    while (true) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = 0; j < n; j++) {
                if (rng.next_u64() & 1) {
                    m.set(i, j, true);
                }
            }
        }
        if (rank(m) == n) {
            return m;
        }
    }
}

/// Uniformly random permutation of [0, k) by Fisher-Yates.
inline std::vector<std::size_t> random_permutation(std::size_t k, Rng& rng) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; i++) {
        perm[i] = i;
    }
    for (std::size_t i = k; i > 1; i--) {
        std::size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

/// True iff the columns of m1 and m2 span the same subspace of F2^k.
inline bool same_column_span(const BitMatrix& m1, const BitMatrix& m2) {
    if (m1.row_count() != m2.row_count()) {
        throw std::invalid_argument("same_column_span: row counts differ");
    }
    std::size_t r1 = rank(m1);
    std::size_t r2 = rank(m2);
    if (r1 != r2) {
        return false;
    }
    BitMatrix joined(m1.row_count(), m1.col_count() + m2.col_count());
    for (std::size_t i = 0; i < m1.row_count(); i++) {
        for (std::size_t j = 0; j < m1.col_count(); j++) {
            if (m1.get(i, j)) {
                joined.set(i, j, true);
            }
        }
        for (std::size_t j = 0; j < m2.col_count(); j++) {
            if (m2.get(i, j)) {
                joined.set(i, m1.col_count() + j, true);
            }
        }
    }
    return rank(joined) == r1;
}

}  // namespace iqp
