#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"

namespace iqp {

/// Codeword counts cannot exceed 2^cap during exhaustive enumeration.
inline constexpr unsigned kDefaultEnumCap = 28;

/// A binary linear code of length `length()`, held as a canonical
/// column-echelon basis (columns of generator()), so rank == column count.
class LinearCode {
  public:
    LinearCode() = default;

    /// Builds the code spanned by the columns of `spanning` (any redundancy
    /// is reduced away; the stored generator is canonical for the span).
    static LinearCode from_spanning(const BitMatrix& spanning) {
        LinearCode c;
        c.generator_ = col_echelon_reduce(spanning).reduced;
        c.length_ = spanning.row_count();
        return c;
    }

    const BitMatrix& generator() const { return generator_; }
    std::size_t length() const { return length_; }
    std::size_t rank() const { return generator_.col_count(); }

  private:
    BitMatrix generator_;
    std::size_t length_ = 0;
};

/// counts[w] = number of codewords of Hamming weight w, 0 <= w <= length.
struct WeightDistribution {
    std::size_t length = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (std::uint64_t c : counts) {
            t += c;
        }
        return t;
    }
};

inline bool is_odd_prime(std::uint64_t q) {
    if (q < 3 || q % 2 == 0) {
        return false;
    }
    for (std::uint64_t d = 3; d * d <= q; d += 2) {
        if (q % d == 0) {
            return false;
        }
    }
    return true;
}

/// 1 iff j is a nonzero quadratic residue mod q, i.e. j^((q-1)/2) = 1 mod q.
inline int legendre_indicator(std::uint64_t j, std::uint64_t q) {
    if (!is_odd_prime(q)) {
        throw std::invalid_argument("legendre_indicator: q must be an odd prime");
    }
    if (j < 1 || j > q - 1) {
        throw std::invalid_argument("legendre_indicator: need 1 <= j <= q-1");
    }
    std::uint64_t result = 1;
    std::uint64_t base = j % q;
    std::uint64_t e = (q - 1) / 2;
    while (e > 0) {
        if (e & 1) {
            result = static_cast<std::uint64_t>((static_cast<unsigned __int128>(result) * base) % q);
        }
        base = static_cast<std::uint64_t>((static_cast<unsigned __int128>(base) * base) % q);
        e >>= 1;
    }
    return result == 1 ? 1 : 0;
}

/// The length-q quadratic residue code, built by stacking all q cyclic
/// rotations of the Legendre indicator word and reducing. Requires q prime
/// with q+1 divisible by 8; the rank is checked to equal (q+1)/2.
inline LinearCode qr_code(std::uint64_t q) {
    if (!is_odd_prime(q) || (q + 1) % 8 != 0) {
        throw std::invalid_argument(
            "qr_code: q must be prime with q+1 divisible by 8 (invalid challenge parameter)");
    }
    BitVector word(q);
    for (std::uint64_t j = 1; j < q; j++) {
        if (legendre_indicator(j, q)) {
            word.set(j, true);
        }
    }
    BitMatrix rotations(q, q);
    for (std::uint64_t c = 0; c < q; c++) {
        for (std::uint64_t r = 0; r < q; r++) {
            if (word.get((r + q - c) % q)) {
                rotations.set(r, c, true);
            }
        }
    }
    LinearCode code = LinearCode::from_spanning(rotations);
    if (code.rank() != (q + 1) / 2) {
        throw std::logic_error("qr_code: rank is not (q+1)/2");
    }
    return code;
}

/// Exact codeword weight counts by Gray-code enumeration of the 2^rank span.
inline WeightDistribution weight_distribution(const LinearCode& code,
                                              unsigned cap = kDefaultEnumCap) {
    if (code.rank() > cap) {
        throw InfeasibleError("weight enumeration infeasible: rank " +
                              std::to_string(code.rank()) + " exceeds cap " + std::to_string(cap));
    }
    WeightDistribution wd;
    wd.length = code.length();
    wd.counts.assign(code.length() + 1, 0);
    std::vector<BitVector> basis;
    basis.reserve(code.rank());
    for (std::size_t j = 0; j < code.rank(); j++) {
        basis.push_back(code.generator().column(j));
    }
    BitVector current(code.length());
    wd.counts[0]++;
    std::uint64_t total = std::uint64_t{1} << code.rank();
    for (std::uint64_t i = 1; i < total; i++) {
        current ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
        wd.counts[current.weight()]++;
    }
    return wd;
}

/// WEP_C(x, y) = sum over codewords of x^wt(c) · y^(length - wt(c)).
inline std::complex<double> wep_eval(const LinearCode& code, std::complex<double> x,
                                     std::complex<double> y, unsigned cap = kDefaultEnumCap) {
    WeightDistribution wd = weight_distribution(code, cap);
    std::size_t k = wd.length;
    std::vector<std::complex<double>> xpow(k + 1), ypow(k + 1);
    xpow[0] = ypow[0] = 1.0;
    for (std::size_t i = 1; i <= k; i++) {
        xpow[i] = xpow[i - 1] * x;
        ypow[i] = ypow[i - 1] * y;
    }
    std::complex<double> acc = 0.0;
    for (std::size_t w = 0; w <= k; w++) {
        if (wd.counts[w] != 0) {
            acc += static_cast<double>(wd.counts[w]) * xpow[w] * ypow[k - w];
        }
    }
    return acc;
}

/// Every codeword weight is a multiple of 4.
inline bool is_doubly_even(const LinearCode& code, unsigned cap = kDefaultEnumCap) {
    WeightDistribution wd = weight_distribution(code, cap);
    for (std::size_t w = 0; w <= wd.length; w++) {
        if (wd.counts[w] != 0 && w % 4 != 0) {
            return false;
        }
    }
    return true;
}

/// Self-duality via generator orthogonality plus rank = length/2; no
/// enumeration needed.
inline bool is_self_dual(const LinearCode& code) {
    if (code.length() % 2 != 0 || code.rank() != code.length() / 2) {
        return false;
    }
    std::vector<BitVector> basis;
    for (std::size_t j = 0; j < code.rank(); j++) {
        basis.push_back(code.generator().column(j));
    }
    for (std::size_t i = 0; i < basis.size(); i++) {
        for (std::size_t j = i; j < basis.size(); j++) {
            if (basis[i].dot(basis[j])) {
                return false;
            }
        }
    }
    return true;
}

/// rank over GF(2) of MᵀM, the quadratic-form rank of the row set of M.
inline std::size_t quadratic_form_rank(const BitMatrix& m) {
    std::size_t n = m.col_count();
    std::vector<BitVector> cols;
    cols.reserve(n);
    for (std::size_t j = 0; j < n; j++) {
        cols.push_back(m.column(j));
    }
    BitMatrix gram(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = i; j < n; j++) {
            if (cols[i].dot(cols[j])) {
                gram.set(i, j, true);
                gram.set(j, i, true);
            }
        }
    }
    return rank(gram);
}

}  // namespace iqp
