#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/rng.hpp"
#include "iqp/xprogram.hpp"

namespace iqp {

struct SimLimits {
    unsigned fourier_max_qubits = 24;   // 2^n state vector
    unsigned pathsum_max_elements = 20; // 2^k paths
    unsigned enumeration_cap = kDefaultEnumCap;
};

namespace detail {

// e^{iπ·num·j/den}, exact at quarter turns so that the θ ∈ {π, π/2, ...}
// cases produce bit-exact point masses instead of 1e-16 dust.
inline std::complex<double> unit_phase(std::int64_t num, std::int64_t den, std::int64_t j) {
    __int128 t128 = static_cast<__int128>(num) * j % (2 * static_cast<__int128>(den));
    auto t = static_cast<std::int64_t>(t128);
    if (t < 0) {
        t += 2 * den;
    }
    if (2 * t == 0) {
        return {1.0, 0.0};
    }
    if (2 * t == den) {
        return {0.0, 1.0};
    }
    if (t == den) {
        return {-1.0, 0.0};
    }
    if (2 * t == 3 * den) {
        return {0.0, -1.0};
    }
    double angle = kPi * static_cast<double>(t) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

inline std::complex<double> unit_phase(const Action& theta, std::int64_t j) {
    return unit_phase(theta.num(), theta.den(), j);
}

}  // namespace detail

/// Exact output distribution over F2^n, indexed by x = Σ x_i · 2^i.
class OutputDistribution {
  public:
    OutputDistribution() = default;

    /// Normalizes and stores; the pre-normalization total must already be
    /// within 1e-9 of 1.
    static OutputDistribution from_probs(std::size_t n, std::vector<double> probs) {
        if (probs.size() != (std::size_t{1} << n)) {
            throw std::invalid_argument("OutputDistribution: wrong vector size");
        }
        double total = 0.0;
        for (double p : probs) {
            if (p < 0.0) {
                throw std::logic_error("OutputDistribution: negative probability");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::logic_error("OutputDistribution: total deviates from 1 by more than 1e-9");
        }
        for (double& p : probs) {
            p /= total;
        }
        OutputDistribution d;
        d.n_ = n;
        d.probs_ = std::move(probs);
        return d;
    }

    std::size_t qubits() const { return n_; }
    std::size_t size() const { return probs_.size(); }
    double prob(std::uint64_t x) const { return probs_[x]; }
    const std::vector<double>& probs() const { return probs_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> probs_;
};

struct SampleSet {
    std::size_t n = 0;
    std::vector<BitVector> samples;
};

inline BitVector index_to_bits(std::uint64_t x, std::size_t n) {
    BitVector v(n);
    while (x != 0) {
        int i = std::countr_zero(x);
        v.set(static_cast<std::size_t>(i), true);
        x &= x - 1;
    }
    return v;
}

inline std::uint64_t bits_to_index(const BitVector& v) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < v.size(); i++) {
        if (v.get(i)) {
            x |= std::uint64_t{1} << i;
        }
    }
    return x;
}

/// In-place unnormalized Walsh-Hadamard transform (size must be a power of 2).
template <typename T>
inline void fwht_inplace(std::vector<T>& a) {
    for (std::size_t h = 1; h < a.size(); h <<= 1) {
        for (std::size_t i = 0; i < a.size(); i += h << 1) {
            for (std::size_t j = i; j < i + h; j++) {
                T x = a[j];
                T y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
    }
}

/// Primary backend. Evaluates the phase function over all of F2^n by a
/// Gray-code walk, then one Walsh-Hadamard transform; cost ~ 2^n·(k/64 + n).
/// For constant θ the phase is e^{iθ(k-2·wt(P·aᵀ))} with the integer tracked
/// exactly.
inline OutputDistribution distribution_fourier(const XProgram& prog,
                                               const SimLimits& limits = {}) {
    if (prog.n > limits.fourier_max_qubits) {
        throw InfeasibleError("state space infeasible: n = " + std::to_string(prog.n) +
                              " exceeds cap " + std::to_string(limits.fourier_max_qubits));
    }
    std::size_t n = prog.n;
    std::size_t k = prog.elements.size();
    std::size_t size = std::size_t{1} << n;
    // Columns of P as k-bit vectors: flipping bit j of a toggles P·aᵀ by col j.
    std::vector<BitVector> cols(n, BitVector(k));
    for (std::size_t i = 0; i < k; i++) {
        if (prog.elements[i].row.size() != n) {
            throw std::invalid_argument("program row width mismatch");
        }
        for (std::size_t j = 0; j < n; j++) {
            if (prog.elements[i].row.get(j)) {
                cols[j].set(i, true);
            }
        }
    }
    bool constant = prog.constant_action();
    std::vector<std::complex<double>> amp(size);
    std::vector<std::complex<double>> phase_by_weight;
    if (constant && k > 0) {
        phase_by_weight.resize(k + 1);
        for (std::size_t w = 0; w <= k; w++) {
            phase_by_weight[w] = detail::unit_phase(prog.elements[0].theta,
                                                    static_cast<std::int64_t>(k) -
                                                        2 * static_cast<std::int64_t>(w));
        }
    }
    BitVector y(k);  // P·aᵀ for the current Gray-code point
    for (std::uint64_t idx = 0; idx < size; idx++) {
        if (idx != 0) {
            y ^= cols[static_cast<std::size_t>(std::countr_zero(idx))];
        }
        std::uint64_t a = idx ^ (idx >> 1);
        if (constant) {
            amp[a] = (k == 0) ? std::complex<double>{1.0, 0.0} : phase_by_weight[y.weight()];
        } else {
            double phi = 0.0;
            for (std::size_t i = 0; i < k; i++) {
                double t = prog.elements[i].theta.radians();
                phi += y.get(i) ? -t : t;
            }
            amp[a] = {std::cos(phi), std::sin(phi)};
        }
    }
    fwht_inplace(amp);
    double scale = 1.0 / static_cast<double>(size);
    std::vector<double> probs(size);
    for (std::size_t i = 0; i < size; i++) {
        probs[i] = std::norm(amp[i] * scale);
    }
    return OutputDistribution::from_probs(n, std::move(probs));
}

inline OutputDistribution distribution_fourier(const ConstantActionProgram& prog,
                                               const SimLimits& limits = {}) {
    return distribution_fourier(prog.to_xprogram(), limits);
}

/// Independent oracle backend: sums the complex weight of all 2^k subsets of
/// program elements onto the outcome a·P (the path-sum form).
inline OutputDistribution distribution_pathsum(const XProgram& prog,
                                               const SimLimits& limits = {}) {
    std::size_t k = prog.elements.size();
    if (k > limits.pathsum_max_elements) {
        throw InfeasibleError("path sum infeasible: k = " + std::to_string(k) + " exceeds cap " +
                              std::to_string(limits.pathsum_max_elements));
    }
    if (prog.n > limits.fourier_max_qubits) {
        throw InfeasibleError("state space infeasible: n = " + std::to_string(prog.n) +
                              " exceeds cap " + std::to_string(limits.fourier_max_qubits));
    }
    std::size_t n = prog.n;
    std::size_t size = std::size_t{1} << n;
    std::vector<std::uint64_t> row_mask(k);
    std::vector<std::complex<double>> cos_term(k), isin_term(k);
    for (std::size_t i = 0; i < k; i++) {
        row_mask[i] = bits_to_index(prog.elements[i].row);
        std::complex<double> u = detail::unit_phase(prog.elements[i].theta, 1);
        cos_term[i] = {u.real(), 0.0};
        isin_term[i] = {0.0, u.imag()};
    }
    std::vector<std::complex<double>> amp(size, {0.0, 0.0});
    std::uint64_t subsets = std::uint64_t{1} << k;
    std::uint64_t x = 0;  // a·P for the current Gray-code subset
    for (std::uint64_t idx = 0; idx < subsets; idx++) {
        std::uint64_t a = idx ^ (idx >> 1);
        if (idx != 0) {
            x ^= row_mask[static_cast<std::size_t>(std::countr_zero(idx))];
        }
        std::complex<double> weight{1.0, 0.0};
        for (std::size_t i = 0; i < k; i++) {
            weight *= ((a >> i) & 1) ? isin_term[i] : cos_term[i];
        }
        amp[x] += weight;
    }
    std::vector<double> probs(size);
    for (std::size_t i = 0; i < size; i++) {
        probs[i] = std::norm(amp[i]);
    }
    return OutputDistribution::from_probs(n, std::move(probs));
}

inline OutputDistribution distribution_pathsum(const ConstantActionProgram& prog,
                                               const SimLimits& limits = {}) {
    return distribution_pathsum(prog.to_xprogram(), limits);
}

/// m inverse-CDF draws from an already-computed distribution.
inline SampleSet sample_from(const OutputDistribution& dist, std::size_t m, Rng& rng) {
    std::vector<double> cdf(dist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); i++) {
        acc += dist.prob(i);
        cdf[i] = acc;
    }
    SampleSet out;
    out.n = dist.qubits();
    out.samples.reserve(m);
    for (std::size_t i = 0; i < m; i++) {
        double u = rng.unit();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::uint64_t x = (it == cdf.end()) ? dist.size() - 1
                                            : static_cast<std::uint64_t>(it - cdf.begin());
        out.samples.push_back(index_to_bits(x, dist.qubits()));
    }
    return out;
}

/// m draws from the program's exact distribution, using whichever backend
/// fits (Fourier first, path sum as fallback).
inline SampleSet sample(const XProgram& prog, std::size_t m, Rng& rng,
                        const SimLimits& limits = {}) {
    if (prog.n <= limits.fourier_max_qubits) {
        return sample_from(distribution_fourier(prog, limits), m, rng);
    }
    return sample_from(distribution_pathsum(prog, limits), m, rng);
}

inline SampleSet sample(const ConstantActionProgram& prog, std::size_t m, Rng& rng,
                        const SimLimits& limits = {}) {
    return sample(prog.to_xprogram(), m, rng, limits);
}

/// P(X·sᵀ = 0) summed directly from an explicit distribution.
inline double distribution_bias(const OutputDistribution& dist, const BitVector& s) {
    std::uint64_t mask = bits_to_index(s);
    double acc = 0.0;
    for (std::uint64_t x = 0; x < dist.size(); x++) {
        if ((std::popcount(x & mask) & 1) == 0) {
            acc += dist.prob(x);
        }
    }
    return acc;
}

/// P(X·sᵀ = 0) from the weight distribution of the code spanned by the
/// columns of P_s: E over codewords of cos²(θ(n_s - 2·wt(c))). Needs no
/// 2^n state, only 2^rank codeword enumeration.
inline double exact_bias(const ConstantActionProgram& prog, const BitVector& s,
                         unsigned enumeration_cap = kDefaultEnumCap) {
    BitMatrix ps = submatrix_ps(prog.matrix, s);
    auto ns = static_cast<std::int64_t>(ps.row_count());
    LinearCode code = LinearCode::from_spanning(ps);
    WeightDistribution wd = weight_distribution(code, enumeration_cap);
    double acc = 0.0;
    for (std::size_t w = 0; w <= wd.length; w++) {
        if (wd.counts[w] == 0) {
            continue;
        }
        double c = detail::unit_phase(prog.theta, ns - 2 * static_cast<std::int64_t>(w)).real();
        acc += static_cast<double>(wd.counts[w]) * c * c;
    }
    return acc / static_cast<double>(wd.total());
}

/// S2 = -log2 Σ_x P(x)².
inline double collision_entropy(const OutputDistribution& dist) {
    double acc = 0.0;
    for (double p : dist.probs()) {
        acc += p * p;
    }
    return -std::log2(acc) + 0.0;  // +0.0 canonicalizes -0.0
}

/// Same quantity via E_s[(2·P(X·sᵀ=0) - 1)²], evaluated for all 2^n
/// directions with a second Walsh-Hadamard transform; must agree with
/// collision_entropy.
inline double collision_entropy_via_bias(const OutputDistribution& dist) {
    std::vector<double> spectrum = dist.probs();
    fwht_inplace(spectrum);  // spectrum[s] = Σ_x (-1)^{x·s} P(x) = 2·bias(s) - 1
    double acc = 0.0;
    for (double v : spectrum) {
        acc += v * v;
    }
    acc /= static_cast<double>(dist.size());
    return -std::log2(acc) + 0.0;
}

inline double total_variation(const OutputDistribution& a, const OutputDistribution& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("total_variation: size mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        acc += std::abs(a.prob(i) - b.prob(i));
    }
    return acc / 2.0;
}

/// Binary export: 8-byte little-endian count, then count little-endian doubles.
inline void write_distribution_bin(std::ostream& out, const OutputDistribution& dist) {
    auto put_u64 = [&out](std::uint64_t v) {
        for (int i = 0; i < 8; i++) {
            out.put(static_cast<char>((v >> (8 * i)) & 0xff));
        }
    };
    put_u64(dist.size());
    for (double p : dist.probs()) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(p);
        put_u64(bits);
    }
}

/// CSV export: "bitstring,probability", one outcome per line, ascending index.
inline void write_distribution_csv(std::ostream& out, const OutputDistribution& dist) {
    for (std::uint64_t x = 0; x < dist.size(); x++) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", dist.prob(x));
        out << index_to_bits(x, dist.qubits()).to_string() << "," << buf << "\n";
    }
}

}  // namespace iqp
