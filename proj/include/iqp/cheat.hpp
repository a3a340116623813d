#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/rng.hpp"
#include "iqp/simulator.hpp"
#include "iqp/xprogram.hpp"

namespace iqp {

// Classical approximation machinery for the θ = π/8 case. Everything here is
// mod-16 arithmetic on the phase function f(a) = Σ_p (-1)^{p·aᵀ} and the
// second-order directional derivatives it admits.

/// f(a) = Σ_p (-1)^{p·aᵀ} mod 16, computed as k - 2·wt(P·aᵀ).
inline int f_eval(const BitMatrix& p, const BitVector& a) {
    auto k = static_cast<std::int64_t>(p.row_count());
    auto w = static_cast<std::int64_t>(p.mul_vec(a).weight());
    std::int64_t v = (k - 2 * w) % 16;
    return static_cast<int>(v < 0 ? v + 16 : v);
}

/// f_d(a) = f(a) - f(a ⊕ d) mod 16.
inline int f_derivative(const BitMatrix& p, const BitVector& a, const BitVector& d) {
    int v = (f_eval(p, a) - f_eval(p, a ^ d)) % 16;
    return v < 0 ? v + 16 : v;
}

/// Second derivative by definition: f_e(a) - f_e(a ⊕ d) mod 16.
inline int f_second_derivative_by_differencing(const BitMatrix& p, const BitVector& a,
                                               const BitVector& d, const BitVector& e) {
    int v = (f_derivative(p, a, e) - f_derivative(p, a ^ d, e)) % 16;
    return v < 0 ? v + 16 : v;
}

/// Second derivative by the closed form: Σ over rows of P_d ∩ P_e of
/// (4 + 8·Σ_{j: p_j=1} a_j) mod 16. Must agree with the differencing route.
inline int f_second_derivative(const BitMatrix& p, const BitVector& a, const BitVector& d,
                               const BitVector& e) {
    int acc = 0;
    for (std::size_t i = 0; i < p.row_count(); i++) {
        const BitVector& row = p.row(i);
        if (row.dot(d) && row.dot(e)) {
            acc = (acc + 4 + 8 * row.dot(a)) % 16;
        }
    }
    return acc;
}

/// Lemma-4 route to the bias: E_a[cos²((π/8)·f_s(a))] by brute force over
/// all 2^n values of a. Must agree with exact_bias at θ = π/8.
inline double bias_from_f(const BitMatrix& p, const BitVector& s, unsigned max_qubits = 24) {
    std::size_t n = p.col_count();
    if (n > max_qubits) {
        throw InfeasibleError("bias_from_f infeasible: n = " + std::to_string(n) +
                              " exceeds cap " + std::to_string(max_qubits));
    }
    if (s.size() != n) {
        throw std::invalid_argument("bias_from_f: direction length mismatch");
    }
    std::size_t k = p.row_count();
    std::vector<BitVector> cols(n, BitVector(k));
    for (std::size_t i = 0; i < k; i++) {
        for (std::size_t j = 0; j < n; j++) {
            if (p.row(i).get(j)) {
                cols[j].set(i, true);
            }
        }
    }
    // (1 + cos((π/8)·v))/2 = cos²((π/16)·v) for v mod 16, exact at the
    // quarter-turn entries. f_s(a) = 2·Σ_{p∈P_s}(-1)^{p·aᵀ}, so this is the
    // same summand as the Theorem-1 form cos²(θ(n_s - 2·wt)).
    double table[16];
    for (int v = 0; v < 16; v++) {
        double c = detail::unit_phase(1, 16, v).real();
        table[v] = c * c;
    }
    // f_s(a) = 2(wt(P·(a⊕s)ᵀ) - wt(P·aᵀ)); walk both y vectors in Gray order.
    BitVector y1(k);
    BitVector y2 = p.mul_vec(s);
    double acc = 0.0;
    std::uint64_t size = std::uint64_t{1} << n;
    for (std::uint64_t idx = 0; idx < size; idx++) {
        if (idx != 0) {
            const BitVector& col = cols[static_cast<std::size_t>(std::countr_zero(idx))];
            y1 ^= col;
            y2 ^= col;
        }
        std::int64_t fs = 2 * (static_cast<std::int64_t>(y2.weight()) -
                               static_cast<std::int64_t>(y1.weight()));
        int v = static_cast<int>(((fs % 16) + 16) % 16);
        acc += table[v];
    }
    return acc / static_cast<double>(size);
}

inline BitVector cheat_draw(const BitMatrix& p, Rng& rng) {
    std::size_t n = p.col_count();
    BitVector d(n);
    BitVector e(n);
    for (std::size_t j = 0; j < n; j++) {
        std::uint64_t bits = rng.next_u64();
        d.set(j, bits & 1);
        e.set(j, (bits >> 1) & 1);
    }
    BitVector y(n);
    for (std::size_t i = 0; i < p.row_count(); i++) {
        const BitVector& row = p.row(i);
        if (row.dot(d) && row.dot(e)) {
            y ^= row;
        }
    }
    return y;
}

/// The classically samplable variable Y: draw d, e uniformly, return the XOR
/// of all rows not orthogonal to both. Runs at any size; this is the whole
/// point of the strategy.
inline SampleSet cheat_sample(const BitMatrix& p, std::size_t m, Rng& rng) {
    SampleSet out;
    out.n = p.col_count();
    out.samples.reserve(m);
    for (std::size_t i = 0; i < m; i++) {
        out.samples.push_back(cheat_draw(p, rng));
    }
    return out;
}

/// P(Y·sᵀ = 0) in closed form: (1 + 2^{-rank(P_sᵀ·P_s)})/2.
inline double classical_bias_exact(const BitMatrix& p, const BitVector& s) {
    std::size_t r = quadratic_form_rank(submatrix_ps(p, s));
    return 0.5 * (1.0 + std::ldexp(1.0, -static_cast<int>(r)));
}

/// m constraint rows Σ_{p ∈ P_d ∩ P_e} p for fresh random (d, e); when the
/// quantum bias in s is exactly 1, s lies in the kernel of this matrix.
inline BitMatrix attack_linear_system(const BitMatrix& p, std::size_t m, Rng& rng) {
    BitMatrix out(0, p.col_count());
    for (std::size_t i = 0; i < m; i++) {
        out.append_row(cheat_draw(p, rng));
    }
    return out;
}

/// (quantum bias == 1, classical bias == 1), evaluated exactly. The forward
/// implication must never be violated; the converse can fail when P_s has
/// repeated rows.
inline std::pair<bool, bool> check_theorem2(const BitMatrix& p, const BitVector& s,
                                            unsigned enumeration_cap = kDefaultEnumCap) {
    double qbias = exact_bias({p, Action(1, 8)}, s, enumeration_cap);
    bool quantum_one = std::abs(qbias - 1.0) < 1e-12;
    bool classical_one = quadratic_form_rank(submatrix_ps(p, s)) == 0;
    return {quantum_one, classical_one};
}

}  // namespace iqp
