#pragma once

#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/textio.hpp"

namespace iqp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// An action angle, stored exactly as (num/den)·π in lowest terms with
/// den >= 1. Exactness matters: the special-case classification below is
/// modular arithmetic on θ/π and must not go through floating point.
class Action {
  public:
    Action() : num_(0), den_(1) {}
    Action(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) {
            throw std::invalid_argument("Action: zero denominator");
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) {
            den_ = 1;
        }
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double radians() const { return kPi * static_cast<double>(num_) / static_cast<double>(den_); }

    Action negated() const { return Action(-num_, den_); }

    bool operator==(const Action&) const = default;

    std::string to_string() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    static Action parse(const std::string& text) {
        std::size_t slash = text.find('/');
        if (slash == std::string::npos) {
            throw ParseError("malformed action '" + text + "': expected <num>/<den>");
        }
        try {
            std::int64_t num = std::stoll(text.substr(0, slash));
            std::int64_t den = std::stoll(text.substr(slash + 1));
            return Action(num, den);
        } catch (const std::exception&) {
            throw ParseError("malformed action '" + text + "'");
        }
    }

  private:
    std::int64_t num_;
    std::int64_t den_;
};

struct XProgramElement {
    Action theta;
    BitVector row;
};

/// The general X-program: an unordered bag of (θ, p) Hamiltonian terms on n
/// qubits. Duplicate rows are legal and preserved.
struct XProgram {
    std::size_t n = 0;
    std::vector<XProgramElement> elements;

    bool constant_action() const {
        for (std::size_t i = 1; i < elements.size(); i++) {
            if (!(elements[i].theta == elements[0].theta)) {
                return false;
            }
        }
        return true;
    }
};

/// The constant-θ special case, represented as a matrix plus one angle.
struct ConstantActionProgram {
    BitMatrix matrix;
    Action theta;

    XProgram to_xprogram() const {
        XProgram p;
        p.n = matrix.col_count();
        p.elements.reserve(matrix.row_count());
        for (std::size_t i = 0; i < matrix.row_count(); i++) {
            p.elements.push_back({theta, matrix.row(i)});
        }
        return p;
    }
};

/// P_s: the rows of P that are not orthogonal to s.
inline BitMatrix submatrix_ps(const BitMatrix& p, const BitVector& s) {
    if (s.size() != p.col_count()) {
        throw std::invalid_argument("submatrix_ps: direction length mismatch");
    }
    BitMatrix out(0, p.col_count());
    for (std::size_t i = 0; i < p.row_count(); i++) {
        if (p.row(i).dot(s)) {
            out.append_row(p.row(i));
        }
    }
    return out;
}

enum class SpecialKind {
    always_zero,     // θ ≡ 0 (mod π): sample is always 0
    always_row_sum,  // θ odd multiple of π/2: sample is always the XOR of rows
    clifford,        // θ odd multiple of π/4: stabilizer-simulable
    generic,
};

struct SpecialCase {
    SpecialKind kind = SpecialKind::generic;
    BitVector row_sum;  // set for always_row_sum
};

/// Exact classification of the trivial / Clifford action values. In lowest
/// terms, θ = (num/den)π is a multiple of π iff den=1, an odd multiple of
/// π/2 iff den=2, and an odd multiple of π/4 iff den=4.
inline SpecialCase classify_special(const ConstantActionProgram& prog) {
    SpecialCase out;
    switch (prog.theta.den()) {
        case 1:
            out.kind = SpecialKind::always_zero;
            break;
        case 2:
            out.kind = SpecialKind::always_row_sum;
            out.row_sum = prog.matrix.row_sum();
            break;
        case 4:
            out.kind = SpecialKind::clifford;
            break;
        default:
            out.kind = SpecialKind::generic;
            break;
    }
    return out;
}

/// Block-diagonal concatenation: the output distribution is the product of
/// the two marginals.
inline ConstantActionProgram concat_diagonal(const ConstantActionProgram& a,
                                             const ConstantActionProgram& b) {
    if (!(a.theta == b.theta)) {
        throw std::invalid_argument("concat_diagonal: mismatched theta");
    }
    std::size_t n = a.matrix.col_count() + b.matrix.col_count();
    BitMatrix m(a.matrix.row_count() + b.matrix.row_count(), n);
    for (std::size_t i = 0; i < a.matrix.row_count(); i++) {
        for (std::size_t j = 0; j < a.matrix.col_count(); j++) {
            if (a.matrix.get(i, j)) {
                m.set(i, j, true);
            }
        }
    }
    for (std::size_t i = 0; i < b.matrix.row_count(); i++) {
        for (std::size_t j = 0; j < b.matrix.col_count(); j++) {
            if (b.matrix.get(i, j)) {
                m.set(a.matrix.row_count() + i, a.matrix.col_count() + j, true);
            }
        }
    }
    return {m, a.theta};
}

// X-program file = matrix text format with a mandatory "# theta=<num>/<den>"
// header (units of π).

inline ConstantActionProgram parse_program(std::istream& in) {
    MatrixText mt = read_matrix_text(in);
    const std::string* theta = mt.header("theta");
    if (theta == nullptr) {
        throw ParseError("missing mandatory theta header");
    }
    return {mt.matrix, Action::parse(*theta)};
}

inline ConstantActionProgram parse_program(const std::string& text) {
    std::istringstream in(text);
    return parse_program(in);
}

inline void serialize_program(std::ostream& out, const ConstantActionProgram& prog) {
    write_matrix_text(out, {{"theta", prog.theta.to_string()}}, prog.matrix);
}

inline std::string serialize_program(const ConstantActionProgram& prog) {
    std::ostringstream out;
    serialize_program(out, prog);
    return out.str();
}

}  // namespace iqp
