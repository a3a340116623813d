#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "iqp/cheat.hpp"
#include "iqp/codes.hpp"
#include "iqp/errors.hpp"
#include "iqp/gf2.hpp"
#include "iqp/rng.hpp"
#include "iqp/simulator.hpp"
#include "iqp/textio.hpp"
#include "iqp/xprogram.hpp"

namespace iqp {

/// What Alice publishes: the obfuscated matrix plus declared parameters.
struct Challenge {
    BitMatrix matrix;
    Action theta{1, 8};
    std::uint64_t q = 0;
    std::string challenge_id;
};

/// What Alice keeps: the hidden direction, where the obfuscation rows ended
/// up, and the seed that reproduces everything.
struct Secret {
    BitVector s;
    std::vector<std::size_t> obf_rows;
    std::uint64_t seed = 0;
    std::uint64_t q = 0;
};

enum class ProverTag { honest, cheat, external };

struct ProofTranscript {
    SampleSet samples;
    ProverTag tag = ProverTag::external;
};

enum class Decision { accept, reject, inconclusive };

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::accept:
            return "Accept";
        case Decision::reject:
            return "Reject";
        default:
            return "Inconclusive";
    }
}

struct VerifyParams {
    double threshold = 0.0;
    std::size_t m_min = 1;
};

struct VerifyReport {
    std::size_t m_raw = 0;
    std::size_t m_filtered = 0;
    double bias_observed = 0.0;
    double threshold = 0.0;
    std::size_t m_min = 0;
    Decision decision = Decision::inconclusive;
};

/// Threshold at the midpoint of the quantum/classical bias gap, and the
/// Hoeffding sample floor making both error probabilities at most delta.
inline VerifyParams default_params(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("default_params: need 0 < delta < 1");
    }
    double quantum = std::cos(kPi / 8) * std::cos(kPi / 8);
    double classical = 0.75;
    VerifyParams p;
    p.threshold = (quantum + classical) / 2.0;
    double eps = p.threshold - classical;
    double m = std::ceil(std::log(1.0 / delta) / (2.0 * eps * eps));
    p.m_min = m < 1.0 ? 1 : static_cast<std::size_t>(m);
    return p;
}

/// Runs the obfuscation recipe: QR generator, appended all-ones column,
/// n_obf random rows orthogonal to the hidden direction, row shuffle,
/// canonical column reduction (tracking the transform so the secret follows),
/// then a final row sort. Deterministic in the seed.
inline std::pair<Challenge, Secret> build_challenge(std::uint64_t q, std::size_t n_obf,
                                                    std::uint64_t seed) {
    if (n_obf < 1) {
        throw std::invalid_argument("build_challenge: n_obf must be >= 1");
    }
    LinearCode code = qr_code(q);  // rejects invalid q
    std::size_t r = code.rank();
    std::size_t cols = r + 1;

    // QR basis plus a column of 1s (the all-ones word is always a codeword,
    // so the span is unchanged; the column marks the causal rows for s).
    BitMatrix m(q, cols);
    for (std::size_t i = 0; i < q; i++) {
        for (std::size_t j = 0; j < r; j++) {
            if (code.generator().get(i, j)) {
                m.set(i, j, true);
            }
        }
        m.set(i, r, true);
    }

    Rng rng(seed);
    std::vector<bool> is_obf(q, false);
    for (std::size_t i = 0; i < n_obf; i++) {
        BitVector row(cols);
        do {
            for (std::size_t j = 0; j + 1 < cols; j++) {
                row.set(j, rng.next_u64() & 1);
            }
        } while (row.is_zero());  // zero rows are inert program elements
        m.append_row(row);
        is_obf.push_back(true);
    }

    std::vector<std::size_t> perm = random_permutation(m.row_count(), rng);
    BitMatrix shuffled(0, cols);
    std::vector<bool> shuffled_obf(m.row_count());
    for (std::size_t i = 0; i < m.row_count(); i++) {
        shuffled.append_row(m.row(perm[i]));
        shuffled_obf[i] = is_obf[perm[i]];
    }

    ColEchelonResult reduction = col_echelon_reduce(shuffled);
    std::size_t published_cols = reduction.reduced.col_count();
    // The secret starts as the unit vector selecting the appended column and
    // follows the column action: solve transform·x = e_last, keep the
    // coordinates of the surviving columns.
    BitVector e_last(cols);
    e_last.set(cols - 1, true);
    auto x = solve_linear(reduction.transform, e_last);
    if (!x.has_value()) {
        throw std::logic_error("build_challenge: reduction transform not invertible");
    }
    BitVector s(published_cols);
    for (std::size_t j = 0; j < published_cols; j++) {
        s.set(j, x->get(j));
    }

    // Final row sort (canonical output files), carrying the obfuscation flags.
    std::vector<std::size_t> order(reduction.reduced.row_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return BitVector::lex_less(reduction.reduced.row(a), reduction.reduced.row(b));
    });
    BitMatrix published(0, published_cols);
    std::vector<std::size_t> obf_rows;
    for (std::size_t i = 0; i < order.size(); i++) {
        published.append_row(reduction.reduced.row(order[i]));
        if (shuffled_obf[order[i]]) {
            obf_rows.push_back(i);
        }
    }

    for (std::size_t i = 0; i < published.row_count(); i++) {
        bool obf = std::binary_search(obf_rows.begin(), obf_rows.end(), i);
        if (published.row(i).dot(s) != (obf ? 0 : 1)) {
            throw std::logic_error("build_challenge: secret consistency check failed");
        }
    }

    char idbuf[64];
    std::snprintf(idbuf, sizeof idbuf, "q%llu-%016llx", static_cast<unsigned long long>(q),
                  static_cast<unsigned long long>(seed));
    Challenge ch{published, Action(1, 8), q, idbuf};
    Secret sec{s, std::move(obf_rows), seed, q};
    return {std::move(ch), std::move(sec)};
}

/// Bob with a real oracle: samples the published program at θ = π/8.
inline ProofTranscript honest_prove(const Challenge& ch, std::size_t m, Rng& rng,
                                    const SimLimits& limits = {}) {
    ConstantActionProgram prog{ch.matrix, ch.theta};
    std::size_t n = ch.matrix.col_count();
    std::size_t k = ch.matrix.row_count();
    if (n > limits.fourier_max_qubits && k > limits.pathsum_max_elements) {
        throw InfeasibleError("honest proving infeasible at this size: n = " + std::to_string(n) +
                              ", k = " + std::to_string(k));
    }
    return {sample(prog, m, rng, limits), ProverTag::honest};
}

/// Bob without one: the second-derivative sampler, feasible at every q.
inline ProofTranscript cheat_prove(const Challenge& ch, std::size_t m, Rng& rng) {
    return {cheat_sample(ch.matrix, m, rng), ProverTag::cheat};
}

/// Alice's hypothesis test: drop zero samples, deduplicate keeping first
/// occurrences, then demand a strong bias in the secret direction over a
/// large enough surviving sample.
inline VerifyReport verify(const Challenge& ch, const Secret& secret,
                           const ProofTranscript& transcript, const VerifyParams& params) {
    std::size_t n = ch.matrix.col_count();
    VerifyReport report;
    report.m_raw = transcript.samples.samples.size();
    report.threshold = params.threshold;
    report.m_min = params.m_min;
    std::unordered_set<BitVector, BitVectorHash> seen;
    std::size_t orthogonal = 0;
    for (const BitVector& x : transcript.samples.samples) {
        if (x.size() != n) {
            throw std::invalid_argument("malformed transcript: sample width " +
                                        std::to_string(x.size()) + " does not match challenge");
        }
        if (x.is_zero()) {
            continue;
        }
        if (!seen.insert(x).second) {
            continue;
        }
        if (x.dot(secret.s) == 0) {
            orthogonal++;
        }
    }
    report.m_filtered = seen.size();
    report.bias_observed =
        report.m_filtered == 0
            ? 0.0
            : static_cast<double>(orthogonal) / static_cast<double>(report.m_filtered);
    if (report.m_filtered < params.m_min) {
        report.decision = Decision::inconclusive;
    } else if (report.bias_observed >= params.threshold) {
        report.decision = Decision::accept;
    } else {
        report.decision = Decision::reject;
    }
    return report;
}

// --- file formats ---

inline void write_challenge(std::ostream& out, const Challenge& ch) {
    write_matrix_text(out,
                      {{"theta", ch.theta.to_string()},
                       {"q", std::to_string(ch.q)},
                       {"challenge_id", ch.challenge_id}},
                      ch.matrix);
}

inline Challenge read_challenge(std::istream& in) {
    MatrixText mt = read_matrix_text(in);
    const std::string* theta = mt.header("theta");
    const std::string* q = mt.header("q");
    if (theta == nullptr || q == nullptr) {
        throw ParseError("challenge file needs theta and q headers");
    }
    Challenge ch;
    ch.matrix = mt.matrix;
    ch.theta = Action::parse(*theta);
    ch.q = std::stoull(*q);
    if (const std::string* id = mt.header("challenge_id")) {
        ch.challenge_id = *id;
    }
    return ch;
}

inline void write_secret(std::ostream& out, const Secret& sec) {
    char seedbuf[32];
    std::snprintf(seedbuf, sizeof seedbuf, "0x%016llx", static_cast<unsigned long long>(sec.seed));
    out << "# q=" << sec.q << "\n";
    out << "# seed=" << seedbuf << "\n";
    out << sec.s.to_string() << "\n";
    for (std::size_t i = 0; i < sec.obf_rows.size(); i++) {
        out << (i == 0 ? "" : ",") << sec.obf_rows[i];
    }
    out << "\n";
}

inline Secret read_secret(std::istream& in) {
    Secret sec;
    std::string line;
    bool have_s = false;
    bool have_rows = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.starts_with("#")) {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') {
                body.erase(0, 1);
            }
            std::size_t eq = body.find('=');
            if (eq == std::string::npos) {
                throw ParseError("secret file: header is not key=value");
            }
            std::string key = body.substr(0, eq);
            std::string value = body.substr(eq + 1);
            if (key == "q") {
                sec.q = std::stoull(value);
            } else if (key == "seed") {
                sec.seed = std::stoull(value, nullptr, 0);
            }
            continue;
        }
        if (!have_s) {
            sec.s = BitVector::from_string(line);
            have_s = true;
        } else if (!have_rows) {
            std::istringstream fields(line);
            std::string field;
            while (std::getline(fields, field, ',')) {
                sec.obf_rows.push_back(std::stoull(field));
            }
            have_rows = true;
        } else {
            throw ParseError("secret file: unexpected extra line");
        }
    }
    if (!have_s || !have_rows) {
        throw ParseError("secret file: missing s line or obfuscation index line");
    }
    return sec;
}

inline void write_transcript(std::ostream& out, const SampleSet& samples) {
    for (const BitVector& x : samples.samples) {
        out << x.to_string() << "\n";
    }
}

inline SampleSet read_transcript(std::istream& in) {
    SampleSet out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("#")) {
            continue;
        }
        for (char c : line) {
            if (c != '0' && c != '1') {
                throw ParseError("transcript: sample line contains a character outside {0,1}");
            }
        }
        BitVector v = BitVector::from_string(line);
        if (first) {
            out.n = v.size();
            first = false;
        } else if (v.size() != out.n) {
            throw ParseError("transcript: ragged sample line");
        }
        out.samples.push_back(std::move(v));
    }
    return out;
}

}  // namespace iqp
