#include "iqp/protocol.hpp"

#include <algorithm>
#include <sstream>

#include "gtest/gtest.h"
#include "iqp/cheat.hpp"
#include "test_helpers.hpp"

namespace iqp {
namespace {

constexpr double kCos2Pi8 = 0.8535533905932737;

TEST(DefaultParams, HoeffdingFloor) {
    VerifyParams p = default_params(1e-3);
    EXPECT_NEAR(p.threshold, 0.8017766952966369, 1e-15);
    // ceil(ln(1000) / (2·((√2-1)/8)²)) = ceil(1288.363...) = 1289
    EXPECT_EQ(p.m_min, 1289u);

    EXPECT_EQ(default_params(0.5).m_min, 130u);
    EXPECT_GE(default_params(0.999999).m_min, 1u);
    EXPECT_THROW(default_params(0.0), std::invalid_argument);
    EXPECT_THROW(default_params(1.0), std::invalid_argument);
}

TEST(BuildChallenge, Q7RecipeProducesTheQrSubmatroid) {
    auto [challenge, secret] = build_challenge(7, 7, 12345);
    EXPECT_EQ(challenge.matrix.row_count(), 14u);
    EXPECT_EQ(challenge.q, 7u);
    EXPECT_EQ(secret.q, 7u);
    EXPECT_EQ(secret.seed, 12345u);
    EXPECT_EQ(secret.obf_rows.size(), 7u);

    BitMatrix ps = submatrix_ps(challenge.matrix, secret.s);
    ASSERT_EQ(ps.row_count(), 7u);
    WeightDistribution wd = weight_distribution(LinearCode::from_spanning(ps));
    EXPECT_EQ(wd.counts, (std::vector<std::uint64_t>{1, 0, 0, 7, 7, 0, 0, 1}));

    EXPECT_NEAR(exact_bias({challenge.matrix, challenge.theta}, secret.s), kCos2Pi8, 1e-14);
    EXPECT_EQ(classical_bias_exact(challenge.matrix, secret.s), 0.75);
}

TEST(BuildChallenge, SecretConsistencyAndRankBound) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto [challenge, secret] = build_challenge(23, 23, seed);
        ASSERT_EQ(challenge.matrix.row_count(), 46u);
        ASSERT_LE(challenge.matrix.col_count(), 13u);
        ASSERT_EQ(rank(challenge.matrix), challenge.matrix.col_count());
        for (std::size_t i = 0; i < challenge.matrix.row_count(); i++) {
            bool is_obf = std::binary_search(secret.obf_rows.begin(), secret.obf_rows.end(), i);
            ASSERT_EQ(challenge.matrix.row(i).dot(secret.s), is_obf ? 0 : 1)
                << "seed " << seed << " row " << i;
        }
        // rows are sorted (canonical output) and none is zero
        for (std::size_t i = 0; i + 1 < challenge.matrix.row_count(); i++) {
            ASSERT_FALSE(BitVector::lex_less(challenge.matrix.row(i + 1), challenge.matrix.row(i)));
        }
        for (std::size_t i = 0; i < challenge.matrix.row_count(); i++) {
            ASSERT_FALSE(challenge.matrix.row(i).is_zero());
        }
    }
}

TEST(BuildChallenge, CodeRecoveryMatchesQrCode) {
    for (std::uint64_t q : {7u, 23u, 31u}) {
        auto [challenge, secret] = build_challenge(q, q, 99);
        BitMatrix ps = submatrix_ps(challenge.matrix, secret.s);
        WeightDistribution recovered = weight_distribution(LinearCode::from_spanning(ps));
        WeightDistribution reference = weight_distribution(qr_code(q));
        ASSERT_EQ(recovered.counts, reference.counts) << "q=" << q;
    }
}

TEST(BuildChallenge, DeterministicBytesAndParameterChecks) {
    auto [c1, s1] = build_challenge(7, 7, 42);
    auto [c2, s2] = build_challenge(7, 7, 42);
    std::ostringstream f1;
    std::ostringstream f2;
    write_challenge(f1, c1);
    write_challenge(f2, c2);
    EXPECT_EQ(f1.str(), f2.str());
    std::ostringstream g1;
    std::ostringstream g2;
    write_secret(g1, s1);
    write_secret(g2, s2);
    EXPECT_EQ(g1.str(), g2.str());

    auto [c3, s3] = build_challenge(7, 7, 43);
    EXPECT_NE(c3.matrix, c1.matrix);

    EXPECT_THROW(build_challenge(6, 6, 1), std::invalid_argument);
    EXPECT_THROW(build_challenge(17, 17, 1), std::invalid_argument);
    EXPECT_THROW(build_challenge(7, 0, 1), std::invalid_argument);
}

TEST(Provers, HonestAcceptsAtQ23) {
    auto [challenge, secret] = build_challenge(23, 23, 2);
    Rng rng(100);
    ProofTranscript t = honest_prove(challenge, 2000, rng);
    EXPECT_EQ(t.tag, ProverTag::honest);
    VerifyReport report = verify(challenge, secret, t, default_params(1e-3));
    EXPECT_EQ(report.m_raw, 2000u);
    EXPECT_GE(report.m_filtered, report.m_min);
    EXPECT_EQ(report.decision, Decision::accept);
}

TEST(Provers, CheatIsRejectedAtQ23) {
    auto [challenge, secret] = build_challenge(23, 23, 2);
    Rng rng(101);
    ProofTranscript t = cheat_prove(challenge, 2000, rng);
    VerifyReport report = verify(challenge, secret, t, default_params(1e-3));
    EXPECT_EQ(report.decision, Decision::reject);
    EXPECT_LT(report.bias_observed, report.threshold);
}

TEST(Provers, Q7DeduplicationStarvesTheTest) {
    // A q=7 challenge has at most 31 distinct nonzero outcomes, so the
    // default m_min can never be met and the verdict is Inconclusive.
    auto [challenge, secret] = build_challenge(7, 7, 2);
    Rng rng(5);
    ProofTranscript t = honest_prove(challenge, 2000, rng);
    VerifyReport report = verify(challenge, secret, t, default_params(1e-3));
    EXPECT_LE(report.m_filtered, 31u);
    EXPECT_EQ(report.decision, Decision::inconclusive);
}

TEST(Provers, InfeasibleSizeAndEmptyTranscript) {
    auto [challenge, secret] = build_challenge(487, 487, 1);
    Rng rng(1);
    EXPECT_THROW(honest_prove(challenge, 10, rng), InfeasibleError);

    auto [small, small_secret] = build_challenge(7, 7, 1);
    ProofTranscript empty = honest_prove(small, 0, rng);
    EXPECT_TRUE(empty.samples.samples.empty());
    VerifyReport report = verify(small, small_secret, empty, default_params(1e-3));
    EXPECT_EQ(report.decision, Decision::inconclusive);
    EXPECT_EQ(report.m_filtered, 0u);
    EXPECT_EQ(report.bias_observed, 0.0);
}

TEST(Verify, FilterSemantics) {
    auto [challenge, secret] = build_challenge(7, 7, 8);
    std::size_t n = challenge.matrix.col_count();

    // all-zero samples are dropped entirely
    ProofTranscript zeros{{n, std::vector<BitVector>(50, BitVector(n))}, ProverTag::external};
    VerifyReport r1 = verify(challenge, secret, zeros, default_params(1e-3));
    EXPECT_EQ(r1.m_raw, 50u);
    EXPECT_EQ(r1.m_filtered, 0u);
    EXPECT_EQ(r1.decision, Decision::inconclusive);

    // replaying one orthogonal vector deduplicates to a single sample
    BitVector orth(n);
    for (std::uint64_t x = 1; x < (std::uint64_t{1} << n); x++) {
        BitVector v(n);
        for (std::size_t j = 0; j < n; j++) {
            v.set(j, (x >> j) & 1);
        }
        if (v.dot(secret.s) == 0) {
            orth = v;
            break;
        }
    }
    ASSERT_FALSE(orth.is_zero());
    ProofTranscript replay{{n, std::vector<BitVector>(2000, orth)}, ProverTag::external};
    VerifyReport r2 = verify(challenge, secret, replay, default_params(1e-3));
    EXPECT_EQ(r2.m_raw, 2000u);
    EXPECT_EQ(r2.m_filtered, 1u);
    EXPECT_EQ(r2.decision, Decision::inconclusive);
    EXPECT_EQ(r2.bias_observed, 1.0);

    // width mismatch is a malformed transcript
    ProofTranscript bad{{n + 1, {BitVector(n + 1)}}, ProverTag::external};
    EXPECT_THROW(verify(challenge, secret, bad, default_params(1e-3)), std::invalid_argument);
}

TEST(Verify, ThresholdAndFloorArithmetic) {
    auto [challenge, secret] = build_challenge(7, 7, 4);
    std::size_t n = challenge.matrix.col_count();
    // hand-build 3 orthogonal + 1 non-orthogonal distinct nonzero samples
    std::vector<BitVector> orth;
    std::vector<BitVector> non;
    for (std::uint64_t x = 1; x < (std::uint64_t{1} << n); x++) {
        BitVector v(n);
        for (std::size_t j = 0; j < n; j++) {
            v.set(j, (x >> j) & 1);
        }
        (v.dot(secret.s) == 0 ? orth : non).push_back(v);
    }
    ASSERT_GE(orth.size(), 3u);
    ASSERT_GE(non.size(), 1u);
    std::vector<BitVector> samples{orth[0], orth[1], orth[2], non[0]};
    VerifyParams params{0.8, 2};
    VerifyReport r = verify(challenge, secret, {{n, samples}, ProverTag::external}, params);
    EXPECT_EQ(r.m_filtered, 4u);
    EXPECT_EQ(r.bias_observed, 0.75);
    EXPECT_EQ(r.decision, Decision::reject);

    samples = {orth[0], orth[1], orth[2]};
    VerifyReport r2 = verify(challenge, secret, {{n, samples}, ProverTag::external}, params);
    EXPECT_EQ(r2.bias_observed, 1.0);
    EXPECT_EQ(r2.decision, Decision::accept);

    VerifyParams strict{0.8, 5};
    VerifyReport r3 = verify(challenge, secret, {{n, samples}, ProverTag::external}, strict);
    EXPECT_EQ(r3.decision, Decision::inconclusive);
}

TEST(Files, ChallengeSecretTranscriptRoundTrips) {
    auto [challenge, secret] = build_challenge(7, 7, 42);
    std::ostringstream cf;
    write_challenge(cf, challenge);
    std::string text = cf.str();
    EXPECT_TRUE(text.starts_with("# theta=1/8\n# q=7\n# challenge_id=q7-000000000000002a\n"));
    std::istringstream cin(text);
    Challenge c2 = read_challenge(cin);
    EXPECT_EQ(c2.matrix, challenge.matrix);
    EXPECT_EQ(c2.q, 7u);
    EXPECT_EQ(c2.theta, Action(1, 8));
    EXPECT_EQ(c2.challenge_id, challenge.challenge_id);

    std::ostringstream sf;
    write_secret(sf, secret);
    std::istringstream sin(sf.str());
    Secret s2 = read_secret(sin);
    EXPECT_EQ(s2.s, secret.s);
    EXPECT_EQ(s2.obf_rows, secret.obf_rows);
    EXPECT_EQ(s2.seed, secret.seed);
    EXPECT_EQ(s2.q, secret.q);

    Rng rng(8);
    ProofTranscript t = honest_prove(challenge, 25, rng);
    std::ostringstream tf;
    write_transcript(tf, t.samples);
    std::istringstream tin(tf.str());
    SampleSet read_back = read_transcript(tin);
    ASSERT_EQ(read_back.samples.size(), 25u);
    for (std::size_t i = 0; i < 25; i++) {
        ASSERT_EQ(read_back.samples[i], t.samples.samples[i]);
    }

    std::istringstream badc("# q=7\n101\n");
    EXPECT_THROW(read_challenge(badc), ParseError);
    std::istringstream bads("# q=7\n# seed=0x1\n1011\n");
    EXPECT_THROW(read_secret(bads), ParseError);  // missing index line
    std::istringstream badt("10a\n");
    EXPECT_THROW(read_transcript(badt), ParseError);
}

}  // namespace
}  // namespace iqp
