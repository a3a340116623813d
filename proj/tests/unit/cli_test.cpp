#include "iqp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "test_helpers.hpp"

namespace iqp {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("iqp_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return run_cli(args, out_, err_);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

TEST_F(CliTest, GenProveVerifyPipelineAccepts) {
    ASSERT_EQ(run({"gen", "--q", "23", "--seed", "2", "--out-challenge", path("c.txt"),
                   "--out-secret", path("s.txt")}),
              kExitOk);
    EXPECT_NE(out_.str().find("q=23"), std::string::npos);
    ASSERT_EQ(run({"prove", "--challenge", path("c.txt"), "--m", "2000", "--seed", "7", "--out",
                   path("t.txt")}),
              kExitOk);
    EXPECT_EQ(run({"verify", "--challenge", path("c.txt"), "--secret", path("s.txt"),
                   "--transcript", path("t.txt")}),
              kExitOk);
    EXPECT_NE(out_.str().find("decision=Accept"), std::string::npos);
}

TEST_F(CliTest, GenCheatVerifyPipelineRejects) {
    ASSERT_EQ(run({"gen", "--q", "23", "--seed", "2", "--out-challenge", path("c.txt"),
                   "--out-secret", path("s.txt")}),
              kExitOk);
    ASSERT_EQ(run({"cheat", "--challenge", path("c.txt"), "--m", "2000", "--seed", "7", "--out",
                   path("t.txt")}),
              kExitOk);
    EXPECT_EQ(run({"verify", "--challenge", path("c.txt"), "--secret", path("s.txt"),
                   "--transcript", path("t.txt")}),
              kExitReject);
    EXPECT_NE(out_.str().find("decision=Reject"), std::string::npos);
}

TEST_F(CliTest, HonestProofAtQ487IsInfeasible) {
    ASSERT_EQ(run({"gen", "--q", "487", "--seed", "1", "--out-challenge", path("c.txt"),
                   "--out-secret", path("s.txt")}),
              kExitOk);
    EXPECT_EQ(run({"prove", "--challenge", path("c.txt"), "--m", "10", "--seed", "1", "--out",
                   path("t.txt")}),
              kExitInfeasible);
    EXPECT_NE(err_.str().find("infeasible"), std::string::npos);
    // the cheat path still runs at this size
    EXPECT_EQ(run({"cheat", "--challenge", path("c.txt"), "--m", "100", "--seed", "1", "--out",
                   path("t.txt")}),
              kExitOk);
}

TEST_F(CliTest, BiasCommandPrintsTheorem1Value) {
    std::ofstream f(path("p.txt"));
    f << "# theta=1/8\n1000\n1100\n0110\n1011\n0101\n0010\n0001\n";
    f.close();
    ASSERT_EQ(run({"bias", "--program", path("p.txt"), "--s", "1011"}), kExitOk);
    EXPECT_NE(out_.str().find("bias=0.8535533906"), std::string::npos);
}

TEST_F(CliTest, EntropyCommandBothFormulasAgree) {
    std::ofstream f(path("p.txt"));
    f << "# theta=1/8\n101\n011\n110\n";
    f.close();
    ASSERT_EQ(run({"entropy", "--program", path("p.txt")}), kExitOk);
    std::string text = out_.str();
    double s2 = 0;
    double s2b = 0;
    ASSERT_EQ(std::sscanf(text.c_str(), "s2=%lf s2_via_bias=%lf", &s2, &s2b), 2) << text;
    EXPECT_NEAR(s2, s2b, 1e-10);
}

TEST_F(CliTest, SimulateBackendsAndFormats) {
    std::ofstream f(path("p.txt"));
    f << "# theta=1/8\n101\n011\n";
    f.close();
    ASSERT_EQ(run({"simulate", "--program", path("p.txt"), "--out", path("d.csv")}), kExitOk);
    std::string csv = slurp(path("d.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);

    ASSERT_EQ(run({"simulate", "--program", path("p.txt"), "--backend", "pathsum", "--out",
                   path("d2.csv")}),
              kExitOk);
    EXPECT_EQ(slurp(path("d2.csv")).substr(0, 4), csv.substr(0, 4));

    ASSERT_EQ(run({"simulate", "--program", path("p.txt"), "--format", "bin", "--out",
                   path("d.bin")}),
              kExitOk);
    EXPECT_EQ(fs::file_size(path("d.bin")), 8u + 8u * 8u);

    // cap flags map to the infeasible exit code
    EXPECT_EQ(run({"simulate", "--program", path("p.txt"), "--cap-n", "2", "--out", path("x")}),
              kExitInfeasible);
}

TEST_F(CliTest, ReduceTargetsProduceLoadableFiles) {
    std::ofstream f(path("p.txt"));
    f << "# theta=1/8\n11\n01\n";
    f.close();
    ASSERT_EQ(run({"reduce", "--program", path("p.txt"), "--target", "znet", "--out",
                   path("n.znet")}),
              kExitOk);
    std::ifstream zin(path("n.znet"));
    ZNetwork net = read_znetwork(zin);
    EXPECT_EQ(net.n, 2u);

    ASSERT_EQ(run({"reduce", "--program", path("p.txt"), "--target", "graph", "--out",
                   path("g.graph")}),
              kExitOk);
    std::ifstream gin(path("g.graph"));
    GraphProgram gp = read_graphprogram(gin);
    EXPECT_EQ(gp.vertex_count, 4u);
    EXPECT_EQ(gp.primal_count, 2u);

    // the compiled network reproduces the program distribution
    std::ifstream pin(path("p.txt"));
    ConstantActionProgram prog = parse_program(pin);
    EXPECT_LT(total_variation(simulate_znetwork(net), distribution_fourier(prog)), 1e-10);
}

TEST_F(CliTest, ExperimentEntropyReportsGap) {
    ASSERT_EQ(run({"experiment-entropy", "--n", "4", "--k", "8", "--trials", "5", "--seed", "3"}),
              kExitOk);
    std::string text = out_.str();
    EXPECT_NE(text.find("trials=5"), std::string::npos);
    EXPECT_NE(text.find("mean_s2="), std::string::npos);
    EXPECT_NE(text.find("mean_gap="), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({"frobnicate"}), kExitUsage);
    EXPECT_EQ(run({"gen", "--q", "23"}), kExitUsage);  // missing required flags
    EXPECT_EQ(run({"gen", "--q", "6", "--seed", "1", "--out-challenge", path("c"),
                   "--out-secret", path("s")}),
              kExitUsage);  // invalid q
    EXPECT_EQ(run({"bias", "--program", path("missing.txt"), "--s", "1"}), kExitUsage);
    EXPECT_EQ(run({}), kExitUsage);
}

TEST_F(CliTest, SeedsAreByteReproducible) {
    for (int round = 0; round < 2; round++) {
        std::string suffix = std::to_string(round);
        ASSERT_EQ(run({"gen", "--q", "7", "--seed", "0x2a", "--out-challenge",
                       path("c" + suffix), "--out-secret", path("s" + suffix)}),
                  kExitOk);
        ASSERT_EQ(run({"prove", "--challenge", path("c" + suffix), "--m", "100", "--seed", "9",
                       "--out", path("t" + suffix)}),
                  kExitOk);
    }
    EXPECT_EQ(slurp(path("c0")), slurp(path("c1")));
    EXPECT_EQ(slurp(path("s0")), slurp(path("s1")));
    EXPECT_EQ(slurp(path("t0")), slurp(path("t1")));
    // decimal and hex seed spellings agree
    ASSERT_EQ(run({"gen", "--q", "7", "--seed", "42", "--out-challenge", path("c2"),
                   "--out-secret", path("s2")}),
              kExitOk);
    EXPECT_EQ(slurp(path("c0")), slurp(path("c2")));
}

}  // namespace
}  // namespace iqp
