#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cursim_cli.hpp"

using namespace cursim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cursim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "cursim");
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write_example() {
        std::ofstream(dir_ / "four.csv") << "1,2,0,0\n0,0,1,3\n";
        std::ofstream(dir_ / "four.labels") << "0\n0\n1\n1\n";
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, NoArgsPrintsUsage) {
    EXPECT_EQ(run({}), cli::kUsage);
    EXPECT_NE(err_.str().find("synth"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"synth", "--bogus"}), cli::kUsage);
}

TEST_F(CliTest, SynthCaseOne) {
    ASSERT_EQ(run({"synth", "--case", "1", "--sigma", "0", "--out", path("d.csv")}), cli::kOk);
    const io::DatasetFile ds = io::load_csv(path("d.csv"));
    EXPECT_EQ(ds.matrix.rows(), 300);
    EXPECT_EQ(ds.matrix.cols(), 100);
    ASSERT_TRUE(ds.labels.has_value());
    EXPECT_EQ(ds.labels->m_clusters, 2u);
}

TEST_F(CliTest, SynthNeedsCaseOrDims) {
    EXPECT_EQ(run({"synth", "--out", path("d.csv")}), cli::kUsage);
    EXPECT_EQ(run({"synth", "--case", "1"}), cli::kUsage);
    EXPECT_EQ(run({"synth", "--case", "3", "--out", path("d.csv")}), cli::kUsage);
}

TEST_F(CliTest, SynthSweepHasOneRowPerSigma) {
    // reduced shape keeps the test quick; the row count is what matters
    ASSERT_EQ(run({"synth", "--sweep", "--case", "2", "--trials", "2", "--k", "3", "--ambient", "40", "--points", "14",
                   "--out", path("sweep.csv")}),
              cli::kOk);
    const std::string csv = slurp(path("sweep.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), cli::kSweepHeader);
    EXPECT_EQ(line_count(csv), 8u);
}

TEST_F(CliTest, ExactOnFourPointExample) {
    write_example();
    ASSERT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "exact", "--M", "2", "--dmax", "1"}), cli::kOk);
    EXPECT_NE(out_.str().find("error_pct=0"), std::string::npos);
    EXPECT_EQ(slurp(path("four.exact.labels")), "0\n0\n1\n1\n");
    const std::string report = slurp(path("four.exact.report.csv"));
    EXPECT_EQ(report.substr(0, report.find('\n')), cli::kReportHeader);
}

TEST_F(CliTest, ProtoIsDeterministic) {
    ASSERT_EQ(run({"synth", "--case", "1", "--sigma", "0.01", "--seed", "3", "--out", path("d.csv")}), cli::kOk);
    const std::vector<std::string> args{"cluster", "--data", path("d.csv"), "--algo", "proto", "--M", "2", "--rank",
                                        "8", "--k", "25", "--backend", "pcc", "--seed", "7", "--no-timing"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", path("a")});
    b.insert(b.end(), {"--out", path("b")});
    ASSERT_EQ(run(a), cli::kOk);
    ASSERT_EQ(run(b), cli::kOk);
    EXPECT_EQ(slurp(path("a.labels")), slurp(path("b.labels")));
    EXPECT_EQ(slurp(path("a.report.csv")), slurp(path("b.report.csv")));
    EXPECT_NE(slurp(path("a.report.csv")).find(",7\n"), std::string::npos);
}

TEST_F(CliTest, RcurReportsBestRankAndNcutTable) {
    ASSERT_EQ(run({"synth", "--dims", "2,2", "--ambient", "30", "--points", "12", "--sigma", "0.01", "--out",
                   path("d.csv")}),
              cli::kOk);
    ASSERT_EQ(run({"cluster", "--data", path("d.csv"), "--algo", "rcur", "--M", "2", "--rmin", "2", "--rmax", "12",
                   "--k", "10", "--alpha", "2", "--out", path("r")}),
              cli::kOk);
    EXPECT_NE(out_.str().find("r_best="), std::string::npos);
    const std::string ncut = slurp(path("r.ncut.csv"));
    EXPECT_EQ(ncut.substr(0, ncut.find('\n')), "rank,ncut");
    EXPECT_EQ(line_count(ncut), 12u);
    const std::string report = slurp(path("r.report.csv"));
    EXPECT_NE(report.find("rcur"), std::string::npos);
}

TEST_F(CliTest, MissingFlagsNamed) {
    write_example();
    EXPECT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "rcur", "--M", "2", "--rmax", "3", "--alpha", "2"}),
              cli::kUsage);
    EXPECT_NE(err_.str().find("--rmin"), std::string::npos);
    EXPECT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "rcur", "--M", "2", "--rmin", "1", "--rmax", "2"}),
              cli::kUsage);
    EXPECT_NE(err_.str().find("--alpha"), std::string::npos);
    EXPECT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "proto", "--rank", "2"}), cli::kUsage);
    EXPECT_NE(err_.str().find("--M"), std::string::npos);
    EXPECT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "exact"}), cli::kUsage);
    EXPECT_NE(err_.str().find("--dmax"), std::string::npos);
}

TEST_F(CliTest, DataErrorsExitThree) {
    EXPECT_EQ(run({"cluster", "--data", path("missing.csv"), "--algo", "exact", "--dmax", "1"}), cli::kDataError);
    std::ofstream(dir_ / "bad.csv") << "1,2\n3\n";
    EXPECT_EQ(run({"cluster", "--data", path("bad.csv"), "--algo", "exact", "--dmax", "1"}), cli::kDataError);
}

TEST_F(CliTest, SelectionFailureExitsFour) {
    std::ofstream f(dir_ / "sparse.csv");
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 10; ++j) f << (j ? "," : "") << ((i == 3 && j < 5) || (i == 30 && j >= 5) ? 1 : 0);
        f << '\n';
    }
    f.close();
    EXPECT_EQ(run({"cluster", "--data", path("sparse.csv"), "--algo", "proto", "--M", "2", "--rank", "2", "--retries",
                   "2"}),
              cli::kAlgorithmFailure);
}

TEST_F(CliTest, SimBaseline) {
    write_example();
    ASSERT_EQ(run({"cluster", "--data", path("four.csv"), "--algo", "sim", "--M", "2", "--rank", "2"}), cli::kOk);
    EXPECT_NE(out_.str().find("error_pct=0"), std::string::npos);
}

TEST_F(CliTest, BenchOverNoiseFreeDirectory) {
    const fs::path data = dir_ / "sets";
    fs::create_directories(data);
    for (int i = 0; i < 5; ++i)
        ASSERT_EQ(run({"synth", "--dims", "2,3", "--ambient", "20", "--points", "8", "--seed", std::to_string(i),
                       "--out", (data / ("s" + std::to_string(i) + ".csv")).string()}),
                  cli::kOk);
    ASSERT_EQ(run({"bench", "--dir", data.string(), "--algo", "proto", "--M", "2", "--rank", "5", "--k", "5", "--out",
                   path("bench.csv"), "--no-timing"}),
              cli::kOk);
    const std::string summary = slurp(path("bench.summary.csv"));
    EXPECT_NE(summary.find("all,5,0,0"), std::string::npos) << summary;
    EXPECT_EQ(line_count(slurp(path("bench.csv"))), 6u);
}

TEST_F(CliTest, BenchManifestCategories) {
    const fs::path data = dir_ / "sets";
    fs::create_directories(data);
    for (int i = 0; i < 4; ++i)
        ASSERT_EQ(run({"synth", "--dims", "2,2", "--ambient", "15", "--points", "6", "--seed", std::to_string(i),
                       "--out", (data / ("s" + std::to_string(i) + ".csv")).string()}),
                  cli::kOk);
    std::ofstream(dir_ / "manifest.csv") << "s0.csv,checker,2\ns1.csv,checker,2\ns2.csv,traffic,2\ns3.csv,traffic,2\n";
    ASSERT_EQ(run({"bench", "--dir", data.string(), "--manifest", path("manifest.csv"), "--algo", "exact", "--dmax",
                   "2", "--out", path("bench.csv")}),
              cli::kOk);
    const std::string summary = slurp(path("bench.summary.csv"));
    EXPECT_NE(summary.find("checker,2,0,0"), std::string::npos) << summary;
    EXPECT_NE(summary.find("traffic,2,0,0"), std::string::npos) << summary;
    EXPECT_NE(summary.find("all,4,0,0"), std::string::npos) << summary;
}

TEST_F(CliTest, BenchErrors) {
    const fs::path empty = dir_ / "empty";
    fs::create_directories(empty);
    EXPECT_EQ(run({"bench", "--dir", empty.string(), "--algo", "exact", "--dmax", "1"}), cli::kDataError);
    EXPECT_EQ(run({"bench", "--dir", empty.string(), "--manifest", path("nope.csv"), "--algo", "exact", "--dmax", "1"}),
              cli::kDataError);
}
