// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "icnet/builder.hpp"
#include "icnet/cli/commands.hpp"
#include "icnet/serialize.hpp"
#include "icnet/verify.hpp"

using namespace icnet;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("icnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const char* kCubic = "-x0*x0*x0 + 3*x0";

} // namespace

TEST_F(Cli, FixturesAndPropagate) {
    ASSERT_EQ(run({"fixtures", "--name", "fig2-n1", "--out", path("n1.json")}), 0);
    ASSERT_EQ(run({"propagate", "--net", path("n1.json"), "--box", "0,1"}), 0);
    EXPECT_EQ(out_.str(), "[0, 1.5]\n");
    ASSERT_EQ(run({"fixtures", "--name", "fig2-n2", "--out", path("n2.json")}), 0);
    ASSERT_EQ(run({"propagate", "--net", path("n2.json"), "--box", "0,1"}), 0);
    EXPECT_EQ(out_.str(), "[0, 1]\n");
    ASSERT_EQ(run({"propagate", "--net", path("n2.json"), "--box", "0.25,0.25"}), 0);
    EXPECT_EQ(out_.str(), "[0.75, 0.75]\n");
    EXPECT_EQ(run({"propagate", "--net", path("n2.json"), "--box", "0,1;0,1"}), cli::kExitUsage);
    EXPECT_EQ(run({"fixtures", "--name", "fig9", "--out", path("x.json")}), cli::kExitUsage);
}

TEST_F(Cli, BuildWritesNetworkAndReport) {
    ASSERT_EQ(run({"build", "--expr", kCubic, "--domain", "-2,2", "--delta", "1.6", "--out", path("c.json")}), 0)
        << err_.str();
    EXPECT_NE(out_.str().find("N 5"), std::string::npos);
    const auto report = nlohmann::json::parse(read_text_file(path("c.json.report.json")));
    EXPECT_EQ(report["components"][0]["N"], 5);
    const Network n = load_network(path("c.json"));
    EXPECT_EQ(n.metadata().at("N"), "5");

    ASSERT_EQ(run({"stats", "--net", path("c.json")}), 0);
    EXPECT_NE(out_.str().find("bump_relu_units=7\n"), std::string::npos);
    EXPECT_NE(out_.str().find("bump_relu_formula=5\n"), std::string::npos);
}

TEST_F(Cli, BuildConstant) {
    ASSERT_EQ(run({"build", "--expr", "1", "--domain", "0,1", "--delta", "0.1", "--out", path("k.json")}), 0);
    const Network n = load_network(path("k.json"));
    EXPECT_EQ(n.metadata().at("N"), "1");
    EXPECT_EQ(n.eval_abstract(BoxRegion{Interval{0, 1}})[0], Interval(1, 1));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run({"build", "--expr", "x0", "--domain", "0,1", "--delta", "0", "--out", path("z.json")}),
              cli::kExitUsage);
    EXPECT_NE(err_.str().find("delta must be positive"), std::string::npos);
    EXPECT_EQ(run({"build", "--expr", "x0 +", "--domain", "0,1", "--delta", "0.5", "--out", path("z.json")}),
              cli::kExitUsage);
    EXPECT_EQ(run({"build", "--expr", "x0*x1", "--domain", "0,1;0,1", "--delta", "0.01", "--out", path("z.json")}),
              cli::kExitBudget);
    EXPECT_NE(err_.str().find("larger delta"), std::string::npos);
    EXPECT_EQ(run({"build", "--expr", "x0", "--domain", "0,1", "--delta", "0.5", "--out", path("z.json"), "--budget",
                   "1"}),
              cli::kExitBudget);
    EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
    EXPECT_EQ(run({}), cli::kExitUsage);
    EXPECT_EQ(run({"--help"}), cli::kExitOk);
    EXPECT_EQ(run({"propagate", "--net", path("missing.json"), "--box", "0,1"}), cli::kExitUsage);
}

TEST_F(Cli, BudgetFromEnvironment) {
    ::setenv("ICNET_BUDGET", "10", 1);
    const int code = run({"build", "--expr", "x0", "--domain", "0,1", "--delta", "0.5", "--out", path("e.json")});
    ::unsetenv("ICNET_BUDGET");
    EXPECT_EQ(code, cli::kExitBudget);
    EXPECT_EQ(run({"build", "--expr", "x0", "--domain", "0,1", "--delta", "0.5", "--out", path("e.json")}), 0);
}

TEST_F(Cli, ExpressionFromFile) {
    write_text_file(path("f.txt"), std::string(kCubic) + "\n");
    ASSERT_EQ(run({"build", "--expr", "@" + path("f.txt"), "--domain", "-2,2", "--delta", "1.6", "--out",
                   path("c.json")}),
              0);
    EXPECT_EQ(run({"verify", "--net", path("c.json"), "--expr", "@" + path("f.txt"), "--boxes", "20"}), 0);
}

TEST_F(Cli, VerifyPassesAndIsDeterministic) {
    ASSERT_EQ(run({"build", "--expr", kCubic, "--domain", "-2,2", "--delta", "1.6", "--out", path("c.json")}), 0);
    const std::vector<std::string> args{"verify", "--net",  path("c.json"), "--expr",   kCubic,
                                        "--boxes", "100",   "--seed",       "7",        "--tolerance",
                                        "1e-9",   "--out"};
    auto a = args;
    a.push_back(path("r1.json"));
    ASSERT_EQ(run(a), 0) << out_.str() << err_.str();
    EXPECT_NE(out_.str().find("failures: 0"), std::string::npos);
    auto b = args;
    b.push_back(path("r2.json"));
    b.push_back("--threads");
    b.push_back("1");
    ASSERT_EQ(run(b), 0);
    EXPECT_EQ(read_text_file(path("r1.json")), read_text_file(path("r2.json")));

    const auto doc = nlohmann::json::parse(read_text_file(path("r1.json")));
    EXPECT_EQ(doc["format"], "icnet-verify-report");
    EXPECT_EQ(doc["summary"]["failures"], 0);
    EXPECT_EQ(doc["config"]["seed"], 7);
}

TEST_F(Cli, VerifyDetectsCorruption) {
    ASSERT_EQ(run({"build", "--expr", kCubic, "--domain", "-2,2", "--delta", "1.6", "--out", path("c.json")}), 0);
    auto doc = nlohmann::json::parse(read_text_file(path("c.json")));
    const int out = doc["output"].get<int>();
    for (auto& node : doc["nodes"]) {
        if (node["id"] == out) {
            node["bias"][0] = parse_real(node["bias"][0].get<std::string>()) + 10.0;
        }
    }
    write_text_file(path("bad.json"), doc.dump());
    EXPECT_EQ(run({"verify", "--net", path("bad.json"), "--expr", kCubic, "--boxes", "50", "--out", path("r.json")}),
              cli::kExitFailures);
    const auto rep = nlohmann::json::parse(read_text_file(path("r.json")));
    EXPECT_GT(rep["summary"]["failures"].get<int>(), 0);
    EXPECT_GT(rep["summary"]["max_violation"].get<double>(), 7.0);
    EXPECT_LE(rep["summary"]["max_violation"].get<double>(), 10.0 + 1e-6);
}

TEST_F(Cli, VerifyZeroBoxes) {
    ASSERT_EQ(run({"build", "--expr", "x0", "--domain", "0,1", "--delta", "0.5", "--out", path("x.json")}), 0);
    ASSERT_EQ(run({"verify", "--net", path("x.json"), "--expr", "x0", "--boxes", "0", "--out", path("r.json")}), 0);
    const auto rep = nlohmann::json::parse(read_text_file(path("r.json")));
    EXPECT_EQ(rep["records"].size(), 0U);
    EXPECT_EQ(rep["summary"]["failures"], 0);
}

TEST_F(Cli, VerifyInconclusiveOnTinyBudget) {
    ASSERT_EQ(run({"build", "--expr", kCubic, "--domain", "-2,2", "--delta", "1.6", "--out", path("c.json")}), 0);
    EXPECT_EQ(run({"verify", "--net", path("c.json"), "--expr", kCubic, "--boxes", "5", "--sample-budget", "1"}),
              cli::kExitBudget);
    EXPECT_NE(out_.str().find("inconclusive: "), std::string::npos);
}

TEST_F(Cli, VerifyNeedsBuildMetadata) {
    ASSERT_EQ(run({"fixtures", "--name", "fig2-n1", "--out", path("n1.json")}), 0);
    EXPECT_EQ(run({"verify", "--net", path("n1.json"), "--expr", "x0", "--boxes", "5"}), cli::kExitUsage);
}

TEST_F(Cli, VectorBuildAndVerify) {
    ASSERT_EQ(run({"build", "--expr", "min(x0, x1)", "--expr", "x0*x1", "--domain", "0,1;0,1", "--delta", "0.5",
                   "--out", path("v.json")}),
              0)
        << err_.str();
    EXPECT_EQ(run({"verify", "--net", path("v.json"), "--expr", "min(x0, x1)", "--expr", "x0*x1", "--boxes", "30"}),
              0);
    EXPECT_EQ(run({"verify", "--net", path("v.json"), "--expr", "min(x0, x1)", "--boxes", "30"}), cli::kExitUsage);
}

TEST_F(Cli, PlotData) {
    ASSERT_EQ(run({"build", "--expr", kCubic, "--domain", "-2,2", "--delta", "1.6", "--out", path("c.json")}), 0);
    ASSERT_EQ(run({"plot-data", "--net", path("c.json"), "--expr", kCubic, "--samples", "401", "--out",
                   path("p.csv")}),
              0);
    const std::string csv = read_text_file(path("p.csv"));
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x0,f,n,cell_lo,cell_hi");
    int rows = 0;
    double worst = 0.0;
    while (std::getline(is, line)) {
        double x, f, n, lo, hi;
        char c;
        std::istringstream ls(line);
        ls >> x >> c >> f >> c >> n >> c >> lo >> c >> hi;
        worst = std::max(worst, std::fabs(n - f));
        EXPECT_LE(lo, n);
        EXPECT_GE(hi, n);
        ++rows;
    }
    EXPECT_EQ(rows, 401);
    EXPECT_LE(worst, 1.6 + 1e-9);
    std::string again;
    ASSERT_EQ(run({"plot-data", "--net", path("c.json"), "--expr", kCubic, "--samples", "401", "--out",
                   path("q.csv")}),
              0);
    EXPECT_EQ(read_text_file(path("q.csv")), csv);

    ASSERT_EQ(run({"build", "--expr", "min(x0, x1)", "--domain", "0,1;0,1", "--delta", "0.5", "--out",
                   path("m.json")}),
              0);
    ASSERT_EQ(run({"plot-data", "--net", path("m.json"), "--expr", "min(x0, x1)", "--samples", "5", "--out",
                   path("m.csv")}),
              0);
    EXPECT_EQ(read_text_file(path("m.csv")).substr(0, 27), "x0,x1,f,n,cell_lo,cell_hi\n0");

    ASSERT_EQ(run({"build", "--expr", "x0+x1+x2", "--domain", "0,1;0,1;0,1", "--delta", "2", "--out",
                   path("t.json")}),
              0);
    EXPECT_EQ(run({"plot-data", "--net", path("t.json"), "--expr", "x0+x1+x2", "--out", path("t.csv")}),
              cli::kExitUsage);
}

TEST(VerifyBoxes, Generation) {
    const BoxRegion dom{Interval{-2, 2}};
    EXPECT_TRUE(verification_boxes(dom, 0, 1).empty());
    const auto boxes = verification_boxes(dom, 10, 1);
    ASSERT_EQ(boxes.size(), 10U + 1U + 5U + 1U);
    EXPECT_EQ(boxes[10].box, dom);
    EXPECT_EQ(boxes.back().box, BoxRegion{Interval(-1, 1)});
    for (const auto& b : boxes) {
        EXPECT_TRUE(box_subset(b.box, dom));
    }
    const auto again = verification_boxes(dom, 10, 1);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        EXPECT_EQ(boxes[i].box, again[i].box);
    }
    EXPECT_EQ(verification_boxes(BoxRegion{{0, 1}, {0, 1}}, 3, 1).size(), 3U + 1U + 25U);
}

// Point boxes reduce the sandwich to |n(x) - f(x)| <= delta'.
TEST(VerifyBoxes, PointBoxesCheckUniformError) {
    const FuncExpr f = parse(kCubic, 1, BoxRegion{Interval{-2, 2}});
    const BuildResult r = build_certified_network(f, 1.6);
    RunConfig cfg;
    for (double x : {-2.0, -1.3, 0.0, 0.7, 1.99}) {
        const BoxRecord rec =
            check_sandwich(r.net, 0, f, {BoxRegion{Interval::point(x)}, "point"}, r.report.delta_prime, cfg);
        EXPECT_EQ(rec.upper, SandwichStatus::holds);
        EXPECT_NE(rec.lower, SandwichStatus::violated);
        EXPECT_EQ(rec.l, eval(f, std::vector<double>{x}));
    }
}
