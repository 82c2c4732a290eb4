#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;  // stdout and stderr
};

Result run(const std::string& args) {
    const std::string cmd = std::string(RYDIMER_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("rydimer-cli-" + std::to_string(::getpid()) + "-" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string out(const std::string& sub = "o") const { return "--out " + (dir / sub).string(); }
    fs::path dir;
};

const char* kSmallDiluted = "--preset square-diluted-6 --set lattice.span1=[2,0] --set lattice.span2=[0,2]";

}  // namespace

TEST_F(Cli, SweepWritesFullGridAndManifest) {
    const auto r = run(std::string("sweep ") + kSmallDiluted + " " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string csv = slurp(dir / "o" / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 57);
    const auto m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    EXPECT_EQ(m["command"], "sweep");
    EXPECT_EQ(m["rows"], 56);
    EXPECT_EQ(m["exit_code"], 0);
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
    EXPECT_EQ(m["outputs"][0], "sweep.csv");
}

TEST_F(Cli, RefusesToOverwriteUnlessVersioned) {
    const std::string args = std::string("coverings ") + kSmallDiluted + " " + out();
    ASSERT_EQ(run(args).code, 0);
    const auto again = run(args);
    EXPECT_EQ(again.code, 2);
    EXPECT_NE(again.output.find("--versioned"), std::string::npos);
    ASSERT_EQ(run(args + " --versioned").code, 0);
    EXPECT_TRUE(fs::exists(dir / "o" / "run-002" / "manifest.json"));
    EXPECT_EQ(slurp(dir / "o" / "coverings.csv"), slurp(dir / "o" / "run-002" / "coverings.csv"));
}

TEST_F(Cli, ThresholdAndWindowWarnings) {
    const auto r = run("geometry --preset square-gadget-6 --alpha 1.2 --set radii.intra=0.9 " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("threshold 1.5"), std::string::npos);
    EXPECT_NE(r.output.find("Rb < r_max"), std::string::npos);
    const auto m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    EXPECT_GE(m["warnings"].size(), 2u);
    EXPECT_TRUE(fs::exists(dir / "o" / "atoms.csv"));
}

TEST_F(Cli, ConfigErrorsExitWithTwo) {
    EXPECT_EQ(run(std::string("sweep ") + kSmallDiluted + " --lambda 2:1:0.1 " + out()).code, 2);
    EXPECT_EQ(run(std::string("sweep ") + kSmallDiluted + " --set bogus.key=1 " + out()).code, 2);
    EXPECT_EQ(run("sweep --preset no-such-preset " + out()).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "c.json");
        f << R"({"lattice": {"kind": "square"}, "colour": 3})";
    }
    const auto r = run("sweep --config " + (dir / "c.json").string() + " " + out());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("colour"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(Cli, CapacityExitsWithFour) {
    const auto r = run("sweep --preset square-gadget-6 --cap 1000 " + out());
    EXPECT_EQ(r.code, 4) << r.output;
}

TEST_F(Cli, SolverFailureExitsWithThree) {
    const auto r = run("sweep --preset square-gadget-6 --set lattice.span1=[2,0] --set lattice.span2=[0,2] "
                       "--set solver.krylov_dim=4 --set solver.tol=1e-15 --lambda 1:1.1:0.1 " + out());
    EXPECT_EQ(r.code, 3) << r.output;
    const auto m = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    EXPECT_EQ(m["exit_code"], 3);
    EXPECT_FALSE(m["warnings"].empty());
}

TEST_F(Cli, AnnealWritesScan) {
    const auto r = run("anneal --preset square-gadget-6 --set lattice.span1=[2,0] --set lattice.span2=[0,2] --alpha 2 "
                       "--T 4,8 " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string csv = slurp(dir / "o" / "anneal_T.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "T_over_N,infidelity_amp,norm_drift,steps");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
