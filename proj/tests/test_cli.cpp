#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"
#include "mfsmp/errors.hpp"
#include "report.hpp"

using namespace mfsmp;
using namespace mfsmp::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("mfsmp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MFSMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error_message(const fs::path& p) {
    try {
        load_config(p);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kSmall =
    "[grid]\nT = 1.5\nl = 1\ndt = 0.01\n[ensemble]\nN = 200\nseed = 42\n";

}  // namespace

TEST(Config, DefaultsFromEmptyFile) {
    TempDir d;
    const ExperimentConfig c = load_config(write_file(d.path() / "a.ini", ""));
    EXPECT_EQ(c.T, 1.5);
    EXPECT_EQ(c.l, 1.0);
    EXPECT_EQ(c.dt, 1e-3);
    EXPECT_EQ(c.particles, 10000u);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.basis.degree, 2);
    EXPECT_EQ(c.eps_fractions.size(), 4u);
}

TEST(Config, ReadsValues) {
    TempDir d;
    const ExperimentConfig c = load_config(write_file(
        d.path() / "a.ini",
        "[grid]\ndt = 0.005\n[ensemble]\nN = 300\n[spike]\neps_fractions = 0.2, 0.1\n[finance]\nzeta = 0.5\n"));
    EXPECT_EQ(c.dt, 0.005);
    EXPECT_EQ(c.particles, 300u);
    EXPECT_EQ(c.eps_fractions, (std::vector<double>{0.2, 0.1}));
    EXPECT_EQ(c.investor.zeta, 0.5);
}

TEST(Config, UnknownKeyNamesLine) {
    TempDir d;
    const fs::path p = write_file(d.path() / "a.ini", "[grid]\nT = 1.5\nbogus = 3\n");
    const std::string msg = config_error_message(p);
    EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionAndMalformedValue) {
    TempDir d;
    EXPECT_NE(config_error_message(write_file(d.path() / "a.ini", "[gridd]\nT = 1\n")).find("gridd"),
              std::string::npos);
    const std::string msg = config_error_message(write_file(d.path() / "b.ini", "[grid]\n\ndt = fast\n"));
    EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("fast"), std::string::npos) << msg;
    EXPECT_THROW(load_config(d.path() / "missing.ini"), ConfigError);
}

TEST(Config, PreconditionsAreConfigErrors) {
    TempDir d;
    EXPECT_THROW(load_config(write_file(d.path() / "a.ini", "[grid]\nT = 2.5\n")), ConfigError);
    EXPECT_THROW(load_config(write_file(d.path() / "b.ini", "[spike]\ntau_fraction = 0.95\neps_fraction = 0.1\n")),
                 ConfigError);
    EXPECT_THROW(load_config(write_file(d.path() / "c.ini", "[ensemble]\nN = 0\n")), ConfigError);
}

TEST(Config, EchoRoundTrips) {
    TempDir d;
    ExperimentConfig c = load_config(
        write_file(d.path() / "a.ini", "[grid]\ndt = 0.004\n[finance]\nkappa = 0.07\n[nplayer]\nplayers = 2, 4\n"));
    const std::string text = echo(c);
    const ExperimentConfig back = load_config(write_file(d.path() / "b.ini", text));
    EXPECT_EQ(echo(back), text);
    EXPECT_EQ(back.dt, 0.004);
    EXPECT_EQ(back.investor.kappa, 0.07);
    EXPECT_EQ(back.nplayer.players, (std::vector<int>{2, 4}));
}

TEST(Report, VerdictRule) {
    RunReport r;
    r.add("a", 1.0, 1.0);
    r.add_strictly_below("b", 1.0, 1.0);
    r.add("c", std::nan(""), 0.0);
    r.add_strictly_below("d", 0.5, 1.0);
    EXPECT_TRUE(r.rows()[0].pass());
    EXPECT_FALSE(r.rows()[1].pass());
    EXPECT_FALSE(r.rows()[2].pass());
    EXPECT_TRUE(r.rows()[3].pass());
    EXPECT_FALSE(r.all_pass());
}

TEST(Binary, MissingConfigWritesNothing) {
    TempDir d;
    const fs::path out = d.path() / "out";
    EXPECT_EQ(run_cli("simulate --config " + (d.path() / "nope.ini").string() + " --out " + out.string()), 1);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Binary, UnknownSubcommandAndBadKey) {
    TempDir d;
    EXPECT_EQ(run_cli("frobnicate"), 1);
    const fs::path cfg = write_file(d.path() / "a.ini", "[grid]\nwidth = 2\n");
    EXPECT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (d.path() / "o").string()), 1);
    EXPECT_FALSE(fs::exists(d.path() / "o"));
}

TEST(Binary, SimulateZeroModelIsDeterministic) {
    TempDir d;
    const fs::path cfg = write_file(d.path() / "a.ini", std::string(kSmall) + "[model]\nname = zero\n");
    const fs::path a = d.path() / "a", b = d.path() / "b";
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + a.string()), 0);
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + b.string() + " --threads 3"), 0);
    const std::string report = slurp(a / "report.csv");
    EXPECT_EQ(report.rfind("check,estimate,tolerance,verdict\n", 0), 0u);
    EXPECT_EQ(report.find(",fail"), std::string::npos) << report;
    for (const char* f : {"report.csv", "summary.txt", "paths.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_NE(slurp(a / "summary.txt").find("mfsmp 1.0.0"), std::string::npos);
}

TEST(Binary, SeedOverrideChangesOutput) {
    TempDir d;
    const fs::path cfg = write_file(d.path() / "a.ini", kSmall);
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (d.path() / "a").string()), 0);
    ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --seed 7 --out " + (d.path() / "b").string()), 0);
    EXPECT_NE(slurp(d.path() / "a" / "paths.csv"), slurp(d.path() / "b" / "paths.csv"));
}

TEST(Binary, SingleWidthRatesIsInsufficientGrid) {
    TempDir d;
    const fs::path cfg = write_file(d.path() / "a.ini", std::string(kSmall) + "[spike]\neps_fractions = 0.1\n");
    const fs::path out = d.path() / "o";
    EXPECT_EQ(run_cli("rates --config " + cfg.string() + " --out " + out.string()), 2);
    const std::string report = slurp(out / "report.csv");
    EXPECT_NE(report.find("error.InsufficientGrid,nan,0,fail"), std::string::npos) << report;
}

TEST(Binary, ExpansionWritesTrace) {
    TempDir d;
    const fs::path cfg = write_file(d.path() / "a.ini", kSmall);
    const fs::path out = d.path() / "o";
    run_cli("expansion --config " + cfg.string() + " --out " + out.string());
    EXPECT_EQ(slurp(out / "expansion.csv").rfind("eps,r,ratio", 0), 0u);
    EXPECT_TRUE(fs::exists(out / "report.csv"));
}

TEST(Binary, FinanceWritesChaosTable) {
    TempDir d;
    const fs::path cfg =
        write_file(d.path() / "a.ini", std::string(kSmall) + "[nplayer]\nplayers = 4, 16, 64\nreplicates = 4\n");
    const fs::path out = d.path() / "o";
    run_cli("finance --config " + cfg.string() + " --out " + out.string());
    std::ifstream is(out / "chaos.csv");
    std::string line;
    int rows = -1;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_TRUE(fs::exists(out / "candidate.csv"));
}
