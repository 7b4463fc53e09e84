#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "asymflat/cli/config.hpp"
#include "asymflat/cli/runner.hpp"

using namespace asymflat;
namespace fs = std::filesystem;

namespace {

const std::string kCli = ASYMFLAT_CLI_PATH;
const fs::path kConfigs = ASYMFLAT_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("asymflat_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const int s = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    cli::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({"schema_version": 1, "family": {"kind": "flat"}, "tasks": []})";

}  // namespace

TEST(Config, SampleConfigsAreValid) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kConfigs))
    if (e.path().extension() == ".json") {
      EXPECT_NO_THROW(cli::load_config(e.path().string())) << e.path();
      ++n;
    }
  EXPECT_GE(n, 5);
}

TEST(Config, MinimalConfigUsesDefaults) {
  const auto c = cli::parse_config(kMinimal);
  EXPECT_EQ(c.lmax, 16);
  EXPECT_FALSE(c.force_rt);
  EXPECT_EQ(c.schedule.radii.size(), 5u);
  EXPECT_TRUE(c.tasks.empty());
}

TEST(Config, RejectsSlowDecay) {
  const std::string e = config_error(
      R"({"schema_version": 1, "family": {"kind": "schwarzschild", "q": 0.4}, "tasks": []})");
  EXPECT_NE(e.find("/family/q"), std::string::npos) << e;
  EXPECT_NE(e.find("q > 1/2"), std::string::npos) << e;
}

TEST(Config, RejectsNegativeLmax) {
  const std::string e =
      config_error(R"({"schema_version": 1, "family": {"kind": "flat"}, "lmax": -2, "tasks": []})");
  EXPECT_NE(e.find("/lmax"), std::string::npos) << e;
  EXPECT_NE(e.find("non-negative"), std::string::npos) << e;
}

TEST(Config, RejectsUnknownKeysWithPointers) {
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "flat"}, "tasks": [],
                             "colour": 1})")
                .find("/colour"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "flat"},
                             "tasks": [{"type": "rt-check", "radius": 3}]})")
                .find("/tasks/0/radius"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "schwarzschild", "spin": 1},
                             "tasks": []})")
                .find("/family/spin"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "flat"},
                             "tasks": [{"type": "charges", "assert": {"mass": {"value": 1}}}]})")
                .find("/tasks/0/assert/mass/tol"),
            std::string::npos);
}

TEST(Config, RequiresSchemaVersion) {
  EXPECT_NE(config_error(R"({"family": {"kind": "flat"}, "tasks": []})").find("/schema_version"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"schema_version": 7, "family": {"kind": "flat"}, "tasks": []})")
                .find("unsupported"),
            std::string::npos);
}

TEST(Config, UnknownKindsAndTypes) {
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "wormhole"}, "tasks": []})")
                .find("/family/kind"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"schema_version": 1, "family": {"kind": "flat"},
                             "tasks": [{"type": "plot"}]})")
                .find("/tasks/0/type"),
            std::string::npos);
}

TEST(Config, ParseErrorsCarryLineAndColumn) {
  const std::string e = config_error("{\n  \"schema_version\": 1,\n  \"family\": ,\n}");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
}

TEST(Config, ScheduleMustClearTheInnerRadius) {
  EXPECT_NE(config_error(R"({"schema_version": 1,
                             "family": {"kind": "harmonic", "R0": 50},
                             "schedule": {"radii": [40, 80, 160, 320]}, "tasks": []})")
                .find("/schedule"),
            std::string::npos);
}

TEST(Config, NestedFamiliesParse) {
  const auto c = cli::parse_config(R"({"schema_version": 1,
    "family": {"kind": "rigid_motion",
               "base": {"kind": "perturbed", "base": {"kind": "schwarzschild"},
                        "eps": 0.5, "profile": "quadrupole", "R0": 5},
               "rotation": [[0, -1, 0], [1, 0, 0], [0, 0, 1]], "shift": [1, 0, 0]},
    "tasks": []})");
  EXPECT_EQ(family_name(c.family), "rigid(perturbed(schwarzschild, quadrupole))");
  EXPECT_NE(config_error(R"({"schema_version": 1,
    "family": {"kind": "rigid_motion", "base": {"kind": "flat"},
               "rotation": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]}, "tasks": []})")
                .find("/family"),
            std::string::npos);
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Runner, EmptyTaskListPasses) {
  const fs::path d = scratch("empty");
  const auto r = cli::run(cli::parse_config(kMinimal), {(d / "out").string(), {}, false});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.report.at("tasks").empty());
  EXPECT_TRUE(fs::exists(d / "out" / "report.json"));
}

TEST(Runner, SchwarzschildMassWithinTolerance) {
  const fs::path d = scratch("mass");
  const auto r = cli::run(cli::load_config((kConfigs / "schwarzschild_charges.json").string()),
                          {(d / "out").string(), {}, false});
  EXPECT_EQ(r.exit_code, 0);
  const auto& m = r.report.at("tasks")[0].at("result").at("m");
  EXPECT_NEAR(m.at("value").get<double>(), 1.0, 1e-6);
  EXPECT_TRUE(m.contains("error"));
  EXPECT_TRUE(m.contains("radii"));
  EXPECT_TRUE(m.contains("lmax"));
  const std::string csv = slurp(d / "out" / "0_charges.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,m,Px,Py,Pz,Cx,Cy,Cz,Jx,Jy,Jz,m_I,m_I_flat");
  EXPECT_TRUE(fs::exists(d / "out" / "plotdata" / "0_charges_mass.csv"));
}

TEST(Runner, FlatFoliationIsAnExpectedRefusal) {
  const fs::path d = scratch("flat");
  const auto r = cli::run(cli::load_config((kConfigs / "flat_foliation.json").string()),
                          {(d / "out").string(), {}, false});
  EXPECT_EQ(r.exit_code, 0);
  const auto& t = r.report.at("tasks")[1];
  EXPECT_EQ(t.at("status"), "refused");
  EXPECT_TRUE(t.at("expected_refusal").get<bool>());
  EXPECT_NE(t.at("message").get<std::string>().find("mass is zero"), std::string::npos);
}

TEST(Runner, FailedAssertionStillWritesReport) {
  const fs::path d = scratch("fail");
  const auto c = cli::parse_config(R"({"schema_version": 1,
    "family": {"kind": "schwarzschild", "mass": 1},
    "tasks": [{"type": "charges", "assert": {"mass": {"value": 2, "tol": 1e-3}}}]})");
  const auto r = cli::run(c, {(d / "out").string(), {}, false});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(r.report.at("pass").get<bool>());
  EXPECT_TRUE(fs::exists(d / "out" / "report.json"));
}

TEST(Runner, ParityRefusalAndForcing) {
  const char* cfg = R"({"schema_version": 1,
    "family": {"kind": "rt_violating", "q": 0.75},
    "schedule": {"start": 100, "factor": 2, "count": 6},
    "tasks": [{"type": "charges"}]})";
  const fs::path d = scratch("parity");
  const auto plain = cli::run(cli::parse_config(cfg), {(d / "a").string(), {}, false});
  EXPECT_TRUE(plain.report.at("tasks")[0].at("result").at("C").is_null());
  const auto forced = cli::run(cli::parse_config(cfg), {(d / "b").string(), {}, true});
  const auto& res = forced.report.at("tasks")[0].at("result");
  EXPECT_FALSE(res.at("C").is_null());
  EXPECT_TRUE(res.at("center_cauchy").at("non_cauchy").get<bool>());
}

TEST(Binary, ExitCodes) {
  const fs::path d = scratch("bin");
  EXPECT_EQ(run_cli("list-families"), 0);
  EXPECT_EQ(run_cli("validate --config " + (kConfigs / "foliation.json").string()), 0);
  const fs::path bad = write(
      d, R"({"schema_version": 1, "family": {"kind": "schwarzschild", "q": 0.4}, "tasks": []})");
  EXPECT_EQ(run_cli("validate --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("run --config " + bad.string() + " --out " + (d / "o").string()), 2);
  EXPECT_EQ(run_cli("run --config " + (d / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("run --config " + (kConfigs / "empty.json").string() + " --out " +
                    (d / "empty").string()),
            0);
  EXPECT_EQ(run_cli("run --config " + (kConfigs / "empty.json").string() + " --lmax -3"), 2);
  const fs::path failing = write(d, R"({"schema_version": 1, "family": {"kind": "flat"},
    "tasks": [{"type": "rt-check", "assert": {"satisfied": false}}]})");
  EXPECT_EQ(run_cli("run --config " + failing.string() + " --out " + (d / "f").string()), 1);
  EXPECT_TRUE(fs::exists(d / "f" / "report.json"));
}

TEST(Binary, ReportsAreReproducible) {
  const fs::path d = scratch("repro");
  const std::string cfg = (kConfigs / "harmonic_identity.json").string();
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (d / "a").string() + " --threads 1"), 0);
  ASSERT_EQ(setenv("GRAV_THREADS", "4", 1), 0);
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (d / "b").string() + " --threads 1"), 0);
  unsetenv("GRAV_THREADS");
  auto strip = [](std::string s) { return s.substr(0, s.find("\"timing\"")); };
  EXPECT_EQ(strip(slurp(d / "a" / "report.json")), strip(slurp(d / "b" / "report.json")));
  for (const auto& e : fs::recursive_directory_iterator(d / "a"))
    if (e.path().extension() == ".csv") {
      EXPECT_EQ(slurp(e.path()), slurp(d / "b" / fs::relative(e.path(), d / "a"))) << e.path();
    }
}
