// Batch runner: asymflat run | validate | list-families.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "asymflat/cli/config.hpp"
#include "asymflat/cli/runner.hpp"
#include "asymflat/core/parallel.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

// GRAV_THREADS wins over --threads; 0 means hardware concurrency.
unsigned thread_request(int flag) {
  if (const char* env = std::getenv("GRAV_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring GRAV_THREADS='" << env << "'\n";
  }
  return static_cast<unsigned>(std::max(0, flag));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace asymflat;
  CLI::App app{"Charges and CMC foliations of asymptotically flat initial data"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool force_rt = false;
  int threads = 0;
  std::optional<int> lmax;
  auto* run = app.add_subcommand("run", "execute the tasks of a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (default: the config's output)");
  run->add_flag("--force-rt", force_rt, "compute C and J even when the parity check fails");
  run->add_option("--lmax", lmax, "angular resolution of the flux quadrature");
  run->add_option("--threads", threads, "worker threads, 0 = all cores (GRAV_THREADS overrides)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("--config", validate_path, "config file (JSON)")->required();

  auto* list = app.add_subcommand("list-families", "print the data family kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& [kind, params] : cli::family_catalog())
        std::cout << kind << "\t" << params << "\n";
      return kExitPass;
    }
    if (*validate) {
      const cli::RunConfig c = cli::load_config(validate_path);
      std::cout << "valid: " << c.tasks.size() << " task(s), family " << family_name(c.family)
                << "\n";
      return kExitPass;
    }
    if (lmax && *lmax < 4) throw ConfigError("--lmax: must be >= 4 (got " + std::to_string(*lmax) + ")");
    const cli::RunConfig c = cli::load_config(config_path);
    set_thread_count(thread_request(threads));
    cli::RunOptions opt;
    opt.out_dir = out_dir;
    opt.lmax = lmax;
    opt.force_rt = force_rt;
    const cli::RunResult r = cli::run(c, opt);
    for (const auto& t : r.report.at("tasks")) {
      std::cout << t.at("index").get<std::size_t>() << " " << t.at("type").get<std::string>()
                << ": " << t.at("status").get<std::string>()
                << (t.at("pass").get<bool>() ? " PASS" : " FAIL");
      if (t.contains("message")) std::cout << " (" << t.at("message").get<std::string>() << ")";
      std::cout << "\n";
    }
    std::cout << "report: " << (r.out_dir / "report.json").string() << "\n";
    return r.exit_code == 0 ? kExitPass : kExitAssertion;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}
