#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bsq/config.hpp"
#include "bsq/harness.hpp"
#include "bsq/io.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, breach = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = -1;
  bool strict = false;
};

void add_common(CLI::App* app, Common& c, bool need_config) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration file");
  if (need_config) opt->required();
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app->add_flag("--strict", c.strict, "fail on any audit breach");
}

bsq::SimConfig load(const Common& c) {
  bsq::SimConfig cfg = c.config.empty() ? bsq::SimConfig{} : bsq::load_config(c.config);
  if (c.threads >= 0) cfg.threads = c.threads;
  cfg.validate();
  return cfg;
}

std::optional<fs::path> out_dir(const Common& c) {
  if (c.out.empty()) return std::nullopt;
  return fs::path(c.out);
}

fs::path existing_dir(const Common& c) {
  if (c.out.empty()) throw std::invalid_argument("--out must name a run directory");
  return c.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin lab for the 2D viscous Boussinesq system without diffusivity"};
  app.require_subcommand(1);

  Common basis_opts, run_opts, picard_opts, asym_opts, sweep_opts, verify_opts, plot_opts;
  std::string restart;
  std::vector<double> windows = {0.4, 0.2, 0.1, 0.05};

  auto* basis_cmd = app.add_subcommand("basis", "build and verify the Stokes basis");
  add_common(basis_cmd, basis_opts, false);
  auto* run_cmd = app.add_subcommand("run", "solve a scenario and write diagnostics");
  add_common(run_cmd, run_opts, true);
  run_cmd->add_option("--restart", restart, "continue from a checkpoint")->check(CLI::ExistingFile);
  auto* picard_cmd = app.add_subcommand("picard", "Picard contraction study over window lengths");
  add_common(picard_cmd, picard_opts, true);
  picard_cmd->add_option("--windows", windows, "window lengths to sweep");
  auto* asym_cmd = app.add_subcommand("asymptotics", "long-horizon run (or stored run) with decay verdicts");
  add_common(asym_cmd, asym_opts, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter grid over a config template");
  add_common(sweep_cmd, sweep_opts, true);
  auto* verify_cmd = app.add_subcommand("verify", "consistency checks and audits of a stored run");
  add_common(verify_cmd, verify_opts, false);
  auto* plot_cmd = app.add_subcommand("plot", "SVG time series of a stored run");
  add_common(plot_cmd, plot_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (*basis_cmd) {
      const auto cfg = load(basis_opts);
      const fs::path dir = bsq::resolve_output_dir(cfg, out_dir(basis_opts));
      const auto j = bsq::write_basis_report(cfg, dir);
      std::cout << j.dump(2) << '\n';
      const bool bad = j["orthonormality_error"].get<double>() > 1e-10 || !j["rejected"].empty();
      return basis_opts.strict && bad ? Exit::breach : Exit::ok;
    }
    if (*run_cmd || *asym_cmd) {
      const Common& c = *run_cmd ? run_opts : asym_opts;
      if (*asym_cmd && c.config.empty()) {
        const auto j = bsq::asymptotics_report(existing_dir(c), {});
        std::cout << j.dump(2) << '\n';
        return c.strict && j["audit_breach"].get<bool>() ? Exit::breach : Exit::ok;
      }
      const auto cfg = load(c);
      const fs::path dir = bsq::resolve_output_dir(cfg, out_dir(c));
      std::optional<fs::path> from;
      if (!restart.empty()) from = restart;
      const auto s = bsq::run_simulation(cfg, dir, from);
      std::cout << "output: " << dir.string() << '\n';
      std::cout << "final time: " << s.final_time << "  records: " << s.records.size() << '\n';
      if (*asym_cmd) std::cout << bsq::asymptotics_report(dir, cfg.thresholds).dump(2) << '\n';
      for (const auto& v : s.verdicts)
        std::cout << v.name << ": " << (v.inconclusive ? "inconclusive" : v.passed ? "pass" : "fail") << " ("
                  << v.statistic << " vs " << v.threshold << ")\n";
      if (!s.solver_ok) {
        std::cerr << "solver failed: " << s.error << '\n';
        return Exit::failure;
      }
      return c.strict && s.audit_breach ? Exit::breach : Exit::ok;
    }
    if (*picard_cmd) {
      const auto cfg = load(picard_opts);
      const fs::path dir = bsq::resolve_output_dir(cfg, out_dir(picard_opts));
      const auto j = bsq::picard_study(cfg, windows, dir);
      std::cout << j.dump(2) << '\n';
      return picard_opts.strict && !j["monotone"].get<bool>() ? Exit::breach : Exit::ok;
    }
    if (*sweep_cmd) {
      const auto spec = bsq::read_json(sweep_opts.config);
      fs::path dir = sweep_opts.out.empty() ? bsq::output_root() / "sweep" : fs::path(sweep_opts.out);
      const int threads = sweep_opts.threads >= 0 ? sweep_opts.threads : 0;
      const auto j = bsq::run_sweep(spec, dir, threads);
      std::cout << j.dump(2) << '\n';
      bool all_ok = true;
      for (const auto& p : j["points"]) all_ok = all_ok && p["ok"].get<bool>();
      return sweep_opts.strict && !all_ok ? Exit::breach : Exit::ok;
    }
    if (*verify_cmd) {
      const auto j = bsq::verify_run(existing_dir(verify_opts));
      std::cout << j.dump(2) << '\n';
      if (!j["consistent"].get<bool>()) return Exit::failure;
      return verify_opts.strict && !j["breaches"].empty() ? Exit::breach : Exit::ok;
    }
    if (*plot_cmd) {
      std::vector<std::string> warnings;
      const auto files = bsq::plot_run(existing_dir(plot_opts), &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : files) std::cout << f.string() << '\n';
      return Exit::ok;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::failure;
  }
  return Exit::ok;
}
