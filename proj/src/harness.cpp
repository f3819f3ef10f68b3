#include "bsq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bsq/io.hpp"
#include "bsq/scenario.hpp"
#include "bsq/studies.hpp"

namespace bsq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int worker_count(int threads) {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

json verdict_json(const AsymptoticVerdict& v) {
  return {{"name", v.name},           {"quantity", v.quantity},   {"tail_start", v.tail_start},
          {"statistic", v.statistic}, {"threshold", v.threshold}, {"passed", v.passed},
          {"inconclusive", v.inconclusive}, {"fitted", v.fitted}};
}

json verdicts_json(const std::vector<AsymptoticVerdict>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(verdict_json(v));
  return a;
}

json inequality_json(const InequalityAudit& a) {
  return {{"sobolev_c", a.sobolev_c},     {"ladyzhenskaya_c", a.ladyzhenskaya_c},
          {"gronwall_c", a.gronwall_c},   {"growth_c", a.growth_c},
          {"theta_t_c", a.theta_t_c},     {"l3w23_integral", a.l3w23_integral},
          {"utt_sup", a.utt_sup}};
}

json lemma_json(const LemmaVerdict& v) {
  return {{"hypotheses_hold", v.hypotheses_hold},
          {"conclusion_holds", v.conclusion_holds},
          {"fitted_c", v.fitted_c},
          {"failures", v.failures}};
}

bool breached(const std::vector<AsymptoticVerdict>& vs) {
  return std::any_of(vs.begin(), vs.end(), [](const auto& v) { return !v.passed && !v.inconclusive; });
}

std::vector<DiagnosticsRecord> read_records(const fs::path& csv) {
  const CsvTable t = read_csv(csv);
  if (t.header != diagnostics_columns()) throw std::runtime_error("'" + csv.string() + "' has an unexpected header");
  std::vector<DiagnosticsRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(from_row(row));
  return out;
}

std::string join_header(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
  return s;
}

const std::vector<std::string>& picard_columns() {
  static const std::vector<std::string> cols = {"t_start",  "window",     "bisections",      "converged",
                                                "iterations", "data_norm", "final_composite", "max_ratio"};
  return cols;
}

std::vector<double> picard_row(const PicardReport& r) {
  return {r.t_start,
          r.window,
          static_cast<double>(r.bisections),
          r.converged ? 1.0 : 0.0,
          static_cast<double>(r.iterations.size()),
          r.data_norm,
          r.iterations.empty() ? 0.0 : r.iterations.back().composite,
          r.max_ratio()};
}

double initial_energy(const DiagnosticsRecord& r) { return 0.5 * (r.u_l2 * r.u_l2 + r.theta_l2 * r.theta_l2); }

// Largest prefix with a uniform record spacing.
std::size_t uniform_prefix(const std::vector<double>& t) {
  if (t.size() < 3) return t.size();
  const double h = t[1] - t[0];
  std::size_t n = 2;
  while (n < t.size() && std::abs((t[n] - t[n - 1]) - h) <= 1e-9 * std::max(1.0, std::abs(h))) ++n;
  return n;
}

}  // namespace

fs::path output_root() {
  if (const char* env = std::getenv("BSQ_OUTPUT_ROOT"); env && *env) return env;
  return "bsq-output";
}

fs::path resolve_output_dir(const SimConfig& config, const std::optional<fs::path>& out) {
  if (out) return *out;
  if (!config.output.dir.empty()) return config.output.dir;
  return output_root() / (config.scenario.name + "-" + hash_hex(config_hash(config)));
}

json write_basis_report(const SimConfig& config, const fs::path& dir) {
  const BasisPtr basis = build_basis(config);
  const BasisReport rep = basis->verify();
  std::string csv = "index,lambda,descriptor\n";
  char buf[64];
  for (std::size_t j = 0; j < basis->size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", basis->eigenvalues()[static_cast<Eigen::Index>(j)]);
    csv += std::to_string(j + 1) + "," + buf + ",\"" + basis->descriptor(j) + "\"\n";
  }
  json j = {{"hash", hash_hex(config_hash(config))},
            {"geometry", to_string(config.geometry.kind)},
            {"modes", basis->size()},
            {"orthonormality_error", rep.orthonormality_error},
            {"eigen_residual", rep.eigen_residual},
            {"divergence_max", rep.divergence_max},
            {"wall_max", rep.wall_max},
            {"rejected", rep.rejected}};
  write_text(dir / "eigenvalues.csv", csv);
  write_json(dir / "basis.json", j);
  return j;
}

RunSummary run_simulation(const SimConfig& config, const fs::path& dir, const std::optional<fs::path>& restart) {
  config.validate();
  const BasisPtr basis = build_basis(config);
  const std::uint64_t hash = config_hash(config);
  const std::string hex = hash_hex(hash);
  const double dt = config.picard.dt;

  PicardConfig picard = config.picard;
  BoussinesqState state;
  if (restart) {
    const Checkpoint c = read_checkpoint(*restart);
    if (c.config_hash != hash)
      throw std::invalid_argument("checkpoint was written by config " + hash_hex(c.config_hash) + ", not " + hex);
    if (c.nx != basis->grid().nx || c.ny != basis->grid().ny ||
        static_cast<std::size_t>(c.xi.size()) != basis->size())
      throw std::invalid_argument("checkpoint does not match the configured discretization");
    state.xi = c.xi;
    state.theta = basis->make_scalar();
    std::copy(c.theta.begin(), c.theta.end(), state.theta.values().begin());
    state.time = c.time;
    picard.window_max = std::min(picard.window_max, c.window);
  } else {
    state = make_initial_state(*basis, config.scenario);
  }

  fs::create_directories(dir);
  write_json(dir / "config.json", json{{"hash", hex}, {"config", to_json(config)}});
  const fs::path ckpt_dir = dir / "checkpoints";
  if (config.output.checkpoint_every > 0) fs::create_directories(ckpt_dir);

  std::ofstream diag(dir / "diagnostics.csv", std::ios::binary);
  std::ofstream pic(dir / "picard.csv", std::ios::binary);
  if (!diag || !pic) throw std::runtime_error("cannot create outputs in '" + dir.string() + "'");
  diag << join_header(diagnostics_columns()) << '\n';
  pic << join_header(picard_columns()) << '\n';

  RunSummary summary;
  summary.final_time = state.time;
  const bool fresh = !restart;
  const double t_end = config.horizon;
  std::vector<double> e_times, e_energy, e_grad;
  double carried = picard.window_max;
  int windows_done = 0;

  auto observe = [&](const WindowSolution& sol, const PicardReport& rep) {
    const long long offset = std::llround(sol.u.times.front() / dt);
    const bool first = fresh && windows_done == 0;
    const bool last = sol.u.times.back() >= t_end - 0.5 * dt;
    WindowDiagnostics d = diagnose_window(*basis, sol, config.output.record_every, first, last, offset);
    for (const auto& r : d.records) {
      diag << format_csv_row(to_row(r)) << '\n';
      summary.records.push_back(r);
    }
    diag.flush();
    for (std::size_t k = e_times.empty() ? 0 : 1; k < d.times.size(); ++k) {
      e_times.push_back(d.times[k]);
      e_energy.push_back(d.energy[k]);
      e_grad.push_back(d.grad_u[k]);
    }
    pic << format_csv_row(picard_row(rep)) << '\n';
    pic.flush();
    if (rep.bisections > 0) carried = std::min(carried, rep.window);
    ++windows_done;
    summary.final_time = sol.u.times.back();
    if (config.output.checkpoint_every > 0 && windows_done % config.output.checkpoint_every == 0) {
      const BoussinesqState end = sol.final_state();
      Checkpoint c;
      c.config_hash = hash;
      c.time = end.time;
      c.step = std::llround(end.time / dt);
      c.window = carried;
      c.xi = end.xi;
      c.nx = end.theta.nx();
      c.ny = end.theta.ny();
      c.theta.assign(end.theta.values().begin(), end.theta.values().end());
      char name[48];
      std::snprintf(name, sizeof name, "step-%09lld.bin", static_cast<long long>(c.step));
      write_checkpoint(ckpt_dir / name, c);
    }
  };

  std::vector<PicardReport> failed;
  if (state.time < t_end - 0.5 * dt) {
    try {
      BoussinesqResult res = solve_boussinesq(*basis, state, t_end - state.time, picard, observe);
      summary.reports = std::move(res.reports);
      summary.solver_ok = true;
    } catch (const NonconvergenceError& e) {
      summary.error = e.what();
      failed.push_back(e.report());
    } catch (const std::runtime_error& e) {
      summary.error = e.what();
    }
  } else {
    summary.solver_ok = true;
  }
  diag.close();
  pic.close();

  json energy_j = json::object();
  if (e_times.size() >= 2) {
    const EnergyAudit audit = energy_balance_audit(e_times, e_energy, e_grad);
    summary.energy_residual_max = audit.max_abs_normalized;
    energy_j = {{"max_abs_normalized", audit.max_abs_normalized}, {"initial_energy", e_energy.front()}};
  }
  summary.verdicts = asymptotic_report(summary.records, config.thresholds);
  summary.audit_breach = breached(summary.verdicts);

  json picard_j = {{"windows", summary.reports.size()}};
  double max_ratio = 0.0;
  int bisections = 0;
  for (const auto& r : summary.reports) {
    max_ratio = std::max(max_ratio, r.max_ratio());
    bisections += r.bisections;
  }
  picard_j["max_ratio"] = max_ratio;
  picard_j["bisections"] = bisections;
  if (!failed.empty()) picard_j["failed_window"] = {{"t_start", failed[0].t_start}, {"window", failed[0].window}};

  json out = {{"hash", hex},
              {"solver", {{"ok", summary.solver_ok}, {"error", summary.error}, {"final_time", summary.final_time}}},
              {"verdicts", verdicts_json(summary.verdicts)},
              {"energy", energy_j},
              {"picard", picard_j},
              {"audit_breach", summary.audit_breach}};
  if (!summary.records.empty()) out["inequalities"] = inequality_json(inequality_audit(summary.records));
  write_json(dir / "verdicts.json", out);
  return summary;
}

json picard_study(const SimConfig& config, const std::vector<double>& windows, const fs::path& dir) {
  config.validate();
  const BasisPtr basis = build_basis(config);
  const BoussinesqState state0 = make_initial_state(*basis, config.scenario);
  const auto rows = contraction_sweep(*basis, state0, config.picard, windows, worker_count(config.threads));

  CsvTable table;
  table.header = {"window", "iterations", "converged", "max_ratio"};
  json sweep = json::array();
  bool monotone = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    table.rows.push_back({r.window, static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0, r.max_ratio});
    sweep.push_back({{"window", r.window},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"max_ratio", r.max_ratio},
                     {"ratios", r.ratios},
                     {"error", r.error}});
    if (k > 0 && windows[k] < windows[k - 1] && r.max_ratio > rows[k - 1].max_ratio) monotone = false;
  }

  json selected;
  try {
    const WindowResult w = solve_window(*basis, state0, config.picard.window_max, config.picard);
    std::vector<double> ratios;
    double tail_max = 0.0;
    for (int n = 1; n < static_cast<int>(w.report.iterations.size()); ++n) {
      ratios.push_back(w.report.ratio(n));
      if (n >= 2) tail_max = std::max(tail_max, w.report.ratio(n));
    }
    selected = {{"window", w.report.window},
                {"bisections", w.report.bisections},
                {"converged", w.report.converged},
                {"ratios", ratios},
                {"max_ratio_from_2", tail_max},
                {"abandoned_windows", w.report.abandoned_windows}};
  } catch (const NonconvergenceError& e) {
    selected = {{"error", e.what()}, {"window", e.report().window}};
  }

  json out = {{"hash", hash_hex(config_hash(config))},
              {"data_norm", data_norm(*basis, state0)},
              {"sweep", sweep},
              {"monotone", monotone},
              {"selected", selected}};
  write_csv(dir / "contraction.csv", table);
  write_json(dir / "picard.json", out);
  return out;
}

json asymptotics_report(const fs::path& dir, const AsymptoticThresholds& thresholds) {
  const auto records = read_records(dir / "diagnostics.csv");
  const auto verdicts = asymptotic_report(records, thresholds);

  std::vector<double> t, f, g, h;
  for (const auto& r : records) {
    t.push_back(r.time);
    f.push_back(r.grad_u_l2 * r.grad_u_l2);
    g.push_back(r.au_l2 * r.au_l2);
    h.push_back(r.stokes_residual_l2 * r.stokes_residual_l2);
  }
  const std::size_t n = uniform_prefix(t);
  t.resize(n);
  f.resize(n);
  g.resize(n);
  h.resize(n);
  json lemma = json::object();
  if (n >= 3) {
    lemma["grad_u_squared_i"] = lemma_json(decay_lemma_check(t, f, {}, {}, DecayVariant::i));
    lemma["grad_u_squared_ii"] = lemma_json(decay_lemma_check(t, f, g, {}, DecayVariant::ii));
  }
  json out = {{"records", records.size()},
              {"verdicts", verdicts_json(verdicts)},
              {"lemma", lemma},
              {"audit_breach", breached(verdicts)}};
  if (!records.empty()) out["inequalities"] = inequality_json(inequality_audit(records));
  write_json(dir / "asymptotics.json", out);
  return out;
}

void set_json_path(json& j, const std::string& path, const json& value) {
  if (path.empty()) throw std::invalid_argument("empty parameter path");
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw std::invalid_argument("bad parameter path '" + path + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

namespace {

RotationSetup rotation_from_json(const json& j) {
  RotationSetup s;
  for (const auto& [key, value] : j.items()) {
    if (key == "n") continue;
    else if (key == "omega") s.omega = value.get<double>();
    else if (key == "t_end") s.t_end = value.get<double>();
    else if (key == "steps") s.steps = value.get<int>();
    else if (key == "sigma") s.sigma = value.get<double>();
    else if (key == "offset") s.offset = value.get<double>();
    else if (key == "order") s.transport.interpolation.order = value.get<int>();
    else if (key == "substeps") s.transport.substeps = value.get<int>();
    else throw std::invalid_argument("unknown rotation parameter '" + key + "'");
  }
  return s;
}

json sweep_point(const std::string& kind, const json& params, const fs::path& dir) {
  if (kind == "rotation") {
    const RotationResult r = rotation_transport(params.value("n", 64), rotation_from_json(params));
    return {{"n", r.n}, {"linf_error", r.linf_error}, {"l2_drift", r.l2_drift}};
  }
  const SimConfig config = config_from_json(params);
  if (kind == "run") {
    const RunSummary s = run_simulation(config, dir);
    double max_ratio = 0.0;
    for (const auto& r : s.reports) max_ratio = std::max(max_ratio, r.max_ratio());
    if (!s.solver_ok) throw std::runtime_error(s.error);
    return {{"final_time", s.final_time},
            {"max_ratio", max_ratio},
            {"energy_residual_max", s.energy_residual_max},
            {"audit_breach", s.audit_breach}};
  }
  if (kind == "picard") {
    const BasisPtr basis = build_basis(config);
    const BoussinesqState state0 = make_initial_state(*basis, config.scenario);
    const auto rows = contraction_sweep(*basis, state0, config.picard, {config.picard.window_max});
    return {{"window", rows[0].window},
            {"iterations", rows[0].iterations},
            {"converged", rows[0].converged},
            {"max_ratio", rows[0].max_ratio},
            {"ratios", rows[0].ratios}};
  }
  throw std::invalid_argument("unknown sweep kind '" + kind + "'");
}

}  // namespace

json run_sweep(const json& spec, const fs::path& dir, int threads) {
  const std::string kind = spec.value("kind", std::string("run"));
  if (kind != "run" && kind != "picard" && kind != "rotation")
    throw std::invalid_argument("unknown sweep kind '" + kind + "'");
  const json base = spec.value("template", json::object());
  const json grid = spec.value("grid", json::object());
  if (!grid.is_object()) throw std::invalid_argument("sweep grid must be an object of value lists");

  std::vector<std::pair<std::string, std::vector<json>>> axes;
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array()) throw std::invalid_argument("sweep axis '" + key + "' must be a list");
    axes.emplace_back(key, std::vector<json>(values.begin(), values.end()));
  }
  std::size_t count = axes.empty() ? 0 : 1;
  for (const auto& a : axes) count *= a.second.size();

  std::vector<json> params(count), results(count);
  for (std::size_t p = 0; p < count; ++p) {
    json point = json::object();
    std::size_t rest = p;
    for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
      point[a->first] = a->second[rest % a->second.size()];
      rest /= a->second.size();
    }
    params[p] = point;
  }

  parallel_for(count, worker_count(threads), [&](std::size_t p) {
    json patched = base;
    json entry = {{"params", params[p]}};
    try {
      for (const auto& [key, value] : params[p].items()) set_json_path(patched, key, value);
      char name[32];
      std::snprintf(name, sizeof name, "point-%03zu", p);
      entry["result"] = sweep_point(kind, patched, dir / name);
      entry["ok"] = true;
    } catch (const std::exception& e) {
      entry["ok"] = false;
      entry["error"] = e.what();
    }
    results[p] = std::move(entry);
  });

  json out = {{"kind", kind}, {"points", results}};
  if (kind == "picard") {
    bool monotone = true;
    for (std::size_t p = 1; p < count; ++p) {
      if (!results[p]["ok"] || !results[p - 1]["ok"]) continue;
      const auto& a = results[p - 1]["result"];
      const auto& b = results[p]["result"];
      if (b["window"].get<double>() < a["window"].get<double>() &&
          b["max_ratio"].get<double>() > a["max_ratio"].get<double>())
        monotone = false;
    }
    out["monotone"] = monotone;
  }
  if (kind == "rotation") {
    json orders = json::array();
    for (std::size_t p = 1; p < count; ++p) {
      if (!results[p]["ok"] || !results[p - 1]["ok"]) continue;
      const auto& a = results[p - 1]["result"];
      const auto& b = results[p]["result"];
      const double ratio = b["n"].get<double>() / a["n"].get<double>();
      orders.push_back({{"from", a["n"]},
                        {"to", b["n"]},
                        {"order", std::log(a["linf_error"].get<double>() / b["linf_error"].get<double>()) /
                                      std::log(ratio)}});
    }
    out["orders"] = orders;
  }
  write_json(dir / "sweep.json", out);
  return out;
}

json verify_run(const fs::path& dir) {
  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, bool passed, const std::string& detail = {}) {
    checks.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
    ok = ok && passed;
  };

  const json echo = read_json(dir / "config.json");
  const SimConfig config = config_from_json(echo.at("config"));
  const std::string hex = hash_hex(config_hash(config));
  check("config hash", echo.at("hash") == hex, hex);

  const auto records = read_records(dir / "diagnostics.csv");
  bool finite = true;
  for (const auto& r : records)
    for (double v : to_row(r)) finite = finite && std::isfinite(v);
  check("diagnostics finite", finite, std::to_string(records.size()) + " records");

  const CsvTable picard = read_csv(dir / "picard.csv");
  check("picard schema", picard.header == picard_columns());

  const json verdicts = read_json(dir / "verdicts.json");
  check("verdicts hash", verdicts.at("hash") == hex);
  const auto recomputed = asymptotic_report(records, config.thresholds);
  check("verdicts reproducible", verdicts.at("verdicts").dump() == verdicts_json(recomputed).dump());

  std::size_t ckpts = 0;
  if (fs::exists(dir / "checkpoints")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "checkpoints"))
      if (e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        const Checkpoint c = read_checkpoint(f);
        check("checkpoint " + f.filename().string(), hash_hex(c.config_hash) == hex);
      } catch (const std::exception& e) {
        check("checkpoint " + f.filename().string(), false, e.what());
      }
      ++ckpts;
    }
  }

  json audit = json::object();
  std::vector<std::string> breaches;
  if (!records.empty()) {
    const double e0 = initial_energy(records.front());
    double residual = 0.0;
    for (const auto& r : records) residual = std::max(residual, std::abs(r.energy_residual));
    audit["energy_residual_max"] = e0 > 0.0 ? residual / e0 : residual;
    audit["inequalities"] = inequality_json(inequality_audit(records));
  }
  audit["verdicts"] = verdicts_json(recomputed);
  for (const auto& v : recomputed)
    if (!v.passed && !v.inconclusive) breaches.push_back(v.name);
  if (!verdicts.at("solver").at("ok").get<bool>()) breaches.push_back("solver");

  return {{"hash", hex},
          {"consistent", ok},
          {"checks", checks},
          {"checkpoints", ckpts},
          {"audit", audit},
          {"breaches", breaches}};
}

double log_square_slope(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> tt, yy;
  for (std::size_t k = 0; k < t.size() && k < y.size(); ++k)
    if (y[k] > 0.0 && std::isfinite(y[k])) {
      tt.push_back(t[k]);
      yy.push_back(y[k] * y[k]);
    }
  const std::size_t half = tt.size() / 2;
  tt.erase(tt.begin(), tt.begin() + static_cast<std::ptrdiff_t>(half));
  yy.erase(yy.begin(), yy.begin() + static_cast<std::ptrdiff_t>(half));
  return log_slope(tt, yy, 0.0);
}

std::vector<fs::path> plot_run(const fs::path& dir, std::vector<std::string>* warnings) {
  const CsvTable table = read_csv(dir / "diagnostics.csv");
  if (table.rows.empty()) throw std::runtime_error("'" + (dir / "diagnostics.csv").string() + "' has no records");
  const auto time_it = std::find(table.header.begin(), table.header.end(), "time");
  if (time_it == table.header.end()) throw std::runtime_error("diagnostics.csv has no time column");
  const std::size_t tc = static_cast<std::size_t>(time_it - table.header.begin());
  std::vector<double> t;
  for (const auto& row : table.rows) t.push_back(row[tc]);

  std::vector<std::pair<fs::path, std::string>> figures;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == tc) continue;
    const std::string& name = table.header[c];
    PlotSeries s;
    s.title = name;
    s.xlabel = "time";
    s.ylabel = name;
    s.x = t;
    bool positive = true, any = false;
    for (const auto& row : table.rows) {
      s.y.push_back(row[c]);
      if (std::isfinite(row[c]) && row[c] != 0.0) any = true;
      if (row[c] < 0.0) positive = false;
    }
    s.log_y = positive && any && name != "energy_residual" && name.rfind("probe_", 0) != 0;
    if (s.log_y) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "slope of ln(%s^2): %.6g", name.c_str(), log_square_slope(t, s.y));
      s.annotation = buf;
    }
    try {
      figures.emplace_back(dir / "plots" / (name + ".svg"), render_svg(s));
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back("skipping " + name + ": " + e.what());
    }
  }
  std::vector<fs::path> written;
  for (const auto& [path, svg] : figures) {
    write_text(path, svg);
    written.push_back(path);
  }
  return written;
}

}  // namespace bsq
