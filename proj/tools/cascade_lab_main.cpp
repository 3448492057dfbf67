#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cascade/adversarial.hpp"
#include "cascade/analytic.hpp"
#include "cascade/config_json.hpp"
#include "cascade/csv.hpp"
#include "cascade/errors.hpp"
#include "cascade/montecarlo.hpp"
#include "cascade/oracle.hpp"
#include "cascade/version.hpp"

namespace {

using cascade::ConfigError;
using nlohmann::json;

struct OutputSink {
  std::string path;  // empty = stdout
  void write(const std::string& content) const {
    if (path.empty())
      std::cout << content;
    else
      cascade::atomic_write_file(path, content);
  }
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return j;
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError(flag, "cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError(flag, "empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& s, const char* flag) {
  // "lo:hi:step"
  double lo, hi, step;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
      step <= 0 || hi < lo)
    throw ConfigError(flag, "expected lo:hi:step with step > 0");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + step * i;
    if (v > hi + step * 0.5) break;
    out.push_back(v);
  }
  return out;
}

cascade::FitWindow parse_window(const std::string& s, const char* flag) {
  double lo, hi;
  if (std::sscanf(s.c_str(), "%lf:%lf", &lo, &hi) != 2 || hi < lo || lo < 1)
    throw ConfigError(flag, "expected lo:hi with 1 <= lo <= hi");
  return {lo, hi};
}

unsigned parse_workers(const std::string& s) {
  if (s == "auto" || s.empty()) return 0;
  try {
    const long v = std::stol(s);
    if (v < 1) throw std::invalid_argument("");
    return static_cast<unsigned>(v);
  } catch (...) {
    throw ConfigError("workers", "expected a positive integer or 'auto'");
  }
}

unsigned default_workers() {
  if (const char* env = std::getenv("CASCADE_LAB_WORKERS"))
    return parse_workers(env);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_analytic(const std::string& gammas_s, const std::string& rho_grid_s,
                 const std::string& cps_s, const OutputSink& out) {
  const std::vector<double> gammas = parse_list(gammas_s, "gamma");
  const std::vector<double> rhos = parse_grid(rho_grid_s, "rho-grid");
  const std::vector<double> cps =
      cps_s.empty() ? std::vector<double>{} : parse_list(cps_s, "c-p");

  const auto rows = cascade::analytic::rate_curve(gammas, rhos, cps);
  json meta = {{"command", "analytic"},
               {"gammas", gammas},
               {"rho_grid", rho_grid_s},
               {"c_ps", cps}};
  std::string csv = cascade::output_header(cascade::config_digest(meta)) + "\n";
  csv += "gamma,rho,c_p,rate,regime_tag\n";
  for (const auto& r : rows) {
    csv += cascade::fmt12(r.gamma) + "," + cascade::fmt12(r.rho) + "," +
           cascade::fmt12(r.c_p) + "," + cascade::fmt12(r.rate) + "," +
           cascade::analytic::to_string(r.tag) + "\n";
  }
  out.write(csv);
  return 0;
}

int cmd_simulate(const std::string& config_path, const OutputSink& out,
                 const std::string& format, unsigned workers,
                 const std::string& seed_override,
                 const std::string& fit_window_s) {
  cascade::ExperimentConfig cfg =
      cascade::parse_experiment_config(load_json_file(config_path));
  if (!seed_override.empty()) cfg.master_seed = std::stoull(seed_override);

  const json resolved = cascade::resolved_config_json(cfg);
  const std::string digest = cascade::config_digest(resolved);

  cascade::RunOptions opts;
  opts.workers = workers;
  const auto start = std::chrono::steady_clock::now();
  const cascade::ErrorSeries series = cascade::run_experiment(cfg, opts);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  cascade::FitWindow window =
      fit_window_s.empty()
          ? cascade::FitWindow{std::max(2.0, std::sqrt(double(cfg.horizon))),
                               static_cast<double>(cfg.horizon)}
          : parse_window(fit_window_s, "fit-window");
  json summary = {{"runtime_seconds", runtime},
                  {"te_mean", series.te_mean()},
                  {"trials", series.trials}};
  const cascade::analytic::RateResult ar = cascade::analytic_rate_for(cfg);
  summary["analytic_rate"] = ar.value;
  summary["regime_tag"] = cascade::analytic::to_string(ar.tag);
  try {
    const cascade::SlopeFit fit = cascade::fit_rate(series, window);
    summary["slope"] = fit.slope;
    summary["ci"] = {fit.ci_low, fit.ci_high};
    summary["fit_points"] = fit.points_used;
    summary["fit_window"] = {window.t_min, window.t_max};
  } catch (const cascade::InsufficientData& e) {
    summary["slope"] = nullptr;
    summary["fit_error"] = e.what();
  }

  if (format == "json") {
    json doc = {{"tool", cascade::kToolName},
                {"version", cascade::kToolVersion},
                {"config", resolved},
                {"config_digest", digest},
                {"summary", summary}};
    json rows = json::array();
    for (size_t i = 0; i < series.checkpoints.size(); ++i) {
      rows.push_back({{"t", series.checkpoints[i]},
                      {"p_t", series.p_at[i]},
                      {"q_t", series.q_at[i]},
                      {"err_count", series.error_counts[i]},
                      {"trials", series.trials},
                      {"p_hat", series.p_hat(i)},
                      {"stderr", series.stderr_at(i)}});
    }
    doc["series"] = rows;
    out.write(doc.dump(2) + "\n");
  } else {
    out.write(cascade::error_series_csv(series, digest));
    if (!out.path.empty()) std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& rhos_s,
              const std::string& gammas_s, const std::string& fit_window_s,
              const OutputSink& out, unsigned workers) {
  cascade::ExperimentConfig base =
      cascade::parse_experiment_config(load_json_file(config_path));
  const std::vector<double> rhos = parse_list(rhos_s, "rhos");
  const std::vector<double> gammas =
      gammas_s.empty() ? std::vector<double>{} : parse_list(gammas_s, "gammas");
  const cascade::FitWindow window =
      fit_window_s.empty()
          ? cascade::FitWindow{std::max(2.0, std::sqrt(double(base.horizon))),
                               static_cast<double>(base.horizon)}
          : parse_window(fit_window_s, "fit-window");
  cascade::RunOptions opts;
  opts.workers = workers;

  const auto rows = cascade::sweep(base, gammas, rhos, window, opts);
  json meta = cascade::resolved_config_json(base);
  meta["sweep_rhos"] = rhos;
  meta["sweep_gammas"] = gammas;
  std::string csv = cascade::output_header(cascade::config_digest(meta)) + "\n";
  csv += "gamma,rho,empirical_rate,ci_low,ci_high,analytic_rate,regime_tag,"
         "fit_points\n";
  for (const auto& r : rows) {
    csv += cascade::fmt12(r.gamma) + "," + cascade::fmt12(r.rho) + "," +
           cascade::fmt12(r.empirical_rate) + "," + cascade::fmt12(r.ci_low) +
           "," + cascade::fmt12(r.ci_high) + "," +
           cascade::fmt12(r.analytic_rate) + "," +
           cascade::analytic::to_string(r.tag) + "," +
           std::to_string(r.points_used) + "\n";
  }
  out.write(csv);
  return 0;
}

int cmd_oracle(const std::string& config_path, unsigned horizon_override,
               const OutputSink& out) {
  cascade::ExperimentConfig cfg =
      cascade::parse_experiment_config(load_json_file(config_path));
  const uint32_t horizon = horizon_override
                               ? horizon_override
                               : static_cast<uint32_t>(
                                     std::min<uint64_t>(cfg.horizon, 20));
  const cascade::oracle::ExactSeries series =
      cascade::oracle::exact_error_series(cfg, horizon);

  const std::string digest =
      cascade::config_digest(cascade::resolved_config_json(cfg));
  std::string csv = cascade::output_header(digest) + "\n";
  csv += "t,p_e_exact_num,p_e_exact_den,p_e_float\n";
  for (size_t i = 0; i < series.p_e.size(); ++i) {
    const auto& r = series.p_e[i];
    csv += std::to_string(i + 1) + "," +
           boost::multiprecision::numerator(r).str() + "," +
           boost::multiprecision::denominator(r).str() + "," +
           cascade::fmt12(static_cast<double>(r)) + "\n";
  }
  out.write(csv);
  return 0;
}

int cmd_adversarial(const std::string& config_path, const OutputSink& out,
                    unsigned workers) {
  const cascade::AdversarialJob job =
      cascade::parse_adversarial_config(load_json_file(config_path));
  cascade::RunOptions opts;
  opts.workers = workers;

  std::string csv =
      cascade::output_header(cascade::config_digest(
          cascade::resolved_adversarial_json(job))) +
      "\n";
  csv += "placement,rule,N,V,te_mean,te_stderr,lower_bound\n";
  for (const std::string& placement : job.placements) {
    std::vector<uint32_t> set;
    if (placement == "end")
      set = cascade::adversarial::placement_all_end(job.n_players, job.v);
    else if (placement == "start")
      set = cascade::adversarial::placement_all_start(job.n_players, job.v);
    else
      set = cascade::adversarial::placement_uniform(job.n_players, job.v);
    for (const auto& rule : job.rules) {
      cascade::adversarial::PlacementExperiment exp{job.n_players, set,
                                                    job.urn, rule};
      const auto res = cascade::adversarial::simulate_placement(
          exp, job.trials, job.seed, opts);
      csv += placement + "," + rule.name() + "," +
             std::to_string(job.n_players) + "," + std::to_string(job.v) +
             "," + cascade::fmt12(res.te_mean) + "," +
             cascade::fmt12(res.te_stderr) + "," +
             cascade::fmt12(res.lower_bound) + "\n";
    }
  }
  out.write(csv);
  return 0;
}

int cmd_fit(const std::string& in_path, const std::string& window_s,
            const OutputSink& out) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("in", "cannot open '" + in_path + "'");
  cascade::ErrorSeries series;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("t,p_t,q_t,err_count,trials,p_hat,stderr", 0) != 0)
        throw ConfigError("in", "unexpected CSV header");
      header_seen = true;
      continue;
    }
    uint64_t t, err, trials;
    double p, q, ph, se;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%llu,%llu,%lf,%lf",
                    reinterpret_cast<unsigned long long*>(&t), &p, &q,
                    reinterpret_cast<unsigned long long*>(&err),
                    reinterpret_cast<unsigned long long*>(&trials), &ph,
                    &se) != 7)
      throw ConfigError("in", "cannot parse row: " + line);
    series.checkpoints.push_back(static_cast<uint32_t>(t));
    series.p_at.push_back(p);
    series.q_at.push_back(q);
    series.error_counts.push_back(err);
    series.te_counts.push_back(0);
    series.trials = trials;
  }
  if (series.checkpoints.empty()) throw ConfigError("in", "no data rows");
  const cascade::FitWindow window = parse_window(window_s, "window");
  const cascade::SlopeFit fit = cascade::fit_rate(series, window);
  const json doc = {{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"ci", {fit.ci_low, fit.ci_high}},
                    {"empirical_rate", -fit.slope},
                    {"fit_points", fit.points_used},
                    {"window", {window.t_min, window.t_max}}};
  out.write(doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(cascade::kToolName) +
               " - mismatched information-cascade simulation toolkit"};
  app.set_version_flag("--version", std::string(cascade::kToolName) + " " +
                                        cascade::kToolVersion);
  app.require_subcommand(1);

  std::string out_path, config_path, format = "csv", workers_s, seed_s;
  std::string fit_window_s;

  auto add_common = [&](CLI::App* sub, bool with_workers = true) {
    sub->add_option("--out", out_path, "output path (default: stdout)");
    if (with_workers)
      sub->add_option("--workers", workers_s, "worker threads or 'auto'");
  };

  // analytic
  std::string gammas_s = "10", rho_grid_s = "0:3:0.01", cps_s;
  auto* analytic = app.add_subcommand("analytic", "closed-form rate curves");
  analytic->add_option("--gamma", gammas_s, "gamma values, comma separated");
  analytic->add_option("--rho-grid", rho_grid_s, "rho grid lo:hi:step");
  analytic->add_option("--c-p", cps_s, "C_p values (capped-rate curves)");
  add_common(analytic, false);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one experiment");
  simulate->add_option("--config", config_path, "experiment config JSON")
      ->required();
  simulate->add_option("--format", format, "csv|json");
  simulate->add_option("--seed", seed_s, "override the config master seed");
  simulate->add_option("--fit-window", fit_window_s, "slope-fit window lo:hi");
  add_common(simulate);

  // sweep
  std::string rhos_s, sweep_gammas_s;
  auto* sweep = app.add_subcommand("sweep", "rho/gamma grid of experiments");
  sweep->add_option("--config", config_path, "base experiment config JSON")
      ->required();
  sweep->add_option("--rhos", rhos_s, "rho values, comma separated")
      ->required();
  sweep->add_option("--gammas", sweep_gammas_s, "gamma values (optional)");
  sweep->add_option("--fit-window", fit_window_s, "slope-fit window lo:hi");
  add_common(sweep);

  // oracle
  unsigned oracle_horizon = 0;
  auto* oracle = app.add_subcommand("oracle", "exact small-horizon series");
  oracle->add_option("--config", config_path, "experiment config JSON")
      ->required();
  oracle->add_option("--horizon", oracle_horizon,
                     "override horizon (capped at 20 by default)");
  add_common(oracle, false);

  // adversarial
  auto* adversarial =
      app.add_subcommand("adversarial", "fixed-placement worst-case report");
  adversarial->add_option("--config", config_path, "adversarial config JSON")
      ->required();
  add_common(adversarial);

  // fit
  std::string in_path, window_s;
  auto* fit = app.add_subcommand("fit", "re-fit slopes from a series CSV");
  fit->add_option("--in", in_path, "series CSV path")->required();
  fit->add_option("--window", window_s, "fit window lo:hi")->required();
  add_common(fit, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const OutputSink out{out_path};
    const unsigned workers =
        workers_s.empty() ? default_workers() : parse_workers(workers_s);
    if (app.got_subcommand(analytic))
      return cmd_analytic(gammas_s, rho_grid_s, cps_s, out);
    if (app.got_subcommand(simulate))
      return cmd_simulate(config_path, out, format, workers, seed_s,
                          fit_window_s);
    if (app.got_subcommand(sweep))
      return cmd_sweep(config_path, rhos_s, sweep_gammas_s, fit_window_s, out,
                       workers);
    if (app.got_subcommand(oracle))
      return cmd_oracle(config_path, oracle_horizon, out);
    if (app.got_subcommand(adversarial))
      return cmd_adversarial(config_path, out, workers);
    if (app.got_subcommand(fit)) return cmd_fit(in_path, window_s, out);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
