#include "lkr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lkr/classical.hpp"
#include "lkr/csv.hpp"
#include "lkr/errors.hpp"
#include "lkr/version.hpp"

namespace lkr {
namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  if (c.preset == "custom") {
    j["M"] = c.M;
    j["N"] = c.N;
  }
  j["K"] = c.K;
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.W) j["W"] = *c.W;
  if (c.kappa) j["kappa"] = *c.kappa;
  j["realizations"] = c.realizations;
  j["t_max"] = c.t_max;
  j["samples"] = c.samples;
  j["snapshot_times"] = c.snapshot_times;
  j["master_seed"] = c.master_seed;
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  j["classical_particles"] = c.classical_particles;
  j["rebin_width"] = c.rebin_width;
  if (c.dstar) j["dstar"] = *c.dstar;
  j["localize_t_max"] = c.localize_t_max;
  return j;
}

json fit_json(const FitResult& f) {
  return json{{"value", f.value},
              {"std_error", f.std_error},
              {"residual_rel", f.residual_rel},
              {"window_lo", f.window_lo},
              {"window_hi", f.window_hi},
              {"poor_fit", f.poor_fit}};
}

}  // namespace

RotatorConfig ExperimentConfig::rotator() const {
  if (preset == "full") return RotatorConfig::full(K);
  if (preset == "fast") return RotatorConfig::fast(K);
  if (preset == "custom") return RotatorConfig::custom(K, M, N);
  throw std::domain_error("ExperimentConfig: unknown preset '" + preset + "'");
}

WaitingTimeDist ExperimentConfig::waiting() const {
  return alpha ? WaitingTimeDist::yule_simon(*alpha)
               : WaitingTimeDist::deterministic_unit();
}

NoiseParams ExperimentConfig::noise() const {
  if (W.has_value() == kappa.has_value())
    throw std::domain_error("ExperimentConfig: exactly one of W / kappa required");
  if (W) return NoiseParams::from_W(*W, waiting());
  return NoiseParams::from_kappa(*kappa, waiting());
}

std::vector<std::int64_t> ExperimentConfig::sample_times() const {
  return parse_sample_spec(samples, t_max);
}

std::vector<std::int64_t> parse_sample_spec(const std::string& spec, std::int64_t t_max) {
  if (spec.rfind("log", 0) == 0) {
    const int count = std::stoi(spec.substr(3));
    if (count < 2 || count > 100000)
      throw std::domain_error("sample spec: log count out of range");
    return log_spaced_times(t_max, count);
  }
  std::vector<std::int64_t> times;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    times.push_back(std::stoll(cell));
  }
  if (times.empty()) throw std::domain_error("sample spec: empty list");
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() < 0 || times.back() > t_max)
    throw std::domain_error("sample spec: times outside [0, t_max]");
  return times;
}

LocalizeResult run_localize(const RotatorConfig& config, std::int64_t t_max) {
  if (t_max < 16) throw std::domain_error("run_localize: t_max too small");
  const FloquetPropagator prop(config);
  StateVec psi = make_initial_state(config);
  LocalizeResult out;
  out.var_series.resize(static_cast<std::size_t>(t_max) + 1, 0.0);
  out.ipr_series.resize(static_cast<std::size_t>(t_max) + 1, 0.0);
  out.ipr_series[0] = 1.0;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    prop.step(psi, config.K);
    const MomentResult m = momentum_moments(psi, config);
    out.var_series[static_cast<std::size_t>(t)] = m.var_p;
    out.ipr_series[static_cast<std::size_t>(t)] = ipr(psi);
  }
  std::vector<double> times(out.var_series.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
  out.fit = fit_break_time(times, out.var_series, config.hbar);
  return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto wall_start = std::chrono::steady_clock::now();
  const RotatorConfig rcfg = cfg.rotator();
  const NoiseParams noise = cfg.noise();
  RunReport report;
  report.out_dir = cfg.out_dir;
  std::filesystem::create_directories(report.out_dir);

  auto add_file = [&](const std::string& name) { report.files.push_back(name); };

  // D* for the theory curves and the p* momentum unit
  if (cfg.dstar) {
    report.d_star = *cfg.dstar;
  } else {
    const LocalizeResult loc = run_localize(rcfg, cfg.localize_t_max);
    report.d_star = loc.fit.value;
    report.d_star_fit = loc.fit;
    report.d_star_fitted = true;
    if (loc.fit.poor_fit)
      report.warnings.push_back("break-time fit flagged poor (residual_rel=" +
                                format_sig12(loc.fit.residual_rel) + ")");
  }

  // quantum ensemble
  EnsembleOptions opts;
  opts.realizations = cfg.realizations;
  opts.t_max = cfg.t_max;
  opts.sample_times = cfg.sample_times();
  for (const auto st : cfg.snapshot_times) {
    if (!std::binary_search(opts.sample_times.begin(), opts.sample_times.end(), st)) {
      opts.sample_times.push_back(st);
      std::sort(opts.sample_times.begin(), opts.sample_times.end());
    }
  }
  opts.snapshot_times = cfg.snapshot_times;
  opts.master_seed = cfg.master_seed;
  opts.workers = cfg.workers;
  opts.rebin_width = cfg.rebin_width;
  ObservableSeries series = ensemble_run(rcfg, noise, opts);

  if (series.wrap.first_time >= 0)
    report.warnings.push_back("wrap-around: edge mass above 1e-6 first at t=" +
                              std::to_string(series.wrap.first_time));

  CsvTable quantum;
  quantum.columns = {"t", "var_p", "ipr", "purity", "purity_se", "logfid", "logfid_se"};
  for (std::size_t i = 0; i < series.times.size(); ++i)
    quantum.rows.push_back({static_cast<double>(series.times[i]), series.var_p[i],
                            series.ipr[i], series.purity[i], series.purity_se[i],
                            series.logfid[i], series.logfid_se[i]});
  write_csv(report.out_dir / "series.csv", quantum);
  add_file("series.csv");

  const double p_star = report.d_star / rcfg.hbar;
  for (const auto& [t, hist] : series.snapshots) {
    CsvTable snap;
    snap.columns = {"p_over_pstar", "density"};
    for (std::size_t b = 0; b < hist.density.size(); ++b)
      snap.rows.push_back({hist.p_center[b] / p_star, hist.density[b]});
    const std::string name = "snapshot_t" + std::to_string(t) + ".csv";
    write_csv(report.out_dir / name, snap);
    add_file(name);
  }

  if (noise.W == 0.0) {
    bool ok = true;
    for (std::size_t i = 0; i < series.times.size(); ++i)
      if (std::abs(series.purity[i] - 1.0) > 1e-9 || std::abs(series.logfid[i]) > 1e-9)
        ok = false;
    report.purity_identity_ok = ok;
  }

  // classical baseline
  try {
    const std::vector<double> cvar =
        classical_var_series(cfg.K, noise, cfg.classical_particles, cfg.t_max,
                             cfg.master_seed, cfg.workers);
    CsvTable classical;
    classical.columns = {"t", "var_p_classical"};
    for (std::size_t t = 0; t < cvar.size(); ++t)
      classical.rows.push_back({static_cast<double>(t), cvar[t]});
    write_csv(report.out_dir / "classical.csv", classical);
    add_file("classical.csv");
  } catch (const std::exception& e) {
    report.partial = true;
    report.warnings.push_back(std::string("classical stage failed: ") + e.what());
  }

  // theory predictions at the same sample times
  try {
    const TheoryParams params =
        TheoryParams::make(report.d_star, noise.kappa, noise.dist, rcfg.hbar);
    const TheoryEngine engine(params, cfg.t_max);
    const TheorySeries ts = engine.series(opts.sample_times);
    CsvTable theory;
    theory.columns = {"t", "var_p_pred", "D", "ipr_pred", "purity_pred", "logfid_pred"};
    for (std::size_t i = 0; i < ts.times.size(); ++i)
      theory.rows.push_back({static_cast<double>(ts.times[i]), ts.var_p_pred[i],
                             ts.decoherence_D[i], ts.ipr_pred[i], ts.purity_pred[i],
                             ts.logfid_pred[i]});
    write_csv(report.out_dir / "theory.csv", theory);
    add_file("theory.csv");

    CsvTable cmp;
    cmp.columns = {"t",          "var_p_sim",  "var_p_pred",  "var_p_err",
                   "ipr_sim",    "ipr_pred",   "ipr_err",     "purity_sim",
                   "purity_pred", "purity_err", "logfid_sim",  "logfid_pred",
                   "logfid_err"};
    for (std::size_t i = 0; i < series.times.size(); ++i)
      cmp.rows.push_back(
          {static_cast<double>(series.times[i]), series.var_p[i], ts.var_p_pred[i],
           symmetric_rel_err(series.var_p[i], ts.var_p_pred[i]), series.ipr[i],
           ts.ipr_pred[i], symmetric_rel_err(series.ipr[i], ts.ipr_pred[i]),
           series.purity[i], ts.purity_pred[i],
           symmetric_rel_err(series.purity[i], ts.purity_pred[i]), series.logfid[i],
           ts.logfid_pred[i], symmetric_rel_err(series.logfid[i], ts.logfid_pred[i])});
    write_csv(report.out_dir / "comparison.csv", cmp);
    add_file("comparison.csv");
  } catch (const std::exception& e) {
    report.partial = true;
    report.warnings.push_back(std::string("theory stage failed: ") + e.what());
  }

  // manifest
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  json manifest;
  manifest["tool"] = "lkr";
  manifest["code_version"] = kVersion;
  manifest["command"] = "simulate";
  manifest["config"] = config_json(cfg);
  manifest["seed"] = cfg.master_seed;
  manifest["wall_time_s"] = wall_s;
  manifest["status"] = report.partial ? "partial" : "complete";
  manifest["d_star"] = report.d_star;
  if (report.d_star_fitted) manifest["d_star_fit"] = fit_json(report.d_star_fit);
  manifest["noisy_kicks_total"] = series.noisy_kicks_total;
  manifest["warnings"] = report.warnings;
  if (report.purity_identity_ok.has_value())
    manifest["checks"]["purity_identity"] = *report.purity_identity_ok ? "passed" : "failed";
  manifest["checks"]["wrap_flagged_samples"] = series.wrap.flagged_samples;
  manifest["checks"]["wrap_first_time"] = series.wrap.first_time;
  manifest["checks"]["wrap_max_edge_mass"] = series.wrap.max_edge_mass;
  json outputs = json::array();
  for (const auto& name : report.files)
    outputs.push_back({{"file", name}, {"fnv1a64", hex64(file_fnv1a64(report.out_dir / name))}});
  manifest["outputs"] = outputs;
  std::ofstream mf(report.out_dir / "manifest.json");
  mf << manifest.dump(2) << '\n';
  report.series = std::move(series);
  return report;
}

std::filesystem::path write_comparison(const std::filesystem::path& sim_dir,
                                       const std::filesystem::path& theory_dir) {
  const CsvTable sim = read_csv(sim_dir / "series.csv");
  const CsvTable th = read_csv(theory_dir / "theory.csv");
  if (sim.columns.empty() || th.columns.empty())
    throw NumericalError("write_comparison: empty inputs");
  auto col = [](const CsvTable& t, const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      if (t.columns[c] == name) return c;
    throw NumericalError("write_comparison: missing column " + name);
  };
  const std::size_t st = col(sim, "t"), tt = col(th, "t");
  struct Pairing {
    const char* sim;
    const char* pred;
    const char* err;
  };
  const Pairing pairings[] = {{"var_p", "var_p_pred", "var_p_err"},
                              {"ipr", "ipr_pred", "ipr_err"},
                              {"purity", "purity_pred", "purity_err"},
                              {"logfid", "logfid_pred", "logfid_err"}};
  CsvTable out;
  out.columns = {"t"};
  for (const auto& p : pairings) {
    out.columns.push_back(p.sim);
    out.columns.push_back(p.pred);
    out.columns.push_back(p.err);
  }
  for (const auto& srow : sim.rows) {
    const double t = srow[st];
    const std::vector<double>* trow = nullptr;
    for (const auto& row : th.rows)
      if (row[tt] == t) {
        trow = &row;
        break;
      }
    if (!trow) continue;
    std::vector<double> r{t};
    for (const auto& p : pairings) {
      const double a = srow[col(sim, p.sim)];
      const double b = (*trow)[col(th, p.pred)];
      r.push_back(a);
      r.push_back(b);
      r.push_back(symmetric_rel_err(a, b));
    }
    out.rows.push_back(std::move(r));
  }
  const auto path = sim_dir / "comparison.csv";
  write_csv(path, out);
  return path;
}

}  // namespace lkr
