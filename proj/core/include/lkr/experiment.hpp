#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lkr/ensemble.hpp"
#include "lkr/fitting.hpp"
#include "lkr/rotator.hpp"
#include "lkr/theory.hpp"

namespace lkr {

// Parsed run description shared by the CLI subcommands.
struct ExperimentConfig {
  std::string preset = "full";  // full | fast | custom
  std::int64_t M = 0;           // custom preset only
  std::int64_t N = 0;
  double K = 7.5;
  std::optional<double> alpha;  // absent -> every-kick noise (DeterministicUnit)
  std::optional<double> W;
  std::optional<double> kappa;  // exactly one of W / kappa
  std::int64_t realizations = 100;
  std::int64_t t_max = 1000;
  std::string samples = "log64";  // "log<N>" or comma-separated integer list
  std::vector<std::int64_t> snapshot_times;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  int workers = 0;
  std::int64_t classical_particles = 10000;
  int rebin_width = 24;
  std::optional<double> dstar;        // skip the internal noiseless fit
  std::int64_t localize_t_max = 5000;

  RotatorConfig rotator() const;
  WaitingTimeDist waiting() const;
  NoiseParams noise() const;
  std::vector<std::int64_t> sample_times() const;
};

std::vector<std::int64_t> parse_sample_spec(const std::string& spec, std::int64_t t_max);

struct LocalizeResult {
  FitResult fit;
  std::vector<double> var_series;  // dense, t = 0..t_max
  std::vector<double> ipr_series;
};

// Noiseless single-trace run plus the one-parameter D* fit.
LocalizeResult run_localize(const RotatorConfig& config, std::int64_t t_max);

struct RunReport {
  std::filesystem::path out_dir;
  bool partial = false;
  std::vector<std::string> warnings;
  double d_star = 0.0;
  FitResult d_star_fit;
  bool d_star_fitted = false;
  std::optional<bool> purity_identity_ok;  // only evaluated for W == 0 runs
  std::vector<std::string> files;
  ObservableSeries series;
};

// Quantum ensemble + classical baseline + theory predictions + comparison
// table + manifest, written under cfg.out_dir.
RunReport run_experiment(const ExperimentConfig& cfg);

// Comparison table of two run directories (columns t,var_p,ipr,purity,logfid
// in each); writes comparison.csv into sim_dir and returns its path.
std::filesystem::path write_comparison(const std::filesystem::path& sim_dir,
                                       const std::filesystem::path& theory_dir);

}  // namespace lkr
