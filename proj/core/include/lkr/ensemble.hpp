#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lkr/observables.hpp"
#include "lkr/rotator.hpp"

namespace lkr {

struct EnsembleOptions {
  std::int64_t realizations = 2;
  std::int64_t t_max = 1000;
  std::vector<std::int64_t> sample_times;    // sorted unique values in [0, t_max]
  std::vector<std::int64_t> snapshot_times;  // must also appear in sample_times
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 -> hardware concurrency
  bool record_dense = true;
  int rebin_width = 24;
};

struct WrapReport {
  std::int64_t first_time = -1;
  std::int64_t flagged_samples = 0;
  double max_edge_mass = 0.0;
};

// Noise-averaged observables: var p is the quantum-mechanical variance per
// realization, then averaged; purity and log-fidelity come from pair overlaps
// at the sample times.
struct ObservableSeries {
  std::vector<std::int64_t> times;
  std::vector<double> mean_p, var_p, ipr;
  std::vector<double> purity, purity_se;
  std::vector<double> logfid, logfid_se;
  std::vector<std::int64_t> logfid_skipped;

  std::vector<double> dense_var, dense_ipr;  // index = kick, when record_dense

  std::map<std::int64_t, Histogram> snapshots;
  WrapReport wrap;
  std::int64_t noisy_kicks_total = 0;
};

// Per-realization observable track for a single noise history.
struct RealizationTrack {
  std::vector<std::int64_t> times;
  std::vector<double> mean_p, var_p, ipr;
  std::int64_t noisy_kicks = 0;
};

// Propagates one state under one noise realization, recording moments at the
// sample times.  Throws when t_max exceeds the realization horizon.
RealizationTrack propagate(StateVec& psi, const NoiseRealization& noise,
                           const FloquetPropagator& prop, std::int64_t t_max,
                           const std::vector<std::int64_t>& sample_times);

// R independent realizations, deterministic in (master_seed); reductions use
// fixed-size realization blocks so results do not depend on worker count.
ObservableSeries ensemble_run(const RotatorConfig& config, const NoiseParams& noise,
                              const EnsembleOptions& opts);

// 64 log-spaced integers from 1 to t_max (deduplicated, includes t_max).
std::vector<std::int64_t> log_spaced_times(std::int64_t t_max, int count = 64);

}  // namespace lkr
