#include "lkr/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "lkr/rng.hpp"

namespace lkr {
namespace {

constexpr std::int64_t kBlock = 32;  // realizations per reduction block
constexpr std::uint64_t kPairStreamTag = 0x70616972'73747231ULL;

struct KickStats {
  double mean_p = 0.0;
  double var_p = 0.0;
  double ipr = 0.0;
  double edge_mass = 0.0;
};

KickStats fused_stats(const StateVec& psi, const RotatorConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.N);
  const double edge_lo = 0.95 * static_cast<double>(cfg.min_level());
  const double edge_hi = 0.95 * static_cast<double>(cfg.max_level());
  double mean = 0.0, second = 0.0, quart = 0.0, edge = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::norm(psi[j]);
    const double p = cfg.momentum(j);
    mean += w * p;
    second += w * p * p;
    quart += w * w;
    const auto l = static_cast<double>(cfg.level(j));
    if (l <= edge_lo || l >= edge_hi) edge += w;
  }
  KickStats s;
  s.mean_p = mean;
  s.var_p = second - mean * mean;
  s.ipr = quart;
  s.edge_mass = edge;
  return s;
}

template <class PerKick>
void advance(StateVec& psi, const FloquetPropagator& prop, const NoiseRealization& nr,
             std::size_t& event_idx, std::int64_t from, std::int64_t to, PerKick&& per_kick) {
  const double base_k = prop.config().K;
  for (std::int64_t t = from + 1; t <= to; ++t) {
    double kick = base_k;
    if (event_idx < nr.timeline.events.size() && nr.timeline.events[event_idx] == t) {
      kick += nr.detunings[event_idx];
      ++event_idx;
    }
    prop.step(psi, kick);
    per_kick(t);
  }
}

struct BlockAccum {
  std::vector<double> dense_var, dense_ipr;
  std::vector<double> sample_mean, sample_var, sample_ipr;
  std::vector<std::vector<double>> snapshot_occ;  // per snapshot time
  WrapReport wrap;
  std::int64_t noisy_kicks = 0;

  void note_edge(std::int64_t t, double edge) {
    if (edge > 1e-6) {
      if (wrap.first_time < 0 || t < wrap.first_time) wrap.first_time = t;
      ++wrap.flagged_samples;
    }
    wrap.max_edge_mass = std::max(wrap.max_edge_mass, edge);
  }
};

// Runs fn(block_index) for all blocks on `workers` threads.
void parallel_blocks(std::int64_t n_blocks, int workers, const std::function<void(std::int64_t)>& fn) {
  if (workers <= 1 || n_blocks <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, n_blocks));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        fn(b);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// Deterministic chunked pair reduction mirroring purity_estimate semantics.
PurityResult purity_parallel(const std::vector<StateVec>& states, std::uint64_t pair_seed,
                             int workers) {
  const auto r = static_cast<std::int64_t>(states.size());
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  if (r <= 64) {
    for (std::int32_t i = 0; i < r; ++i)
      for (std::int32_t j = i + 1; j < r; ++j) pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(pair_seed);
    std::uniform_int_distribution<std::int64_t> pick(0, r - 1);
    pairs.reserve(static_cast<std::size_t>(64 * r));
    for (std::int64_t k = 0; k < 64 * r; ++k) {
      const auto i = static_cast<std::int32_t>(pick(rng));
      std::int32_t j = static_cast<std::int32_t>(pick(rng));
      while (j == i) j = static_cast<std::int32_t>(pick(rng));
      pairs.emplace_back(i, j);
    }
  }
  constexpr std::int64_t kChunk = 1024;
  const auto n_pairs = static_cast<std::int64_t>(pairs.size());
  const std::int64_t n_chunks = (n_pairs + kChunk - 1) / kChunk;
  std::vector<double> part_sum(static_cast<std::size_t>(n_chunks), 0.0);
  std::vector<double> part_sq(static_cast<std::size_t>(n_chunks), 0.0);
  parallel_blocks(n_chunks, workers, [&](std::int64_t c) {
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(n_pairs, lo + kChunk);
    double s = 0.0, s2 = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) {
      const auto& pr = pairs[static_cast<std::size_t>(k)];
      const double v = std::norm(overlap(states[static_cast<std::size_t>(pr.first)],
                                         states[static_cast<std::size_t>(pr.second)]));
      s += v;
      s2 += v * v;
    }
    part_sum[static_cast<std::size_t>(c)] = s;
    part_sq[static_cast<std::size_t>(c)] = s2;
  });
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    sum += part_sum[static_cast<std::size_t>(c)];
    sum_sq += part_sq[static_cast<std::size_t>(c)];
  }
  PurityResult out;
  out.pairs = n_pairs;
  const double np = static_cast<double>(n_pairs);
  out.value = sum / np;
  if (n_pairs > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / np) / (np - 1.0));
    out.se = std::sqrt(var / np);
  }
  return out;
}

}  // namespace

std::vector<std::int64_t> log_spaced_times(std::int64_t t_max, int count) {
  if (t_max < 1) throw std::domain_error("log_spaced_times: requires t_max >= 1");
  std::vector<std::int64_t> out;
  const double lmax = std::log(static_cast<double>(t_max));
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lmax : lmax * static_cast<double>(i) / (count - 1);
    out.push_back(static_cast<std::int64_t>(std::llround(std::exp(x))));
  }
  out.push_back(t_max);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RealizationTrack propagate(StateVec& psi, const NoiseRealization& noise,
                           const FloquetPropagator& prop, std::int64_t t_max,
                           const std::vector<std::int64_t>& sample_times) {
  if (t_max > noise.timeline.horizon)
    throw std::domain_error("propagate: t_max exceeds noise horizon");
  RealizationTrack track;
  const auto& cfg = prop.config();
  std::size_t event_idx = 0;
  std::int64_t t = 0;
  for (const std::int64_t ts : sample_times) {
    if (ts > t_max) break;
    if (ts == 0) {
      const KickStats s = fused_stats(psi, cfg);
      track.times.push_back(0);
      track.mean_p.push_back(s.mean_p);
      track.var_p.push_back(s.var_p);
      track.ipr.push_back(s.ipr);
      continue;
    }
    advance(psi, prop, noise, event_idx, t, ts, [](std::int64_t) {});
    t = ts;
    const KickStats s = fused_stats(psi, cfg);
    track.times.push_back(ts);
    track.mean_p.push_back(s.mean_p);
    track.var_p.push_back(s.var_p);
    track.ipr.push_back(s.ipr);
  }
  track.noisy_kicks = static_cast<std::int64_t>(event_idx);
  return track;
}

ObservableSeries ensemble_run(const RotatorConfig& config, const NoiseParams& noise,
                              const EnsembleOptions& opts) {
  const std::int64_t r_total = opts.realizations;
  if (r_total < 2) throw std::domain_error("ensemble_run: requires realizations >= 2");
  if (opts.t_max < 1) throw std::domain_error("ensemble_run: requires t_max >= 1");
  std::vector<std::int64_t> samples = opts.sample_times;
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw std::domain_error("ensemble_run: sample_times must be sorted");
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  if (!samples.empty() && (samples.front() < 0 || samples.back() > opts.t_max))
    throw std::domain_error("ensemble_run: sample_times outside [0, t_max]");
  for (const auto st : opts.snapshot_times)
    if (!std::binary_search(samples.begin(), samples.end(), st))
      throw std::domain_error("ensemble_run: snapshot_times must be sample times");

  const int workers = opts.workers > 0
                          ? opts.workers
                          : std::max(1u, std::thread::hardware_concurrency());
  const std::int64_t n_blocks = (r_total + kBlock - 1) / kBlock;
  const auto n_samples = samples.size();

  const FloquetPropagator prop(config);

  std::vector<NoiseRealization> realizations(static_cast<std::size_t>(r_total));
  std::vector<StateVec> states(static_cast<std::size_t>(r_total));
  std::vector<std::size_t> event_idx(static_cast<std::size_t>(r_total), 0);
  parallel_blocks(n_blocks, workers, [&](std::int64_t b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(r_total, lo + kBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      auto rng = make_engine(opts.master_seed, static_cast<std::uint64_t>(i));
      const auto idx = static_cast<std::size_t>(i);
      realizations[idx] = NoiseRealization::generate(noise, opts.t_max, rng,
                                                     derive_seed(opts.master_seed,
                                                                 static_cast<std::uint64_t>(i)));
      states[idx] = make_initial_state(config);
    }
  });

  std::vector<BlockAccum> acc(static_cast<std::size_t>(n_blocks));
  for (auto& a : acc) {
    if (opts.record_dense) {
      a.dense_var.assign(static_cast<std::size_t>(opts.t_max) + 1, 0.0);
      a.dense_ipr.assign(static_cast<std::size_t>(opts.t_max) + 1, 0.0);
    }
    a.sample_mean.assign(n_samples, 0.0);
    a.sample_var.assign(n_samples, 0.0);
    a.sample_ipr.assign(n_samples, 0.0);
    a.snapshot_occ.assign(opts.snapshot_times.size(),
                          std::vector<double>());
  }

  ObservableSeries out;
  out.times = samples;
  out.mean_p.resize(n_samples);
  out.var_p.resize(n_samples);
  out.ipr.resize(n_samples);
  out.purity.assign(n_samples, 0.0);
  out.purity_se.assign(n_samples, 0.0);
  out.logfid.assign(n_samples, 0.0);
  out.logfid_se.assign(n_samples, 0.0);
  out.logfid_skipped.assign(n_samples, 0);

  std::int64_t t_cursor = 0;
  for (std::size_t si = 0; si < n_samples; ++si) {
    const std::int64_t ts = samples[si];
    parallel_blocks(n_blocks, workers, [&](std::int64_t b) {
      auto& a = acc[static_cast<std::size_t>(b)];
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(r_total, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        StateVec& psi = states[idx];
        if (opts.record_dense) {
          advance(psi, prop, realizations[idx], event_idx[idx], t_cursor, ts,
                  [&](std::int64_t t) {
                    const KickStats s = fused_stats(psi, config);
                    a.dense_var[static_cast<std::size_t>(t)] += s.var_p;
                    a.dense_ipr[static_cast<std::size_t>(t)] += s.ipr;
                    a.note_edge(t, s.edge_mass);
                  });
        } else {
          advance(psi, prop, realizations[idx], event_idx[idx], t_cursor, ts,
                  [](std::int64_t) {});
        }
        const KickStats s = fused_stats(psi, config);
        a.sample_mean[si] += s.mean_p;
        a.sample_var[si] += s.var_p;
        a.sample_ipr[si] += s.ipr;
        if (!opts.record_dense) a.note_edge(ts, s.edge_mass);
      }
      // snapshot occupation for this block
      const auto snap_it = std::find(opts.snapshot_times.begin(), opts.snapshot_times.end(), ts);
      if (snap_it != opts.snapshot_times.end()) {
        const auto snap_idx = static_cast<std::size_t>(snap_it - opts.snapshot_times.begin());
        auto& occ = a.snapshot_occ[snap_idx];
        occ.assign(static_cast<std::size_t>(config.N), 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
          const StateVec& psi = states[static_cast<std::size_t>(i)];
          for (std::size_t j = 0; j < psi.size(); ++j) occ[j] += std::norm(psi[j]);
        }
      }
    });
    t_cursor = ts;

    const double inv_r = 1.0 / static_cast<double>(r_total);
    double m = 0.0, v = 0.0, q = 0.0;
    for (const auto& a : acc) {
      m += a.sample_mean[si];
      v += a.sample_var[si];
      q += a.sample_ipr[si];
    }
    out.mean_p[si] = m * inv_r;
    out.var_p[si] = v * inv_r;
    out.ipr[si] = q * inv_r;

    const PurityResult pr =
        purity_parallel(states, derive_seed(opts.master_seed ^ kPairStreamTag,
                                            static_cast<std::uint64_t>(ts)),
                        workers);
    out.purity[si] = pr.value;
    out.purity_se[si] = pr.se;
    const LogFidelityResult lf = log_fidelity_estimate(states);
    out.logfid[si] = lf.mean;
    out.logfid_se[si] = lf.se;
    out.logfid_skipped[si] = lf.skipped;

    const auto snap_it = std::find(opts.snapshot_times.begin(), opts.snapshot_times.end(), ts);
    if (snap_it != opts.snapshot_times.end()) {
      const auto snap_idx = static_cast<std::size_t>(snap_it - opts.snapshot_times.begin());
      std::vector<double> occ(static_cast<std::size_t>(config.N), 0.0);
      for (const auto& a : acc)
        if (!a.snapshot_occ[snap_idx].empty())
          for (std::size_t j = 0; j < occ.size(); ++j) occ[j] += a.snapshot_occ[snap_idx][j];
      for (auto& w : occ) w *= inv_r;
      out.snapshots.emplace(ts, density_histogram(occ, config, opts.rebin_width));
    }
  }

  // cover any kicks past the last sample time so dense arrays span 0..t_max
  if (opts.record_dense && t_cursor < opts.t_max) {
    parallel_blocks(n_blocks, workers, [&](std::int64_t b) {
      auto& a = acc[static_cast<std::size_t>(b)];
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(r_total, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        StateVec& psi = states[idx];
        advance(psi, prop, realizations[idx], event_idx[idx], t_cursor, opts.t_max,
                [&](std::int64_t t) {
                  const KickStats s = fused_stats(psi, config);
                  a.dense_var[static_cast<std::size_t>(t)] += s.var_p;
                  a.dense_ipr[static_cast<std::size_t>(t)] += s.ipr;
                  a.note_edge(t, s.edge_mass);
                });
      }
    });
  }

  if (opts.record_dense) {
    out.dense_var.assign(static_cast<std::size_t>(opts.t_max) + 1, 0.0);
    out.dense_ipr.assign(static_cast<std::size_t>(opts.t_max) + 1, 0.0);
    out.dense_ipr[0] = 1.0;  // initial point-mass state
    const double inv_r = 1.0 / static_cast<double>(r_total);
    for (const auto& a : acc)
      for (std::size_t t = 1; t < out.dense_var.size(); ++t) {
        out.dense_var[t] += a.dense_var[t] * inv_r;
        out.dense_ipr[t] += a.dense_ipr[t] * inv_r;
      }
  }

  for (const auto& a : acc) {
    if (a.wrap.first_time >= 0 &&
        (out.wrap.first_time < 0 || a.wrap.first_time < out.wrap.first_time))
      out.wrap.first_time = a.wrap.first_time;
    out.wrap.flagged_samples += a.wrap.flagged_samples;
    out.wrap.max_edge_mass = std::max(out.wrap.max_edge_mass, a.wrap.max_edge_mass);
  }
  for (const auto& nr : realizations)
    out.noisy_kicks_total += static_cast<std::int64_t>(nr.timeline.events.size());
  return out;
}

}  // namespace lkr
