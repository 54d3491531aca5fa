#include "lkr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lkr/rng.hpp"

namespace lkr {
namespace {

double sq_overlap(const StateVec& a, const StateVec& b) {
  const cplx o = overlap(a, b);
  return std::norm(o);
}

}  // namespace

MomentResult momentum_moments(const StateVec& psi, const RotatorConfig& config) {
  const auto n = static_cast<std::size_t>(config.N);
  // levels within 5% of the grid edge on either side
  const double edge_lo = 0.95 * static_cast<double>(config.min_level());
  const double edge_hi = 0.95 * static_cast<double>(config.max_level());
  double norm = 0.0, mean = 0.0, second = 0.0, edge = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::norm(psi[j]);
    const double p = config.momentum(j);
    norm += w;
    mean += w * p;
    second += w * p * p;
    const auto l = static_cast<double>(config.level(j));
    if (l <= edge_lo || l >= edge_hi) edge += w;
  }
  MomentResult r;
  r.norm = norm;
  r.mean_p = mean;
  r.var_p = second - mean * mean;
  r.edge_mass = edge;
  r.wrap_warning = edge > 1e-6;
  return r;
}

double state_norm(const StateVec& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s;
}

double ipr(const StateVec& psi) {
  double s = 0.0;
  for (const auto& a : psi) {
    const double w = std::norm(a);
    s += w * w;
  }
  return s;
}

double ensemble_ipr(const std::vector<StateVec>& states) {
  if (states.empty()) throw std::domain_error("ensemble_ipr: empty ensemble");
  double s = 0.0;
  for (const auto& psi : states) s += ipr(psi);
  return s / static_cast<double>(states.size());
}

cplx overlap(const StateVec& a, const StateVec& b) {
  if (a.size() != b.size()) throw std::domain_error("overlap: size mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
  return s;
}

PurityResult purity_estimate(const std::vector<StateVec>& states, std::uint64_t pair_seed) {
  const auto r = static_cast<std::int64_t>(states.size());
  if (r < 2) throw std::domain_error("purity_estimate: requires R >= 2");
  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n_pairs = 0;
  if (r <= 64) {
    for (std::int64_t i = 0; i < r; ++i) {
      for (std::int64_t j = i + 1; j < r; ++j) {
        const double v = sq_overlap(states[static_cast<std::size_t>(i)],
                                    states[static_cast<std::size_t>(j)]);
        sum += v;
        sum_sq += v * v;
        ++n_pairs;
      }
    }
  } else {
    std::mt19937_64 rng(pair_seed);
    std::uniform_int_distribution<std::int64_t> pick(0, r - 1);
    n_pairs = 64 * r;
    for (std::int64_t k = 0; k < n_pairs; ++k) {
      std::int64_t i = pick(rng);
      std::int64_t j = pick(rng);
      while (j == i) j = pick(rng);
      const double v = sq_overlap(states[static_cast<std::size_t>(i)],
                                  states[static_cast<std::size_t>(j)]);
      sum += v;
      sum_sq += v * v;
    }
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

LogFidelityResult log_fidelity_estimate(const std::vector<StateVec>& states) {
  if (states.size() < 2) throw std::domain_error("log_fidelity_estimate: requires R >= 2");
  LogFidelityResult out;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i + 1 < states.size(); i += 2) {
    const double v = sq_overlap(states[i], states[i + 1]);
    if (v < 1e-300) {
      ++out.skipped;
      continue;
    }
    const double lv = std::log(v);
    sum += lv;
    sum_sq += lv * lv;
    ++out.pairs;
  }
  if (out.pairs == 0) {
    out.mean = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double np = static_cast<double>(out.pairs);
  out.mean = sum / np;
  if (out.pairs > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / np) / (np - 1.0));
    out.se = std::sqrt(var / np);
  }
  return out;
}

Histogram density_histogram(const std::vector<double>& mean_occupation,
                            const RotatorConfig& config, int rebin_width) {
  const auto n = static_cast<std::size_t>(config.N);
  if (mean_occupation.size() != n)
    throw std::domain_error("density_histogram: occupation size mismatch");
  if (rebin_width < 1) throw std::domain_error("density_histogram: rebin_width >= 1");

  // occupation reordered to ascending level l = min_level .. max_level
  std::vector<double> occ(n);
  const std::int64_t l_min = config.min_level();
  for (std::size_t j = 0; j < n; ++j) {
    const auto idx = static_cast<std::size_t>(config.level(j) - l_min);
    occ[idx] = mean_occupation[j];
  }

  const auto w = static_cast<std::size_t>(rebin_width);
  const std::size_t n_full = n / w;
  const std::size_t n_bins = n_full == 0 ? 1 : n_full;
  Histogram h;
  h.p_center.reserve(n_bins);
  h.density.reserve(n_bins);
  h.bin_width.reserve(n_bins);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    // last bin absorbs the remainder levels
    const std::size_t width = (b + 1 == n_bins) ? n - pos : w;
    double mass = 0.0;
    for (std::size_t k = 0; k < width; ++k) mass += occ[pos + k];
    const double l_center =
        static_cast<double>(l_min) + static_cast<double>(pos) + (static_cast<double>(width) - 1.0) / 2.0;
    h.p_center.push_back(config.hbar * l_center);
    h.bin_width.push_back(config.hbar * static_cast<double>(width));
    h.density.push_back(mass / (config.hbar * static_cast<double>(width)));
    pos += width;
  }
  return h;
}

Histogram momentum_distribution(const std::vector<StateVec>& states,
                                const RotatorConfig& config, int rebin_width) {
  if (states.empty()) throw std::domain_error("momentum_distribution: empty ensemble");
  const auto n = static_cast<std::size_t>(config.N);
  std::vector<double> occ(n, 0.0);
  for (const auto& psi : states)
    for (std::size_t j = 0; j < n; ++j) occ[j] += std::norm(psi[j]);
  const double inv_r = 1.0 / static_cast<double>(states.size());
  for (auto& v : occ) v *= inv_r;
  return density_histogram(occ, config, rebin_width);
}

}  // namespace lkr
