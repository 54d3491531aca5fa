#include "lkr/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lkr/rng.hpp"
#include "lkr/specfun.hpp"

namespace lkr {
namespace {

constexpr std::int64_t kSurvivalTableMax = 4096;
constexpr std::int64_t kSampleCap = 1'000'000'000'000'000LL;  // 1e15 kicks

}  // namespace

WaitingTimeDist::WaitingTimeDist(WaitingKind kind, double alpha)
    : kind_(kind), alpha_(alpha) {
  if (kind_ == WaitingKind::YuleSimon) {
    if (!(alpha > 0.0)) throw std::domain_error("yule_simon: requires alpha > 0");
    tail_c_ = alpha * std::exp(log_gamma(alpha + 1.0));
    survival_table_.resize(kSurvivalTableMax + 1);
    for (std::int64_t k = 0; k <= kSurvivalTableMax; ++k)
      survival_table_[static_cast<std::size_t>(k)] = survival(k);
  }
}

WaitingTimeDist WaitingTimeDist::deterministic_unit() {
  return WaitingTimeDist(WaitingKind::DeterministicUnit, 0.0);
}

WaitingTimeDist WaitingTimeDist::yule_simon(double alpha) {
  return WaitingTimeDist(WaitingKind::YuleSimon, alpha);
}

bool WaitingTimeDist::finite_mean() const {
  return kind_ == WaitingKind::DeterministicUnit || alpha_ > 1.0;
}

double WaitingTimeDist::mean_waiting_time() const {
  if (kind_ == WaitingKind::DeterministicUnit) return 1.0;
  if (alpha_ > 1.0) return alpha_ / (alpha_ - 1.0);
  return std::numeric_limits<double>::infinity();
}

double WaitingTimeDist::pmf(std::int64_t tau) const {
  if (tau < 1) throw std::domain_error("pmf: requires tau >= 1");
  if (kind_ == WaitingKind::DeterministicUnit) return tau == 1 ? 1.0 : 0.0;
  const auto t = static_cast<double>(tau);
  return std::exp(std::log(alpha_) + log_gamma(t) + log_gamma(alpha_ + 1.0) -
                  log_gamma(t + alpha_ + 1.0));
}

double WaitingTimeDist::survival(std::int64_t k) const {
  if (k < 0) throw std::domain_error("survival: requires k >= 0");
  if (k == 0) return 1.0;
  if (kind_ == WaitingKind::DeterministicUnit) return 0.0;
  const auto kd = static_cast<double>(k);
  return std::exp(std::log(kd) + log_gamma(kd) + log_gamma(alpha_ + 1.0) -
                  log_gamma(kd + alpha_ + 1.0));
}

std::int64_t WaitingTimeDist::sample(std::mt19937_64& rng) const {
  if (kind_ == WaitingKind::DeterministicUnit) return 1;
  const double u = uniform_open(rng);
  // smallest k with S(k) <= u
  if (survival_table_[1] <= u) return 1;
  if (survival_table_[kSurvivalTableMax] <= u) {
    auto it = std::upper_bound(survival_table_.begin(), survival_table_.end(), u,
                               [](double a, double b) { return a > b; });
    return static_cast<std::int64_t>(it - survival_table_.begin());
  }
  // tail: exact bisection on the closed-form survival function
  std::int64_t lo = kSurvivalTableMax;  // S(lo) > u
  if (survival(kSampleCap) > u) return kSampleCap;
  std::int64_t hi = kSampleCap;  // S(hi) <= u
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (survival(mid) <= u)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::int64_t NoiseTimeline::count(std::int64_t t_hi, std::int64_t t_lo) const {
  if (t_lo > t_hi) throw std::domain_error("NoiseTimeline::count: t_lo > t_hi");
  const auto a = std::upper_bound(events.begin(), events.end(), t_lo);
  const auto b = std::upper_bound(events.begin(), events.end(), t_hi);
  return b - a;
}

NoiseTimeline generate_timeline(const WaitingTimeDist& dist, std::int64_t horizon,
                                std::mt19937_64& rng, std::uint64_t seed_tag) {
  if (horizon < 1) throw std::domain_error("generate_timeline: requires horizon >= 1");
  NoiseTimeline tl;
  tl.horizon = horizon;
  tl.seed_tag = seed_tag;
  std::int64_t t = 0;
  for (;;) {
    t += dist.sample(rng);
    if (t > horizon) break;
    tl.events.push_back(t);
  }
  return tl;
}

std::vector<double> sprinkling(const WaitingTimeDist& dist, std::int64_t horizon) {
  if (horizon < 1) throw std::domain_error("sprinkling: requires horizon >= 1");
  const auto n = static_cast<std::size_t>(horizon);
  std::vector<double> f(n + 1, 0.0);
  if (dist.kind() == WaitingKind::DeterministicUnit) {
    std::fill(f.begin() + 1, f.end(), 1.0);
    return f;
  }
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t tau = 1; tau <= n; ++tau)
    w[tau] = dist.pmf(static_cast<std::int64_t>(tau));
  for (std::size_t t = 1; t <= n; ++t) {
    double acc = w[t];
    for (std::size_t tau = 1; tau < t; ++tau) acc += w[tau] * f[t - tau];
    f[t] = acc;
  }
  return f;
}

std::vector<double> mean_inverse_time(const std::vector<double>& sprinkling_f) {
  std::vector<double> nbar(sprinkling_f.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = 1; t < sprinkling_f.size(); ++t) {
    acc += sprinkling_f[t];
    nbar[t] = acc;
  }
  return nbar;
}

std::vector<double> mgf_inverse_time(const WaitingTimeDist& dist, double z,
                                     std::int64_t horizon) {
  if (horizon < 1) throw std::domain_error("mgf_inverse_time: requires horizon >= 1");
  const auto n = static_cast<std::size_t>(horizon);
  const double ez = std::exp(z);
  std::vector<double> m(n + 1, 0.0);
  m[0] = 1.0;
  if (dist.kind() == WaitingKind::DeterministicUnit) {
    for (std::size_t t = 1; t <= n; ++t) m[t] = m[t - 1] * ez;
    return m;
  }
  std::vector<double> w(n + 1, 0.0);
  std::vector<double> surv(n + 1, 0.0);
  for (std::size_t tau = 1; tau <= n; ++tau) {
    w[tau] = dist.pmf(static_cast<std::int64_t>(tau));
    surv[tau] = dist.survival(static_cast<std::int64_t>(tau));
  }
  for (std::size_t t = 1; t <= n; ++t) {
    double acc = 0.0;
    for (std::size_t tau = 1; tau <= t; ++tau) acc += w[tau] * m[t - tau];
    m[t] = surv[t] + ez * acc;
  }
  return m;
}

double mgf_two_time(const std::vector<double>& mgf_one_time,
                    const std::vector<double>& sprinkling_f, double z,
                    std::int64_t t_prime, std::int64_t t_dprime) {
  if (t_dprime < 0 || t_dprime > t_prime)
    throw std::domain_error("mgf_two_time: requires 0 <= t'' <= t'");
  if (static_cast<std::size_t>(t_prime) >= mgf_one_time.size() ||
      static_cast<std::size_t>(t_dprime) >= sprinkling_f.size())
    throw std::domain_error("mgf_two_time: horizon overrun");
  const auto tp = static_cast<std::size_t>(t_prime);
  const auto ts = static_cast<std::size_t>(t_dprime);
  double acc = 0.0;
  for (std::size_t s = 1; s <= ts; ++s) acc += sprinkling_f[s] * mgf_one_time[tp - s];
  return mgf_one_time[tp] - (std::exp(z) - 1.0) * acc;
}

std::vector<double> random_time_distribution(const WaitingTimeDist& dist,
                                             std::int64_t n_events,
                                             std::int64_t horizon) {
  if (n_events < 1) throw std::domain_error("random_time_distribution: requires n >= 1");
  if (horizon < 1) throw std::domain_error("random_time_distribution: requires horizon >= 1");
  const auto n = static_cast<std::size_t>(horizon);
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t tau = 1; tau <= n; ++tau)
    w[tau] = dist.pmf(static_cast<std::int64_t>(tau));
  std::vector<double> p = w;
  for (std::int64_t k = 2; k <= n_events; ++k) {
    std::vector<double> next(n + 1, 0.0);
    for (std::size_t t = static_cast<std::size_t>(k); t <= n; ++t) {
      double acc = 0.0;
      for (std::size_t tau = 1; tau < t; ++tau) acc += w[tau] * p[t - tau];
      next[t] = acc;
    }
    p.swap(next);
  }
  return p;
}

RenewalSeries compute_renewal_series(const WaitingTimeDist& dist, double z,
                                     std::int64_t horizon) {
  RenewalSeries s;
  s.z = z;
  s.f = sprinkling(dist, horizon);
  s.nbar = mean_inverse_time(s.f);
  s.mgf = mgf_inverse_time(dist, z, horizon);
  return s;
}

}  // namespace lkr
