#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lkr {

enum class WaitingKind { DeterministicUnit, YuleSimon };

// Waiting-time law of the renewal process driving the noise events.
// Yule-Simon: w(tau) = alpha Gamma(tau) Gamma(alpha+1) / Gamma(tau+alpha+1),
// tau = 1, 2, ...; power-law tail c * tau^{-1-alpha} with c = alpha Gamma(alpha+1).
class WaitingTimeDist {
 public:
  static WaitingTimeDist deterministic_unit();
  static WaitingTimeDist yule_simon(double alpha);

  WaitingKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double tail_constant() const { return tail_c_; }
  bool finite_mean() const;
  // alpha/(alpha-1) for Yule-Simon with alpha > 1, 1 for the deterministic
  // law, +infinity otherwise.
  double mean_waiting_time() const;

  double pmf(std::int64_t tau) const;
  // P(tau > k); closed form k*B(k, alpha+1) for Yule-Simon.
  double survival(std::int64_t k) const;
  // Inverse-transform draw on the closed-form survival function.
  std::int64_t sample(std::mt19937_64& rng) const;

 private:
  WaitingTimeDist(WaitingKind kind, double alpha);

  WaitingKind kind_;
  double alpha_ = 0.0;
  double tail_c_ = 0.0;
  std::vector<double> survival_table_;  // S(0..table_max), Yule-Simon only
};

// One sampled sequence of noise-event times on kicks 1..horizon.
struct NoiseTimeline {
  std::int64_t horizon = 0;
  std::vector<std::int64_t> events;  // strictly increasing, in [1, horizon]
  std::uint64_t seed_tag = 0;

  // Number of events with t_lo < t <= t_hi.
  std::int64_t count(std::int64_t t_hi, std::int64_t t_lo) const;
};

NoiseTimeline generate_timeline(const WaitingTimeDist& dist, std::int64_t horizon,
                                std::mt19937_64& rng, std::uint64_t seed_tag = 0);

// Sprinkling distribution f(t) = P(event at kick t), t = 0..horizon (f(0)=0),
// from the exact discrete renewal recursion
//   f(t) = w(t) + sum_{tau<t} w(tau) f(t-tau).
std::vector<double> sprinkling(const WaitingTimeDist& dist, std::int64_t horizon);

// Mean inverse random time Nbar(t) = sum_{s<=t} f(s); Nbar(0) = 0.
std::vector<double> mean_inverse_time(const std::vector<double>& sprinkling_f);

// Moment-generating function M(z; t, 0) = E[exp(z N(t,0))] for t = 0..horizon,
// via the first-event decomposition
//   M(z; t, 0) = survival(t) + sum_{tau<=t} w(tau) e^z M(z; t-tau, 0).
std::vector<double> mgf_inverse_time(const WaitingTimeDist& dist, double z,
                                     std::int64_t horizon);

// Two-time MGF M(z; t', t'') = E[exp(z N(t', t''))] from the one-time curve
// and the sprinkling distribution; exact for the integer-time process.
double mgf_two_time(const std::vector<double>& mgf_one_time,
                    const std::vector<double>& sprinkling_f, double z,
                    std::int64_t t_prime, std::int64_t t_dprime);

// P(t_N = t) for the n-th event time, t = 0..horizon (zero below n);
// n-fold discrete self-convolution of the pmf.
std::vector<double> random_time_distribution(const WaitingTimeDist& dist,
                                             std::int64_t n_events,
                                             std::int64_t horizon);

// Bundled renewal statistics for CSV export: columns t, f, nbar, mgf(z).
struct RenewalSeries {
  double z = 0.0;
  std::vector<double> f;
  std::vector<double> nbar;
  std::vector<double> mgf;
};

RenewalSeries compute_renewal_series(const WaitingTimeDist& dist, double z,
                                     std::int64_t horizon);

}  // namespace lkr
