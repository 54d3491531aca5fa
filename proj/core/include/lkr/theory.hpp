#pragma once

#include <cstdint>
#include <vector>

#include "lkr/renewal.hpp"

namespace lkr {

enum class Profile { Gaussian, Exponential };

// Derived scales of the localization/decoherence theory:
//   t_star = D_star / hbar^2,   t_c = 2 hbar^2 / kappa,   xi = t_star / 2.
struct TheoryParams {
  double D_star = 0.0;
  double t_star = 0.0;
  double t_c = 0.0;
  double xi = 0.0;
  double kappa = 0.0;
  double hbar = 0.0;
  WaitingTimeDist dist = WaitingTimeDist::deterministic_unit();

  static TheoryParams make(double D_star, double kappa, WaitingTimeDist dist, double hbar);
  bool weak_noise() const { return t_c > 10.0 * t_star; }
  double p_star() const { return D_star / hbar; }
};

// Noiseless localization curve D* t* [1 - exp(-t/t*)].
double var_p0(double t, double D_star, double t_star);

// Force-correlation sequence c0(0..T-1) recovered from var p0(0..T) by
// discrete second differences; satisfies the exact reconstruction identity
// sum_{t',t''<t} c0(|t'-t''|) = var p0(t).
std::vector<double> noiseless_force_correlation(const std::vector<double>& var_p0_series);

// Crossover law for exponentially decaying decoherence with effective
// coherence time t_c_eff (t_c for every-kick noise, mean-waiting * t_c above).
double var_p_crossover(double t, double D_star, double t_star, double t_c_eff);

// Subdiffusive asymptote (D* t* / t_c) sin(pi alpha)/(pi c) t^alpha, alpha < 1.
double var_p_subdiffusive(double t, const TheoryParams& params);

// Quasiclassical IPR: hbar/sqrt(pi var p) (Gaussian), hbar/sqrt(2 var p)
// (double-sided exponential); capped at 1.
double ipr_prediction(double var_p, double hbar, Profile profile);

// Mittag-Leffler approximation E_alpha[-Gamma(1+alpha) nbar / t_c], alpha < 1.
double decoherence_ml_approx(double alpha, double tail_c, double t_c, double nbar_t);

// Momentum-profile family observed for the waiting-time law: exponential for
// nonstationary noise (alpha <= 1), Gaussian otherwise.
Profile profile_for(const WaitingTimeDist& dist);

struct TheorySeries {
  std::vector<std::int64_t> times;
  std::vector<double> var_p_pred;
  std::vector<double> decoherence_D;
  std::vector<double> ipr_pred;
  std::vector<double> purity_pred;
  std::vector<double> logfid_pred;
};

// Precomputes the renewal inputs (sprinkling, mean count, one-time MGF at
// z = -1/t_c) on [0, horizon] and evaluates the predictions on demand.
class TheoryEngine {
 public:
  TheoryEngine(const TheoryParams& params, std::int64_t horizon);

  const TheoryParams& params() const { return params_; }
  std::int64_t horizon() const { return static_cast<std::int64_t>(nbar_.size()) - 1; }

  double nbar(std::int64_t t) const { return nbar_.at(static_cast<std::size_t>(t)); }
  const std::vector<double>& sprinkling_f() const { return f_; }
  const std::vector<double>& mgf() const { return mgf_; }

  // Exact decoherence factor D(t', t'') = M(-1/t_c; t', t''), symmetrized.
  double decoherence(std::int64_t t_prime, std::int64_t t_dprime) const;
  double decoherence_ml(std::int64_t t) const;

  // Main variance formula: sum_{t',t''<t} c0(|t'-t''|) D(t',t'') + kappa/2 nbar(t).
  // decoherence_off forces D == 1 (reconstruction identity path).
  std::vector<double> var_p_prediction(const std::vector<std::int64_t>& times,
                                       bool decoherence_off = false) const;

  // D^2(t,0) + quasiclassical IPR on the predicted variance, clipped to <= 1.
  double purity_prediction(std::int64_t t, double var_pred) const;

  double logfid_prediction(std::int64_t t) const;

  TheorySeries series(const std::vector<std::int64_t>& times) const;

 private:
  TheoryParams params_;
  double z_ = 0.0;  // -1/t_c
  std::vector<double> f_, nbar_, mgf_;
};

}  // namespace lkr
