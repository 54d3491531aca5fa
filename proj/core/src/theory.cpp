#include "lkr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lkr/specfun.hpp"

namespace lkr {
namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TheoryParams TheoryParams::make(double D_star, double kappa, WaitingTimeDist dist,
                                double hbar) {
  if (!(D_star > 0.0)) throw std::domain_error("TheoryParams: requires D_star > 0");
  if (kappa < 0.0) throw std::domain_error("TheoryParams: requires kappa >= 0");
  if (!(hbar > 0.0)) throw std::domain_error("TheoryParams: requires hbar > 0");
  TheoryParams p;
  p.D_star = D_star;
  p.kappa = kappa;
  p.hbar = hbar;
  p.t_star = D_star / (hbar * hbar);
  p.t_c = kappa > 0.0 ? 2.0 * hbar * hbar / kappa : std::numeric_limits<double>::infinity();
  p.xi = p.t_star / 2.0;
  p.dist = std::move(dist);
  return p;
}

double var_p0(double t, double D_star, double t_star) {
  if (t < 0.0) throw std::domain_error("var_p0: requires t >= 0");
  return D_star * t_star * (-std::expm1(-t / t_star));
}

std::vector<double> noiseless_force_correlation(const std::vector<double>& var_p0_series) {
  if (var_p0_series.size() < 2)
    throw std::domain_error("noiseless_force_correlation: need var p0 on t = 0..T, T >= 1");
  if (var_p0_series[0] != 0.0)
    throw std::domain_error("noiseless_force_correlation: requires var p0(0) = 0");
  const std::size_t n = var_p0_series.size() - 1;  // c0 defined for lags 0..T-1
  std::vector<double> c0(n, 0.0);
  c0[0] = var_p0_series[1];
  for (std::size_t d = 1; d < n; ++d)
    c0[d] = 0.5 * (var_p0_series[d + 1] - 2.0 * var_p0_series[d] + var_p0_series[d - 1]);
  return c0;
}

double var_p_crossover(double t, double D_star, double t_star, double t_c_eff) {
  if (t < 0.0) throw std::domain_error("var_p_crossover: requires t >= 0");
  if (!std::isfinite(t_c_eff)) return var_p0(t, D_star, t_star);
  const double drift = D_star / (1.0 + t_c_eff / t_star) * t;
  const double ratio = 1.0 + t_star / t_c_eff;
  const double sat = D_star * t_star / (ratio * ratio) *
                     (-std::expm1(-t / t_star - t / t_c_eff));
  return drift + sat;
}

double var_p_subdiffusive(double t, const TheoryParams& params) {
  if (params.dist.kind() != WaitingKind::YuleSimon || params.dist.alpha() >= 1.0)
    throw std::domain_error("var_p_subdiffusive: requires Yule-Simon with alpha < 1");
  const double alpha = params.dist.alpha();
  const double c = params.dist.tail_constant();
  return params.D_star * params.t_star / params.t_c * std::sin(kPi * alpha) / (kPi * c) *
         std::pow(t, alpha);
}

double ipr_prediction(double var_p, double hbar, Profile profile) {
  if (!(var_p > 0.0)) throw std::domain_error("ipr_prediction: requires var_p > 0");
  const double v = profile == Profile::Gaussian ? hbar / std::sqrt(kPi * var_p)
                                                : hbar / std::sqrt(2.0 * var_p);
  return std::min(v, 1.0);
}

double decoherence_ml_approx(double alpha, double tail_c, double t_c, double nbar_t) {
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw std::domain_error("decoherence_ml_approx: requires 0 < alpha < 1");
  (void)tail_c;  // the tail constant enters through nbar_t
  const double arg = -std::exp(log_gamma(1.0 + alpha)) * nbar_t / t_c;
  return mittag_leffler(alpha, arg);
}

Profile profile_for(const WaitingTimeDist& dist) {
  if (dist.kind() == WaitingKind::YuleSimon && dist.alpha() <= 1.0)
    return Profile::Exponential;
  return Profile::Gaussian;
}

TheoryEngine::TheoryEngine(const TheoryParams& params, std::int64_t horizon)
    : params_(params) {
  if (horizon < 1) throw std::domain_error("TheoryEngine: requires horizon >= 1");
  z_ = std::isfinite(params_.t_c) ? -1.0 / params_.t_c : 0.0;
  f_ = sprinkling(params_.dist, horizon);
  nbar_ = mean_inverse_time(f_);
  mgf_ = mgf_inverse_time(params_.dist, z_, horizon);
}

double TheoryEngine::decoherence(std::int64_t t_prime, std::int64_t t_dprime) const {
  if (t_prime < t_dprime) std::swap(t_prime, t_dprime);
  return mgf_two_time(mgf_, f_, z_, t_prime, t_dprime);
}

double TheoryEngine::decoherence_ml(std::int64_t t) const {
  return decoherence_ml_approx(params_.dist.alpha(), params_.dist.tail_constant(),
                               params_.t_c, nbar(t));
}

std::vector<double> TheoryEngine::var_p_prediction(const std::vector<std::int64_t>& times,
                                                   bool decoherence_off) const {
  std::vector<std::int64_t> targets = times;
  std::sort(targets.begin(), targets.end());
  if (!targets.empty() && (targets.front() < 0 || targets.back() > horizon()))
    throw std::domain_error("var_p_prediction: target beyond horizon");

  const auto t_top = targets.empty() ? 0 : targets.back();
  std::vector<double> v0(static_cast<std::size_t>(t_top) + 1);
  for (std::size_t t = 0; t < v0.size(); ++t)
    v0[t] = var_p0(static_cast<double>(t), params_.D_star, params_.t_star);
  const std::vector<double> c0 =
      t_top >= 1 ? noiseless_force_correlation(v0) : std::vector<double>{};

  std::vector<double> result(times.size(), 0.0);
  auto emit = [&](std::int64_t t, double value) {
    for (std::size_t i = 0; i < times.size(); ++i)
      if (times[i] == t) result[i] = value;
  };
  const double ez1 = std::expm1(z_);
  long double total = 0.0L;
  std::size_t ti = 0;
  while (ti < targets.size() && targets[ti] == 0) {
    emit(0, 0.0);
    ++ti;
  }
  for (std::int64_t tp = 0; tp < t_top; ++tp) {
    const auto utp = static_cast<std::size_t>(tp);
    long double row = c0[0];
    if (decoherence_off || z_ == 0.0) {
      for (std::size_t tb = 0; tb < utp; ++tb) row += 2.0L * c0[utp - tb];
    } else {
      double g = 0.0;
      const double m_tp = mgf_[utp];
      for (std::size_t tb = 0; tb < utp; ++tb) {
        if (tb > 0) g += f_[tb] * mgf_[utp - tb];
        const double d = m_tp - ez1 * g;
        row += 2.0L * c0[utp - tb] * d;
      }
    }
    total += row;
    while (ti < targets.size() && targets[ti] == tp + 1) {
      const double noise_floor =
          0.5 * params_.kappa * nbar_[static_cast<std::size_t>(tp + 1)];
      emit(tp + 1, static_cast<double>(total) + noise_floor);
      ++ti;
    }
  }
  return result;
}

double TheoryEngine::purity_prediction(std::int64_t t, double var_pred) const {
  const double d = decoherence(t, 0);
  const double ipr_term =
      var_pred > 0.0 ? ipr_prediction(var_pred, params_.hbar, profile_for(params_.dist))
                     : 1.0;
  return std::min(d * d + ipr_term, 1.0);
}

double TheoryEngine::logfid_prediction(std::int64_t t) const {
  if (!std::isfinite(params_.t_c)) return 0.0;
  return -2.0 * nbar(t) / params_.t_c;
}

TheorySeries TheoryEngine::series(const std::vector<std::int64_t>& times) const {
  TheorySeries s;
  s.times = times;
  s.var_p_pred = var_p_prediction(times);
  s.decoherence_D.reserve(times.size());
  s.ipr_pred.reserve(times.size());
  s.purity_pred.reserve(times.size());
  s.logfid_pred.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const std::int64_t t = times[i];
    s.decoherence_D.push_back(decoherence(t, 0));
    s.ipr_pred.push_back(s.var_p_pred[i] > 0.0
                             ? ipr_prediction(s.var_p_pred[i], params_.hbar,
                                              profile_for(params_.dist))
                             : 1.0);
    s.purity_pred.push_back(purity_prediction(t, s.var_p_pred[i]));
    s.logfid_pred.push_back(logfid_prediction(t));
  }
  return s;
}

}  // namespace lkr
