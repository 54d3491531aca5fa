#include "lkr/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lkr/errors.hpp"

namespace lkr {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoorFitThreshold = 0.5;

// Golden-section minimum of fn on [lo, hi].
double golden_min(const std::function<double(double)>& fn, double lo, double hi) {
  constexpr double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = fn(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

FitResult fit_break_time(const std::vector<double>& times,
                         const std::vector<double>& var_p, double hbar) {
  if (times.size() != var_p.size() || times.size() < 4)
    throw std::domain_error("fit_break_time: need matching series with >= 4 points");
  const double h2 = hbar * hbar;
  auto model = [&](double t, double d) {
    const double t_star = d / h2;
    return d * t_star * (-std::expm1(-t / t_star));
  };
  auto rss = [&](double ln_d) {
    const double d = std::exp(ln_d);
    double s = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double r = model(times[i], d) - var_p[i];
      s += r * r;
    }
    return s;
  };

  // coarse bracket on ln D, then golden refinement
  double best_ln = 0.0, best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 160; ++k) {
    const double ln_d = std::log(1e-3) + k * (std::log(1e5) - std::log(1e-3)) / 160.0;
    const double v = rss(ln_d);
    if (v < best_val) {
      best_val = v;
      best_ln = ln_d;
    }
  }
  const double step = (std::log(1e5) - std::log(1e-3)) / 160.0;
  const double ln_d = golden_min(rss, best_ln - step, best_ln + step);
  const double d_fit = std::exp(ln_d);

  const double final_rss = rss(ln_d);
  double mean_abs = 0.0;
  for (const double v : var_p) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(var_p.size());
  double grad_sq = 0.0;
  const double eps = d_fit * 1e-6;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double g = (model(times[i], d_fit + eps) - model(times[i], d_fit - eps)) / (2.0 * eps);
    grad_sq += g * g;
  }
  FitResult r;
  r.value = d_fit;
  const auto n = static_cast<double>(times.size());
  r.std_error = grad_sq > 0.0 ? std::sqrt(final_rss / std::max(1.0, n - 1.0) / grad_sq) : 0.0;
  r.residual_rel = mean_abs > 0.0 ? std::sqrt(final_rss / n) / mean_abs
                                  : std::numeric_limits<double>::infinity();
  r.window_lo = *std::min_element(times.begin(), times.end());
  r.window_hi = *std::max_element(times.begin(), times.end());
  r.poor_fit = r.residual_rel > kPoorFitThreshold;
  return r;
}

FitResult fit_power_law(const std::vector<double>& times,
                        const std::vector<double>& values, double window_lo,
                        double window_hi) {
  if (times.size() != values.size())
    throw std::domain_error("fit_power_law: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window_lo || times[i] > window_hi) continue;
    if (!(times[i] > 0.0) || !(values[i] > 0.0)) continue;
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 3) throw NumericalError("fit_power_law: window too narrow (<3 points)");
  const double span = *std::max_element(lx.begin(), lx.end()) -
                      *std::min_element(lx.begin(), lx.end());
  if (span < std::log(10.0) * 0.999)
    throw NumericalError("fit_power_law: window too narrow (<1 decade)");

  const auto n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    rss += r * r;
  }
  FitResult out;
  out.value = slope;
  out.std_error = lx.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  double mean_abs = 0.0;
  for (double v : ly) mean_abs += std::abs(v);
  mean_abs /= n;
  out.residual_rel = mean_abs > 0.0 ? std::sqrt(rss / n) / mean_abs : 0.0;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  return out;
}

ProfileFit fit_profile(const Histogram& hist) {
  if (hist.density.size() < 5) throw std::domain_error("fit_profile: degenerate histogram");
  const double peak = *std::max_element(hist.density.begin(), hist.density.end());
  if (!(peak > 0.0)) throw std::domain_error("fit_profile: empty histogram");

  std::vector<double> p, ld;
  double var_data = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < hist.density.size(); ++i) {
    const double d = hist.density[i];
    const double w = hist.bin_width[i];
    const double x = hist.p_center[i];
    var_data += d * w * x * x;
    mass += d * w;
    if (d <= 1e-6 * peak) continue;
    // central (coherent-backscattering) bin excluded
    if (std::abs(x) <= 0.5 * w) continue;
    p.push_back(x);
    ld.push_back(std::log(d));
  }
  if (p.size() < 4) throw std::domain_error("fit_profile: too few usable bins");
  var_data = std::max(var_data / std::max(mass, 1e-300), 1e-300);

  auto rss_gauss = [&](double ln_v) {
    const double v = std::exp(ln_v);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double m = -0.5 * std::log(2.0 * kPi * v) - p[i] * p[i] / (2.0 * v);
      const double r = m - ld[i];
      s += r * r;
    }
    return s;
  };
  auto rss_exp = [&](double ln_l) {
    const double lam = std::exp(ln_l);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double m = std::log(0.5 * lam) - lam * std::abs(p[i]);
      const double r = m - ld[i];
      s += r * r;
    }
    return s;
  };

  const double ln_v0 = std::log(var_data);
  const double ln_v = golden_min(rss_gauss, ln_v0 - 7.0, ln_v0 + 7.0);
  const double ln_l0 = 0.5 * std::log(2.0 / var_data);
  const double ln_l = golden_min(rss_exp, ln_l0 - 7.0, ln_l0 + 7.0);

  const auto n = static_cast<double>(p.size());
  ProfileFit out;
  out.residual_gaussian = std::sqrt(rss_gauss(ln_v) / n);
  out.residual_exponential = std::sqrt(rss_exp(ln_l) / n);
  if (out.residual_gaussian <= out.residual_exponential) {
    out.model = Profile::Gaussian;
    out.scale = std::exp(ln_v);
  } else {
    out.model = Profile::Exponential;
    out.scale = std::exp(ln_l);
  }
  return out;
}

}  // namespace lkr
