#pragma once

#include <vector>

#include "lkr/observables.hpp"
#include "lkr/theory.hpp"

namespace lkr {

struct FitResult {
  double value = 0.0;
  double std_error = 0.0;
  double residual_rel = 0.0;  // RMS residual over mean |data| in the window
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool poor_fit = false;
};

// Single-parameter least-squares fit of D* in
//   var p0(t) = D t*(D) [1 - exp(-t / t*(D))],  t*(D) = D / hbar^2.
// poor_fit is set when the relative RMS residual exceeds 0.5.
FitResult fit_break_time(const std::vector<double>& times,
                         const std::vector<double>& var_p, double hbar);

// Least-squares slope in log-log coordinates over times in [window_lo, window_hi].
// Requires positive data and a window spanning at least one decade.
FitResult fit_power_law(const std::vector<double>& times,
                        const std::vector<double>& values, double window_lo,
                        double window_hi);

struct ProfileFit {
  Profile model = Profile::Gaussian;
  double scale = 0.0;  // variance v for Gaussian, rate lambda for exponential
  double residual_gaussian = 0.0;
  double residual_exponential = 0.0;
};

// Classifies a normalized momentum histogram as Gaussian or double-sided
// exponential by one-parameter least squares on the log-density; the central
// bin and bins below 1e-6 of the peak are excluded.
ProfileFit fit_profile(const Histogram& hist);

}  // namespace lkr
