#pragma once

namespace lkr {

// Evaluation policy for the Mittag-Leffler function E_alpha on the negative
// real axis.  The power series is used for |x| below the switch point, the
// asymptotic inverse-power expansion above it; each branch falls back to the
// other when its internal error estimate misses target_abs_tol.
struct MlfEvalPolicy {
  int series_cutoff_terms = 1200;         // >= 50
  double series_asymptotic_switch = 5.0;  // argument magnitude at branch switch
  double target_abs_tol = 1e-10;          // > 0 and <= 1e-8
};

// ln Gamma(x) for x > 0.  Throws std::domain_error for x <= 0.
double log_gamma(double x);

// E_alpha(x) = sum_n x^n / Gamma(alpha n + 1) for 0 < alpha <= 1 and x <= 0.
// Result lies in (0, 1].  Throws std::domain_error outside the parameter
// range and lkr::NumericalError when neither branch reaches tolerance.
double mittag_leffler(double alpha, double x, const MlfEvalPolicy& policy = {});

// Gauss hypergeometric 2F1(1, 1; alpha + 2; x) for alpha > 0, 0 <= x < 1,
// by direct series summation (all terms positive).
double hyp2f1_11(double alpha, double x);

}  // namespace lkr
