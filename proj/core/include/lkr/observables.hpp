#pragma once

#include <cstdint>
#include <vector>

#include "lkr/rotator.hpp"

namespace lkr {

struct MomentResult {
  double mean_p = 0.0;
  double var_p = 0.0;
  double norm = 0.0;
  double edge_mass = 0.0;  // probability within 5% of either grid edge
  bool wrap_warning = false;
};

// <p>, var p and the grid-edge mass of a normalized state.
MomentResult momentum_moments(const StateVec& psi, const RotatorConfig& config);

double state_norm(const StateVec& psi);

// Inverse participation ratio sum_l |psi_l|^4 in the momentum basis.
double ipr(const StateVec& psi);
double ensemble_ipr(const std::vector<StateVec>& states);

cplx overlap(const StateVec& a, const StateVec& b);

struct PurityResult {
  double value = 0.0;
  double se = 0.0;
  std::int64_t pairs = 0;
};

// Unbiased pair estimator of tr rho^2: mean |<psi_i|psi_j>|^2 over unordered
// pairs i != j; all pairs when R <= 64, else 64 R pairs sampled with the
// deterministic stream `pair_seed`.
PurityResult purity_estimate(const std::vector<StateVec>& states, std::uint64_t pair_seed);

struct LogFidelityResult {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t pairs = 0;
  std::int64_t skipped = 0;  // overlaps below the 1e-300 underflow guard
};

// Mean of ln |<psi_i|psi_j>|^2 over the disjoint pairs (0,1), (2,3), ...
LogFidelityResult log_fidelity_estimate(const std::vector<StateVec>& states);

struct Histogram {
  std::vector<double> p_center;
  std::vector<double> density;    // per unit momentum; integrates to 1
  std::vector<double> bin_width;  // in momentum units
};

// Rebinned density from an ensemble-mean momentum occupation (length N,
// indexed like StateVec).  Bins group `rebin_width` consecutive levels from
// the bottom of the centered grid; the remainder joins the last bin.
Histogram density_histogram(const std::vector<double>& mean_occupation,
                            const RotatorConfig& config, int rebin_width);

Histogram momentum_distribution(const std::vector<StateVec>& states,
                                const RotatorConfig& config, int rebin_width);

}  // namespace lkr
