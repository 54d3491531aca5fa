#pragma once

#include <cstdint>
#include <vector>

#include "lkr/rotator.hpp"

namespace lkr {

// Standard-map ensemble used as the diffusion baseline.  Momenta are
// unbounded reals; angles are folded into [0, 2 pi).
struct ClassicalEnsemble {
  std::vector<double> thetas;
  std::vector<double> momenta;

  std::size_t size() const { return thetas.size(); }
};

// p <- p + K_t sin(theta); theta <- (theta + p) mod 2 pi, elementwise.
void classical_step(ClassicalEnsemble& ensemble, double kick_strength);

// Ensemble variance of p at each kick t = 0..t_max; initial condition p = 0,
// theta uniform on [0, 2 pi); each particle carries its own noise realization.
std::vector<double> classical_var_series(double K, const NoiseParams& noise,
                                         std::int64_t n_particles, std::int64_t t_max,
                                         std::uint64_t seed, int workers = 0);

}  // namespace lkr
