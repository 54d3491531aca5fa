#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <new>
#include <random>
#include <vector>

#include "lkr/renewal.hpp"

namespace lkr {

using cplx = std::complex<double>;

// 64-byte aligned storage so DFT plans can be shared across state buffers.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(alignment)));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t(alignment)); }
  bool operator==(const AlignedAllocator&) const { return true; }
};

// Momentum-basis amplitudes; index j maps to level l = j (j <= (N-1)/2) or
// j - N, i.e. the grid is centered on l = 0.
using StateVec = std::vector<cplx, AlignedAllocator<cplx>>;

// Physical and numerical parameters of the kicked rotator.  hbar = 2 pi M / N;
// momentum levels l span [-N/2, N/2) with p_l = hbar * l, angles theta_j = 2 pi j / N.
struct RotatorConfig {
  double K = 7.5;
  std::int64_t M = 577;
  std::int64_t N = 13872;
  double hbar = 0.0;

  // Presets from successive convergents of 1/(24 + 1/(24 + ...)).
  static RotatorConfig full(double K = 7.5) { return custom(K, 577, 13872); }
  static RotatorConfig fast(double K = 7.5) { return custom(K, 24, 577); }
  static RotatorConfig custom(double K, std::int64_t M, std::int64_t N);

  std::int64_t level(std::size_t j) const {
    const auto i = static_cast<std::int64_t>(j);
    return i <= (N - 1) / 2 ? i : i - N;
  }
  double momentum(std::size_t j) const { return hbar * static_cast<double>(level(j)); }
  std::int64_t min_level() const { return level(static_cast<std::size_t>((N - 1) / 2 + 1) % N); }
  std::int64_t max_level() const { return (N - 1) / 2; }
  // Uniform-occupation variance of the momentum grid, hbar^2 (N^2 - 1) / 12.
  double torus_variance_cap() const;
};

// Strength and timing law of the amplitude noise; kappa = W^2 / 3.
struct NoiseParams {
  double W = 0.0;
  double kappa = 0.0;
  WaitingTimeDist dist = WaitingTimeDist::deterministic_unit();

  static NoiseParams from_W(double W, WaitingTimeDist dist);
  static NoiseParams from_kappa(double kappa, WaitingTimeDist dist);
};

// One sampled noise history: event times plus one detuning per event.
struct NoiseRealization {
  NoiseTimeline timeline;
  std::vector<double> detunings;

  static NoiseRealization generate(const NoiseParams& noise, std::int64_t horizon,
                                   std::mt19937_64& rng, std::uint64_t seed_tag = 0);
};

StateVec make_initial_state(const RotatorConfig& config);

// One-period propagator: psi -> exp(-i p^2 / 2 hbar) exp(-i K_t cos theta / hbar) psi,
// kick factor applied first.  The angle representation is reached by a size-N DFT.
// step() is safe to call concurrently on distinct state buffers.
class FloquetPropagator {
 public:
  explicit FloquetPropagator(const RotatorConfig& config);
  ~FloquetPropagator();
  FloquetPropagator(const FloquetPropagator&) = delete;
  FloquetPropagator& operator=(const FloquetPropagator&) = delete;

  const RotatorConfig& config() const;
  void step(StateVec& psi, double kick_strength) const;
  void step_inverse(StateVec& psi, double kick_strength) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lkr
