#include "lkr/rotator.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace lkr {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Plan creation is not thread-safe in FFTW; executing a plan on new arrays is.
// Plans are cached per transform size and shared by all propagators.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  StateVec scratch;  // template buffer the plans were created on
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& shared_plans(std::int64_t n) {
  static std::map<std::int64_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanPair p;
  p.scratch.resize(static_cast<std::size_t>(n));
  auto* buf = reinterpret_cast<fftw_complex*>(p.scratch.data());
  const unsigned flags = n >= 2048 ? FFTW_MEASURE : FFTW_ESTIMATE;
  p.fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(n, std::move(p)).first->second;
}

// exp(i x) for |x| <= 0.05 without a libm call; truncation below 1e-15.
inline cplx small_phase(double x) {
  const double x2 = x * x;
  const double c = 1.0 + x2 * (-0.5 + x2 * (1.0 / 24.0 + x2 * (-1.0 / 720.0 + x2 / 40320.0)));
  const double s = x * (1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0 + x2 / 362880.0))));
  return {c, s};
}

inline cplx phase(double x) {
  if (std::abs(x) <= 0.05) return small_phase(x);
  return {std::cos(x), std::sin(x)};
}

}  // namespace

RotatorConfig RotatorConfig::custom(double K, std::int64_t M, std::int64_t N) {
  if (N < 2 || M < 1) throw std::domain_error("RotatorConfig: requires N >= 2, M >= 1");
  if (std::gcd(M, N) != 1) throw std::domain_error("RotatorConfig: requires gcd(M, N) = 1");
  RotatorConfig c;
  c.K = K;
  c.M = M;
  c.N = N;
  c.hbar = 2.0 * kPi * static_cast<double>(M) / static_cast<double>(N);
  return c;
}

double RotatorConfig::torus_variance_cap() const {
  const double n = static_cast<double>(N);
  return hbar * hbar * (n * n - 1.0) / 12.0;
}

NoiseParams NoiseParams::from_W(double W, WaitingTimeDist dist) {
  if (W < 0.0) throw std::domain_error("NoiseParams: requires W >= 0");
  NoiseParams p{W, W * W / 3.0, std::move(dist)};
  return p;
}

NoiseParams NoiseParams::from_kappa(double kappa, WaitingTimeDist dist) {
  if (kappa < 0.0) throw std::domain_error("NoiseParams: requires kappa >= 0");
  NoiseParams p{std::sqrt(3.0 * kappa), kappa, std::move(dist)};
  return p;
}

NoiseRealization NoiseRealization::generate(const NoiseParams& noise, std::int64_t horizon,
                                            std::mt19937_64& rng, std::uint64_t seed_tag) {
  NoiseRealization r;
  r.timeline = generate_timeline(noise.dist, horizon, rng, seed_tag);
  r.detunings.resize(r.timeline.events.size());
  std::uniform_real_distribution<double> box(-noise.W, noise.W);
  for (auto& k : r.detunings) k = noise.W == 0.0 ? 0.0 : box(rng);
  return r;
}

StateVec make_initial_state(const RotatorConfig& config) {
  StateVec psi(static_cast<std::size_t>(config.N), cplx{0.0, 0.0});
  psi[0] = 1.0;  // index 0 is level l = 0
  return psi;
}

struct FloquetPropagator::Impl {
  RotatorConfig cfg;
  const PlanPair* plans = nullptr;
  std::vector<double> cos_theta;
  std::vector<cplx> kick_base;              // exp(-i K cos theta / hbar)
  std::vector<cplx> kick_base_conj_scaled;  // conj / N
  std::vector<cplx> free_scaled;            // exp(-i hbar l^2 / 2) / N
  std::vector<cplx> free_conj;              // exp(+i hbar l^2 / 2)
};

FloquetPropagator::FloquetPropagator(const RotatorConfig& config)
    : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.cfg = config;
  im.plans = &shared_plans(config.N);
  const auto n = static_cast<std::size_t>(config.N);
  im.cos_theta.resize(n);
  im.kick_base.resize(n);
  im.kick_base_conj_scaled.resize(n);
  im.free_scaled.resize(n);
  im.free_conj.resize(n);
  const double inv_n = 1.0 / static_cast<double>(config.N);
  for (std::size_t j = 0; j < n; ++j) {
    im.cos_theta[j] = std::cos(2.0 * kPi * static_cast<double>(j) * inv_n);
    const cplx kick = phase(-config.K * im.cos_theta[j] / config.hbar);
    im.kick_base[j] = kick;
    im.kick_base_conj_scaled[j] = std::conj(kick) * inv_n;
    // free-rotation phase -hbar l^2 / 2 = -pi (M l^2 mod 2N) / N, reduced exactly
    const std::int64_t l = config.level(j);
    const std::int64_t r = (config.M % (2 * config.N)) * ((l * l) % (2 * config.N)) % (2 * config.N);
    const cplx rot = phase(-kPi * static_cast<double>(r) * inv_n);
    im.free_scaled[j] = rot * inv_n;
    im.free_conj[j] = std::conj(rot);
  }
}

FloquetPropagator::~FloquetPropagator() = default;

const RotatorConfig& FloquetPropagator::config() const { return impl_->cfg; }

void FloquetPropagator::step(StateVec& psi, double kick_strength) const {
  const auto& im = *impl_;
  const auto n = static_cast<std::size_t>(im.cfg.N);
  auto* buf = reinterpret_cast<fftw_complex*>(psi.data());
  fftw_execute_dft(im.plans->bwd, buf, buf);  // momentum -> angle
  if (kick_strength == im.cfg.K) {
    for (std::size_t j = 0; j < n; ++j) psi[j] *= im.kick_base[j];
  } else {
    const double a = (kick_strength - im.cfg.K) / im.cfg.hbar;
    for (std::size_t j = 0; j < n; ++j)
      psi[j] *= im.kick_base[j] * phase(-a * im.cos_theta[j]);
  }
  fftw_execute_dft(im.plans->fwd, buf, buf);  // angle -> momentum
  for (std::size_t j = 0; j < n; ++j) psi[j] *= im.free_scaled[j];
}

void FloquetPropagator::step_inverse(StateVec& psi, double kick_strength) const {
  const auto& im = *impl_;
  const auto n = static_cast<std::size_t>(im.cfg.N);
  for (std::size_t j = 0; j < n; ++j) psi[j] *= im.free_conj[j];
  auto* buf = reinterpret_cast<fftw_complex*>(psi.data());
  fftw_execute_dft(im.plans->bwd, buf, buf);
  if (kick_strength == im.cfg.K) {
    for (std::size_t j = 0; j < n; ++j) psi[j] *= im.kick_base_conj_scaled[j];
  } else {
    const double a = (kick_strength - im.cfg.K) / im.cfg.hbar;
    for (std::size_t j = 0; j < n; ++j)
      psi[j] *= im.kick_base_conj_scaled[j] * phase(a * im.cos_theta[j]);
  }
  fftw_execute_dft(im.plans->fwd, buf, buf);
}

}  // namespace lkr
