#include "lkr/classical.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lkr/rng.hpp"

namespace lkr {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr std::int64_t kBlock = 4096;  // particles per reduction block
constexpr std::uint64_t kClassicalStreamTag = 0xC1A551CA1ULL;

}  // namespace

void classical_step(ClassicalEnsemble& ensemble, double kick_strength) {
  if (ensemble.thetas.size() != ensemble.momenta.size())
    throw std::domain_error("classical_step: ragged ensemble");
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    ensemble.momenta[i] += kick_strength * std::sin(ensemble.thetas[i]);
    double th = ensemble.thetas[i] + ensemble.momenta[i];
    th = std::fmod(th, kTwoPi);
    if (th < 0.0) th += kTwoPi;
    ensemble.thetas[i] = th;
  }
}

std::vector<double> classical_var_series(double K, const NoiseParams& noise,
                                         std::int64_t n_particles, std::int64_t t_max,
                                         std::uint64_t seed, int workers) {
  if (n_particles < 2) throw std::domain_error("classical_var_series: requires >= 2 particles");
  if (t_max < 1) throw std::domain_error("classical_var_series: requires t_max >= 1");
  const int n_threads = workers > 0 ? workers
                                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::int64_t n_blocks = (n_particles + kBlock - 1) / kBlock;
  const auto n_rows = static_cast<std::size_t>(t_max) + 1;

  // per-block sums of p and p^2 at every kick
  std::vector<std::vector<double>> sum_p(static_cast<std::size_t>(n_blocks)),
      sum_p2(static_cast<std::size_t>(n_blocks));

  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(n_particles, lo + kBlock);
      auto& sp = sum_p[static_cast<std::size_t>(b)];
      auto& sp2 = sum_p2[static_cast<std::size_t>(b)];
      sp.assign(n_rows, 0.0);
      sp2.assign(n_rows, 0.0);
      std::uniform_real_distribution<double> angle(0.0, kTwoPi);
      std::uniform_real_distribution<double> box(-noise.W, noise.W);
      for (std::int64_t i = lo; i < hi; ++i) {
        auto rng = make_engine(seed ^ kClassicalStreamTag, static_cast<std::uint64_t>(i));
        double theta = angle(rng);
        double p = 0.0;
        std::int64_t next_event = noise.dist.sample(rng);
        for (std::int64_t t = 1; t <= t_max; ++t) {
          double kick = K;
          if (t == next_event) {
            if (noise.W != 0.0) kick += box(rng);
            next_event += noise.dist.sample(rng);
          }
          p += kick * std::sin(theta);
          theta = std::fmod(theta + p, kTwoPi);
          if (theta < 0.0) theta += kTwoPi;
          const auto row = static_cast<std::size_t>(t);
          sp[row] += p;
          sp2[row] += p * p;
        }
      }
    }
  };
  if (n_threads <= 1 || n_blocks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<std::int64_t>(n_threads, n_blocks); ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<double> var(n_rows, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n_particles);
  for (std::size_t t = 1; t < n_rows; ++t) {
    double m = 0.0, s2 = 0.0;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
      m += sum_p[static_cast<std::size_t>(b)][t];
      s2 += sum_p2[static_cast<std::size_t>(b)][t];
    }
    m *= inv_n;
    var[t] = s2 * inv_n - m * m;
  }
  return var;
}

}  // namespace lkr
