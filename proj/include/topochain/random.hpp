#ifndef TOPOCHAIN_RANDOM_HPP
#define TOPOCHAIN_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace topochain {

/// Seeded Gaussian stream used for quenched disorder draws.
///
/// std::normal_distribution is implementation-defined, so the Box-Muller
/// transform is spelled out here to keep fixed-seed runs bit-identical
/// across standard libraries. The generator identity is recorded in run
/// manifests.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  static constexpr const char* generator_id() { return "mt19937_64/box-muller"; }

  // Standard normal draw.
  double standard() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1), both from the top 53 bits.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double operator()(double mean, double stddev) { return mean + stddev * standard(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace topochain

#endif
