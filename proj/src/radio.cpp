#include "platoon/radio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace platoon {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt_a,
                          std::uint64_t salt_b) {
  std::uint64_t x = mix64(master);
  x = mix64(x ^ mix64(salt_a));
  x = mix64(x ^ mix64(salt_b));
  return x;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

}  // namespace

RadioConstants::RadioConstants(double kappa1, double kappa2,
                               double noise_power, double mean_gain,
                               double ber_target, double symbol_rate)
    : kappa1(kappa1),
      kappa2(kappa2),
      noise_power(noise_power),
      mean_gain(mean_gain),
      ber_target(ber_target),
      symbol_rate(symbol_rate) {
  require_positive(kappa1, "kappa1");
  require_positive(kappa2, "kappa2");
  require_positive(noise_power, "noise_power");
  require_positive(mean_gain, "mean_gain");
  require_positive(ber_target, "ber_target");
  require_positive(symbol_rate, "symbol_rate");
  if (ber_target > kappa1) {
    throw std::invalid_argument("ber_target must not exceed kappa1");
  }
}

RateLevel::RateLevel(int bits) : bits_per_symbol(bits) {
  if (bits < 1 || bits > kMaxRateBits) {
    throw std::invalid_argument("rate must be between 1 and " +
                                std::to_string(kMaxRateBits) +
                                " bits per symbol");
  }
}

double required_power(RateLevel r, double eps, double gain,
                      const RadioConstants& consts) {
  if (!(eps > 0.0) || eps > consts.kappa1) {
    throw std::domain_error("ber target must lie in (0, kappa1]");
  }
  if (!(gain > 0.0)) {
    throw std::domain_error("channel gain must be positive");
  }
  const double margin = std::log(consts.kappa1 / eps) / consts.kappa2;
  return margin * (snr_threshold(r) / gain);
}

double snr(double gain, double power, double noise) {
  if (gain < 0.0 || power < 0.0) {
    throw std::domain_error("gain and power must be non-negative");
  }
  if (!(noise > 0.0)) {
    throw std::domain_error("noise power must be positive");
  }
  return gain * power / noise;
}

double snr_threshold(RateLevel r) {
  return static_cast<double>((1ull << r.bits_per_symbol) - 1ull);
}

double success_probability(RateLevel r, double power, double mean_gain,
                           double noise) {
  if (!(power > 0.0) || !(mean_gain > 0.0) || !(noise > 0.0)) {
    throw std::domain_error("power, mean gain and noise must be positive");
  }
  return std::exp(-snr_threshold(r) * noise / (mean_gain * power));
}

double sample_gain(double mean_gain, RandomStream& rng) {
  if (!(mean_gain > 0.0)) {
    throw std::domain_error("mean gain must be positive");
  }
  // Inverse CDF of the exponential; 1-u stays in (0, 1] so the log is finite.
  return -mean_gain * std::log(1.0 - uniform01(rng));
}

bool attempt_succeeds(RateLevel r, double power, double mean_gain,
                      double noise, RandomStream& rng) {
  const double g = sample_gain(mean_gain, rng);
  return snr(g, power, noise) >= snr_threshold(r);
}

}  // namespace platoon
