#pragma once

#include <cstdint>
#include <random>

namespace platoon {

// All stochastic code draws from an explicitly passed stream; nothing keeps
// hidden RNG state.
using RandomStream = std::mt19937_64;

// Guard for 2^r arithmetic; the usual alphabets stop at 8 bits/symbol.
inline constexpr int kMaxRateBits = 16;

// Uniform double in [0, 1) built from the top 53 bits of one 64-bit draw.
// Hand-rolled so that sequences are reproducible independent of the standard
// library's distribution internals.
inline double uniform01(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Splitmix64 scramble; used to derive independent per-run seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for a child stream identified by (salt_a, salt_b) under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt_a,
                          std::uint64_t salt_b = 0);

// Channel-dependent constants shared by every link of the platoon.
struct RadioConstants {
  double kappa1;       // modulation-family constant, > 0
  double kappa2;       // modulation-family constant, > 0
  double noise_power;  // sigma0^2, linear units, > 0
  double mean_gain;    // nu, mean power gain of the fading channel, > 0
  double ber_target;   // epsilon, in (0, kappa1]
  double symbol_rate;  // symbols per second; converts airtime to seconds

  // Throws std::invalid_argument when a field is out of range. ber_target
  // above kappa1 would make the power formula negative, so it is rejected.
  RadioConstants(double kappa1, double kappa2, double noise_power,
                 double mean_gain, double ber_target, double symbol_rate);
};

// Modulation order: bits carried per symbol. 1=BPSK, 2=QPSK, 3=8PSK,
// r>=4 is 2^r-QAM.
struct RateLevel {
  int bits_per_symbol;

  explicit RateLevel(int bits);

  bool operator==(const RateLevel&) const = default;
  bool operator<(const RateLevel& other) const {
    return bits_per_symbol < other.bits_per_symbol;
  }
};

// One wireless hop between adjacent vehicles. instantaneous_gain is resampled
// once per transmission attempt (block fading).
struct HopLink {
  double mean_gain = 1.0;
  double instantaneous_gain = 0.0;
};

// Transmit power that meets the bit-error-rate target eps over a link with
// power gain `gain`: (1/kappa2) * ln(kappa1/eps) * (2^r - 1) / gain.
// Strictly increasing in r, strictly decreasing in gain, zero at eps==kappa1.
double required_power(RateLevel r, double eps, double gain,
                      const RadioConstants& consts);

// Linear SNR of a link: gain * power / noise.
double snr(double gain, double power, double noise);

// Minimum SNR at which rate r decodes: 2^r - 1.
double snr_threshold(RateLevel r);

// Probability that one attempt at rate r crosses the hop, for an
// exponentially distributed power gain with mean `mean_gain`:
//   exp(-(2^r - 1) * noise / (mean_gain * power)).
double success_probability(RateLevel r, double power, double mean_gain,
                           double noise);

// One draw of the instantaneous power gain of a Rayleigh-faded link:
// exponential with mean `mean_gain`.
double sample_gain(double mean_gain, RandomStream& rng);

// One block-fading frame: fresh gain draw, success iff SNR clears the rate's
// threshold. Power 0 never succeeds.
bool attempt_succeeds(RateLevel r, double power, double mean_gain,
                      double noise, RandomStream& rng);

}  // namespace platoon
