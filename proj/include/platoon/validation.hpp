#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "platoon/allocation.hpp"
#include "platoon/radio.hpp"

namespace platoon {

// Outcome of one cross-check: `measured` against `bound` (pass when
// measured <= bound, unless the check is informational).
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool informational = false;  // reported, never failing
  std::string note;
};

// Per-attempt success probability when the transmit power is sized against
// the mean gain: collapses to exp(-noise * kappa2 / ln(kappa1 / eps)),
// independent of both the rate and the mean gain.
double invariant_success_probability(const RadioConstants& consts);

// Max deviation of success_probability from the closed form across rates
// 1..max_rate and a few mean gains. Bound 1e-12.
CheckResult check_rate_invariance(const RadioConstants& consts, int max_rate);

// Monte Carlo success frequency per rate against a reference probability
// function (injectable so a broken analytic model is caught). Bound is the
// max absolute gap allowed.
using SuccessModel =
    std::function<double(RateLevel, double power, double mean_gain,
                         double noise)>;
CheckResult check_channel_agreement(const RadioConstants& consts, int max_rate,
                                    int attempts_per_rate, double bound,
                                    std::uint64_t seed,
                                    const SuccessModel& reference);

// Randomized dynamic-program vs exhaustive-search comparison; measured value
// is the number of disagreeing instances.
CheckResult check_dp_against_enumeration(int instances, std::uint64_t seed);

// Sample mean sojourn of the M/M/1 simulation against 1 / (mu - lambda).
CheckResult check_queue_sim_agreement(double arrival_rate, double service_rate,
                                      std::int64_t served, double rel_bound,
                                      std::uint64_t seed);

// Stationary distribution mass: |sum pi + tail - 1| <= 1e-9.
CheckResult check_steady_state_mass(double arrival_rate, double service_rate);

// Empirical mean and upper-tail mass of the gain sampler.
CheckResult check_gain_sampler_mean(double mean_gain, std::int64_t draws,
                                    double rel_bound, std::uint64_t seed);
CheckResult check_gain_sampler_tail(double mean_gain, std::int64_t draws,
                                    double abs_bound, std::uint64_t seed);

// Gap between the verbatim empty-queue closed form and 1 - phi.
// Informational: reported, not gated.
CheckResult check_pi_zero_gap(double phi, int n);

// A randomized allocation instance for oracle comparisons: 2..max_vehicles
// vehicles, 2..max_rate alphabet, heterogeneous mean gains in [0.5, 2], and
// a power cap drawn to span binding through slack regimes. May be
// infeasible.
AllocProblem random_problem(RandomStream& rng, int max_vehicles, int max_rate);

// The full suite with library defaults, as run by the command line.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed);

}  // namespace platoon
