#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "platoon/radio.hpp"

namespace platoon {

// Slack applied to the mean-power cap so that sums of per-hop powers that
// should sit exactly on the cap are not rejected over rounding.
inline constexpr double kPowerCapSlack = 1e-9;

// Default resolution of the quantized budget axis in lcd_allocate.
inline constexpr int kDefaultBudgetCells = 4096;

// Raised when no rate assignment can satisfy the power cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when brute_force_allocate is asked to enumerate more than 2^24 plans.
class InstanceTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A command dissemination instance: the head (vehicle 0) relays a payload of
// L bits down a chain of n_vehicles, one hop at a time.
struct AllocProblem {
  int n_vehicles = 2;          // head, relays, tail; n_vehicles - 1 hops
  double payload_bits = 256;   // L, bits per command
  double power_cap = 1.0;      // bound on the mean per-hop transmit power
  std::vector<RateLevel> rate_alphabet;    // strictly increasing
  std::vector<double> per_hop_mean_gain;   // nu_i for hop i, size n_vehicles-1
  RadioConstants radio;

  int hops() const { return n_vehicles - 1; }

  // Throws std::invalid_argument on inconsistent shapes or values.
  void validate() const;
};

// A per-hop rate assignment with the powers it implies. per_hop_power[i] is
// exactly required_power(rates[i], ber_target, per_hop_mean_gain[i]);
// expected_latency is the sum of the per-hop expected latencies in symbol
// periods (infinite when some hop can never succeed).
struct RatePlan {
  std::vector<RateLevel> rates;
  std::vector<double> per_hop_power;
  double expected_latency = 0.0;
};

// Work counters reported by lcd_allocate for scaling measurements.
struct DpStats {
  std::uint64_t relaxation_steps = 0;  // (cell, rate) pairs examined
  int budget_cells = 0;
  int hops = 0;
};

// Shared cap predicate: a plan fits when its mean per-hop power does not
// exceed the cap by more than kPowerCapSlack. Every allocator and validity
// check below uses this exact comparison.
bool within_power_cap(double total_power, int hops, double power_cap);

// Mean number of symbol periods to push L bits across one hop at rate r when
// each attempt succeeds with probability eta: (L / r) * (1 / eta).
// Throws std::domain_error unless eta is in (0, 1].
double expected_hop_latency(RateLevel r, double eta, double payload_bits);

// Per-attempt success probability of hop `hop` under `power`; 0 when the
// power is zero (the threshold can then never be met).
double hop_success_probability(const AllocProblem& problem, int hop,
                               RateLevel r, double power);

// Builds the RatePlan implied by a rate choice: powers from required_power
// against each hop's mean gain, latency summed hop by hop. Does not check
// the power cap.
RatePlan make_plan(const AllocProblem& problem,
                   const std::vector<RateLevel>& rates);

// Expected end-to-end latency of `plan` in symbol periods, recomputed from
// the plan's own powers. Matches plan.expected_latency bit for bit when the
// plan came from make_plan.
double plan_latency(const RatePlan& plan, const AllocProblem& problem);

// Mean of the per-hop powers.
double mean_power(const RatePlan& plan);

// Latency-optimal rate allocation under the mean power cap. Dynamic program
// over (hop index, quantized remaining power budget): the budget axis
// covering hops * power_cap is split into `budget_cells` cells; candidate
// totals are tracked exactly inside the cells so only genuinely feasible
// plans are returned. Ties in latency resolve to the lexicographically
// smallest rate sequence. Throws InfeasibleError when even the all-lowest
// plan breaks the cap.
RatePlan lcd_allocate(const AllocProblem& problem,
                      int budget_cells = kDefaultBudgetCells,
                      DpStats* stats = nullptr);

// Exhaustive enumeration over all alphabet^hops plans, same tie-break as
// lcd_allocate. Refuses instances with more than 2^24 plans.
RatePlan brute_force_allocate(const AllocProblem& problem);

// Lowest rate on every hop.
RatePlan ltrp_allocate(const AllocProblem& problem);

// Per-hop greedy: each hop independently takes the largest rate whose
// required power stays within power_cap. Throws InfeasibleError when some
// hop cannot afford even the lowest rate.
RatePlan pctrp_allocate(const AllocProblem& problem);

// Near-or-far split: a hop gets the top rate when its success probability at
// power min(required, power_cap) reaches `threshold`, otherwise the lowest.
// If the mean cap is then violated, the highest-power hops fall back to the
// lowest rate (rightmost first on ties) until the plan fits.
RatePlan nftrp_allocate(const AllocProblem& problem, double threshold = 0.5);

}  // namespace platoon
