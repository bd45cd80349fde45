#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/allocation.hpp"
#include "platoon/experiments.hpp"
#include "platoon/queueing.hpp"
#include "platoon/sim.hpp"

namespace platoon {

// Raised on malformed config text, unknown keys, bad values, or
// inconsistent settings. Maps to the usage/config exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat run configuration shared by every subcommand. Sources stack in
// order: built-in defaults, then `key = value` lines from a file, then
// overrides in command-line order; the later source wins.
struct RunConfig {
  // Problem shape and channel constants.
  int n_vehicles = 5;
  double payload_bits = 256.0;
  int max_rate = 8;                    // alphabet is 1..max_rate bits/symbol
  std::optional<double> power_cap;     // unset = "auto": power of rate
                                       // min(4, max_rate) at the mean gain
  double mean_gain = 1.0;
  std::vector<double> mean_gains;      // per-hop override, comma separated;
                                       // empty = homogeneous mean_gain
  double kappa1 = 0.2;
  double kappa2 = 3.0;
  double noise_power = 1.0;
  double ber_target = 0.0005;
  double symbol_rate = 10000.0;

  // Allocator selection.
  std::string algorithm = "lcd";
  double nftrp_threshold = 0.5;
  int budget_cells = kDefaultBudgetCells;

  // Simulation controls.
  std::int64_t command_count = 1;
  std::optional<double> command_interarrival;  // seconds; unset = "auto":
                                               // twice the all-lowest latency
  double horizon_seconds = 0.0;        // > 0 switches to time-bounded runs
  std::int64_t max_attempts = 0;       // 0 = unbounded
  std::string arrival_process = "poisson";  // or "periodic"
  std::uint64_t seed = 0;
  std::string trace_file;              // per-event CSV when nonempty

  // Sweep controls.
  int replications = 50;
  std::vector<int> sweep_values;       // empty = subcommand default
  std::vector<std::string> algorithms = {"lcd", "ltrp", "pctrp", "nftrp"};

  // Queue analytics.
  double arrival_rate = 0.5;
  double service_rate = 1.0;
  double truncation_tail = 1e-12;

  // Keys assigned so far, from any source; lets callers distinguish an
  // explicit value from a default (seed warnings, sweep defaults).
  std::set<std::string> keys_set;

  bool is_set(const std::string& key) const { return keys_set.count(key) > 0; }
};

// One `key = value` assignment. Throws ConfigError on unknown keys or
// unparseable values; `where` names the source in the message.
void apply_assignment(RunConfig& config, const std::string& key,
                      const std::string& value, const std::string& where);

// `key = value` lines; `#` starts a comment, blank lines are skipped.
void apply_config_file(RunConfig& config, std::istream& in,
                       const std::string& source_name);

// A command-line `--set key=value` override.
void apply_override(RunConfig& config, const std::string& assignment);

// The concrete allocation instance the config describes.
AllocProblem problem_from(const RunConfig& config);

// Runs the configured allocator on `problem`. Propagates InfeasibleError.
RatePlan plan_from(const RunConfig& config, const AllocProblem& problem);

// Simulation setup for one dissemination run; resolves the interarrival
// default and the command-count vs horizon switch.
SimConfig sim_config_from(const RunConfig& config, const AllocProblem& problem,
                          const RatePlan& plan);

// Sweep setup. Unset sweep_values fall back to 5,10,..,50 platoon sizes or
// 5,15,..,65 payload bytes. For payload sweeps an unset n_vehicles falls
// back to 30; payload_bits must be a whole number of bytes for either sweep.
SweepSpec sweep_spec_from(const RunConfig& config,
                          SweepSpec::Variable variable);

// Arrival/service rates for the queue analytics.
QueueParams queue_params_from(const RunConfig& config);

}  // namespace platoon
