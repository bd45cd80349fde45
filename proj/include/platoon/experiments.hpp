#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "platoon/allocation.hpp"
#include "platoon/radio.hpp"

namespace platoon {

// Exact header of every sweep CSV, also accepted back by parse_csv.
inline constexpr const char* kSweepCsvHeader =
    "algorithm,sweep_var,sweep_value,replications,diss_rate_mean,"
    "diss_rate_ci95,latency_mean_s,latency_ci95_s,analytic_latency_s,"
    "infeasible_count";

// Everything a sweep holds fixed. Optional fields resolve per point:
// power_cap defaults to the power the fourth rate needs at the mean gain,
// interarrival to twice the expected head-to-tail latency of an all-lowest
// plan.
struct SweepFixed {
  RadioConstants radio{0.2, 3.0, 1.0, 1.0, 0.0005, 1e4};
  int max_rate = 8;              // alphabet is 1..max_rate bits/symbol
  int n_vehicles = 30;           // used when the platoon size is not swept
  int payload_bytes = 32;        // used when the payload is not swept
  std::optional<double> power_cap;
  std::optional<double> command_interarrival;
  double nftrp_threshold = 0.5;
  std::int64_t commands_per_run = 1;
  int budget_cells = kDefaultBudgetCells;
};

struct SweepSpec {
  enum class Variable { kPlatoonSize, kPayloadBytes };

  Variable variable = Variable::kPlatoonSize;
  std::vector<int> values;  // platoon sizes or payload bytes, ordered
  SweepFixed fixed;
  std::vector<std::string> algorithms = {"lcd", "ltrp", "pctrp", "nftrp"};
  int replications = 50;
  std::uint64_t master_seed = 0;
};

struct SweepRow {
  std::string algorithm;
  std::string sweep_var;  // "platoon_size" or "payload_bytes"
  double sweep_value = 0.0;
  int replications = 0;
  double diss_rate_mean = 0.0;
  double diss_rate_ci95 = 0.0;
  double latency_mean_s = 0.0;
  double latency_ci95_s = 0.0;
  double analytic_latency_s = 0.0;
  int infeasible_count = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (algorithm, sweep_value)
};

// The fixed sweep parameters assembled into a concrete instance.
AllocProblem sweep_problem(const SweepFixed& fixed, int n_vehicles,
                           int payload_bytes);

// Twice the expected head-to-tail latency of the all-lowest-rate plan, in
// seconds; keeps every queue loose when several commands are generated.
double auto_interarrival(const AllocProblem& problem);

// Allocator dispatch used by the sweeps and the command line.
RatePlan allocate_by_name(const std::string& algorithm,
                          const AllocProblem& problem, double nftrp_threshold,
                          int budget_cells);

// Platoon-size sweep: one row per (algorithm, size), replicated simulations
// with common random numbers across algorithms. Infeasible points come back
// as rows with NaN metrics and infeasible_count = replications.
SweepResult sweep_platoon_size(const SweepSpec& spec);

// Payload-size sweep at fixed platoon size.
SweepResult sweep_packet_size(const SweepSpec& spec);

// CSV emission: exact header above, floating values at 9 significant digits.
// Byte-identical across reruns of the same spec and seed.
void emit_csv(const SweepResult& result, std::ostream& out);
std::string to_csv(const SweepResult& result);

// Strict inverse of emit_csv; throws std::runtime_error on malformed input.
SweepResult parse_csv(std::istream& in);

// 95% confidence half-width over per-replication values (normal
// approximation); 0 for fewer than two values.
double ci95_half_width(const std::vector<double>& values);

}  // namespace platoon
