#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "platoon/allocation.hpp"
#include "platoon/queueing.hpp"
#include "platoon/radio.hpp"

namespace platoon {

// One dissemination run: commands enter at the head and hop down the chain
// under the plan's rates and powers. Stop-and-wait per hop with instantaneous
// error-free acknowledgements; each attempt sees a fresh gain draw.
struct SimConfig {
  AllocProblem problem;
  RatePlan plan;
  double command_interarrival = 1.0;  // seconds, mean spacing at the head
  std::int64_t command_count = 1;     // > 0: generate this many, then drain
  double horizon_seconds = 0.0;       // > 0 instead: generate and process
                                      // only up to this simulated time
  std::uint64_t seed = 0;
  std::int64_t max_attempts = 0;      // per hop and command; 0 = unbounded
  bool periodic_arrivals = false;     // false = Poisson arrivals

  void validate() const;
};

// Per-vehicle snapshot, exposed for tests that poke at the pipeline.
struct VehicleState {
  std::vector<std::int64_t> queue;  // command ids waiting, front is in service
  bool transmitting = false;
};

struct DisseminationMetrics {
  std::int64_t commands_generated = 0;
  std::int64_t commands_delivered_to_tail = 0;
  std::int64_t commands_dropped = 0;    // gave up after max_attempts
  std::int64_t commands_in_flight = 0;  // still queued when the run stopped
  // Delivered commands per second of dissemination span (first generation to
  // last tail reception). 0 when nothing was delivered.
  double dissemination_rate = 0.0;
  double latency_mean = 0.0;  // seconds, generation to tail reception
  double latency_p95 = 0.0;   // nearest-rank 95th percentile
  std::vector<double> per_hop_attempt_mean;  // attempts per crossing
  double elapsed_sim_time = 0.0;  // seconds, time of the last processed event
};

// Runs the dissemination chain. Deterministic for a fixed config and seed.
// When `trace` is given, one CSV record per state transition is written:
// time,vehicle,command,event,attempt with events generated / success / fail /
// delivered / dropped. When `final_states` is given it receives the queues
// of the transmitting vehicles as they stood when the run stopped.
DisseminationMetrics run_dissemination(
    const SimConfig& config, std::ostream* trace = nullptr,
    std::vector<VehicleState>* final_states = nullptr);

// Sample statistics of a single M/M/1 queue, for cross-checking the analytic
// model. Time averages are taken over [0, last departure].
struct QueueSimStats {
  std::int64_t served = 0;
  double elapsed = 0.0;
  double sojourn_mean = 0.0;
  double sojourn_var = 0.0;
  double queue_len_mean = 0.0;  // time-averaged number in system
  double queue_len_var = 0.0;
};

// FIFO M/M/1 run over exactly `served_target` commands. Throws
// UnstableQueueError when the parameters are saturated.
QueueSimStats run_queue_sim(const QueueParams& params,
                            std::int64_t served_target, std::uint64_t seed);

}  // namespace platoon
