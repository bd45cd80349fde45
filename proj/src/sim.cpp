#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

namespace platoon {

namespace {

double sample_exponential(double mean, RandomStream& rng) {
  return -mean * std::log(1.0 - uniform01(rng));
}

enum class EventKind { kArrival, kAttemptDone };

struct Event {
  double time;
  std::uint64_t seq;  // insertion order, breaks simultaneous events
  EventKind kind;
  int hop;
  std::int64_t cmd;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct HopState {
  std::deque<std::int64_t> queue;
  bool transmitting = false;
  std::int64_t active_attempts = 0;  // attempts spent on the head command
  std::int64_t attempts = 0;         // lifetime totals
  std::int64_t crossings = 0;
};

void write_trace(std::ostream* trace, double time, int vehicle,
                 std::int64_t cmd, const char* event, std::int64_t attempt) {
  if (trace == nullptr) return;
  char line[160];
  std::snprintf(line, sizeof(line), "%.9g,%d,%lld,%s,%lld\n", time, vehicle,
                static_cast<long long>(cmd), event,
                static_cast<long long>(attempt));
  *trace << line;
}

double nearest_rank_p95(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  return values[rank == 0 ? 0 : rank - 1];
}

}  // namespace

void SimConfig::validate() const {
  problem.validate();
  if (static_cast<int>(plan.rates.size()) != problem.hops() ||
      plan.per_hop_power.size() != plan.rates.size()) {
    throw std::invalid_argument("plan shape does not match the problem");
  }
  if (!(command_interarrival > 0.0)) {
    throw std::invalid_argument("command interarrival must be positive");
  }
  if (horizon_seconds < 0.0 || command_count < 0) {
    throw std::invalid_argument("horizon and command count must not be negative");
  }
  if (horizon_seconds == 0.0 && command_count == 0) {
    throw std::invalid_argument(
        "either a command count or a time horizon is required");
  }
  if (max_attempts < 0) {
    throw std::invalid_argument("max_attempts must not be negative");
  }
  if (max_attempts == 0) {
    for (double p : plan.per_hop_power) {
      if (p == 0.0) {
        throw std::invalid_argument(
            "a zero-power hop never succeeds; bound max_attempts");
      }
    }
  }
}

DisseminationMetrics run_dissemination(const SimConfig& config,
                                       std::ostream* trace,
                                       std::vector<VehicleState>* final_states) {
  config.validate();
  const int hops = config.problem.hops();
  const bool horizon_mode = config.horizon_seconds > 0.0;
  const double sigma = config.problem.radio.noise_power;

  std::vector<double> airtime(hops);
  for (int h = 0; h < hops; ++h) {
    airtime[h] = (config.problem.payload_bits /
                  config.plan.rates[h].bits_per_symbol) /
                 config.problem.radio.symbol_rate;
  }

  if (trace != nullptr) *trace << "time,vehicle,command,event,attempt\n";

  RandomStream rng(config.seed);
  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  std::uint64_t seq = 0;
  auto schedule = [&](double time, EventKind kind, int hop, std::int64_t cmd) {
    events.push(Event{time, seq++, kind, hop, cmd});
  };

  auto next_spacing = [&]() {
    return config.periodic_arrivals
               ? config.command_interarrival
               : sample_exponential(config.command_interarrival, rng);
  };

  std::vector<HopState> hop_state(hops);
  std::vector<double> gen_time;
  std::vector<double> latencies;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  double last_delivery = 0.0;
  double elapsed = 0.0;

  auto start_service = [&](int h, double now) {
    hop_state[h].transmitting = true;
    hop_state[h].active_attempts = 0;
    schedule(now + airtime[h], EventKind::kAttemptDone, h,
             hop_state[h].queue.front());
  };

  auto enqueue = [&](int h, std::int64_t cmd, double now) {
    hop_state[h].queue.push_back(cmd);
    if (!hop_state[h].transmitting) start_service(h, now);
  };

  // The head command of hop h is finished with (delivered, forwarded or
  // dropped); pull the next one in.
  auto advance_queue = [&](int h, double now) {
    hop_state[h].queue.pop_front();
    hop_state[h].transmitting = false;
    if (!hop_state[h].queue.empty()) start_service(h, now);
  };

  schedule(next_spacing(), EventKind::kArrival, -1, 0);

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    if (horizon_mode && ev.time > config.horizon_seconds) {
      elapsed = config.horizon_seconds;
      break;
    }
    elapsed = ev.time;

    if (ev.kind == EventKind::kArrival) {
      const std::int64_t id = generated++;
      gen_time.push_back(ev.time);
      write_trace(trace, ev.time, 0, id, "generated", 0);
      enqueue(0, id, ev.time);
      const bool more = horizon_mode || generated < config.command_count;
      if (more) schedule(ev.time + next_spacing(), EventKind::kArrival, -1, 0);
      continue;
    }

    const int h = ev.hop;
    HopState& hs = hop_state[h];
    hs.attempts++;
    hs.active_attempts++;
    const bool ok =
        attempt_succeeds(config.plan.rates[h], config.plan.per_hop_power[h],
                         config.problem.per_hop_mean_gain[h], sigma, rng);
    if (ok) {
      hs.crossings++;
      write_trace(trace, ev.time, h, ev.cmd, "success", hs.active_attempts);
      if (h == hops - 1) {
        ++delivered;
        last_delivery = ev.time;
        latencies.push_back(ev.time - gen_time[ev.cmd]);
        write_trace(trace, ev.time, hops, ev.cmd, "delivered",
                    hs.active_attempts);
      } else {
        enqueue(h + 1, ev.cmd, ev.time);
      }
      advance_queue(h, ev.time);
    } else {
      write_trace(trace, ev.time, h, ev.cmd, "fail", hs.active_attempts);
      if (config.max_attempts > 0 && hs.active_attempts >= config.max_attempts) {
        ++dropped;
        write_trace(trace, ev.time, h, ev.cmd, "dropped", hs.active_attempts);
        advance_queue(h, ev.time);
      } else {
        schedule(ev.time + airtime[h], EventKind::kAttemptDone, h, ev.cmd);
      }
    }
  }

  if (final_states != nullptr) {
    final_states->clear();
    final_states->reserve(hops);
    for (const HopState& hs : hop_state) {
      VehicleState vs;
      vs.queue.assign(hs.queue.begin(), hs.queue.end());
      vs.transmitting = hs.transmitting;
      final_states->push_back(std::move(vs));
    }
  }

  DisseminationMetrics metrics;
  metrics.commands_generated = generated;
  metrics.commands_delivered_to_tail = delivered;
  metrics.commands_dropped = dropped;
  metrics.commands_in_flight = generated - delivered - dropped;
  metrics.elapsed_sim_time = elapsed;
  if (delivered > 0) {
    metrics.dissemination_rate =
        static_cast<double>(delivered) / (last_delivery - gen_time.front());
    double sum = 0.0;
    for (double v : latencies) sum += v;
    metrics.latency_mean = sum / static_cast<double>(latencies.size());
    metrics.latency_p95 = nearest_rank_p95(latencies);
  }
  metrics.per_hop_attempt_mean.resize(hops, 0.0);
  for (int h = 0; h < hops; ++h) {
    if (hop_state[h].crossings > 0) {
      metrics.per_hop_attempt_mean[h] =
          static_cast<double>(hop_state[h].attempts) /
          static_cast<double>(hop_state[h].crossings);
    }
  }
  return metrics;
}

QueueSimStats run_queue_sim(const QueueParams& params,
                            std::int64_t served_target, std::uint64_t seed) {
  if (!params.stable()) {
    throw UnstableQueueError("queue simulation requires a stable queue");
  }
  if (served_target < 1) {
    throw std::invalid_argument("served_target must be at least 1");
  }
  RandomStream rng(seed);
  const double mean_ia = 1.0 / params.arrival_rate;
  const double mean_service = 1.0 / params.service_rate;

  std::vector<double> arrivals(served_target);
  std::vector<double> departures(served_target);
  double clock = 0.0;
  double last_departure = 0.0;
  double sojourn_sum = 0.0;
  double sojourn_sq_sum = 0.0;
  for (std::int64_t k = 0; k < served_target; ++k) {
    clock += sample_exponential(mean_ia, rng);
    const double begin = std::max(clock, last_departure);
    last_departure = begin + sample_exponential(mean_service, rng);
    arrivals[k] = clock;
    departures[k] = last_departure;
    const double sojourn = last_departure - clock;
    sojourn_sum += sojourn;
    sojourn_sq_sum += sojourn * sojourn;
  }

  QueueSimStats stats;
  stats.served = served_target;
  stats.elapsed = last_departure;
  stats.sojourn_mean = sojourn_sum / static_cast<double>(served_target);
  if (served_target > 1) {
    stats.sojourn_var =
        (sojourn_sq_sum -
         sojourn_sum * sojourn_sum / static_cast<double>(served_target)) /
        static_cast<double>(served_target - 1);
  }

  // Time-average the number in system over the merged event sequence;
  // departures are already sorted because the discipline is FIFO.
  double t_prev = 0.0;
  double area = 0.0;
  double area_sq = 0.0;
  std::int64_t in_system = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (j < departures.size()) {
    double t_next;
    int delta;
    if (i < arrivals.size() && arrivals[i] < departures[j]) {
      t_next = arrivals[i++];
      delta = 1;
    } else {
      t_next = departures[j++];
      delta = -1;
    }
    const double n = static_cast<double>(in_system);
    area += n * (t_next - t_prev);
    area_sq += n * n * (t_next - t_prev);
    in_system += delta;
    t_prev = t_next;
  }
  if (last_departure > 0.0) {
    stats.queue_len_mean = area / last_departure;
    stats.queue_len_var =
        area_sq / last_departure - stats.queue_len_mean * stats.queue_len_mean;
  }
  return stats;
}

}  // namespace platoon
