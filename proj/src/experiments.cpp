#include "platoon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "platoon/queueing.hpp"
#include "platoon/sim.hpp"

namespace platoon {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Mean sojourn through the chain when every stage is read as one queueing
// station: hops / (bottleneck service rate - arrival rate). NaN when the
// arrival rate saturates the bottleneck.
double analytic_chain_latency(const AllocProblem& problem,
                              const RatePlan& plan, double interarrival) {
  double bottleneck = std::numeric_limits<double>::infinity();
  for (int h = 0; h < problem.hops(); ++h) {
    const double eta =
        hop_success_probability(problem, h, plan.rates[h],
                                plan.per_hop_power[h]);
    if (eta <= 0.0) return kNan;
    const double stage_rate = plan.rates[h].bits_per_symbol * eta *
                              problem.radio.symbol_rate /
                              problem.payload_bits;
    bottleneck = std::min(bottleneck, stage_rate);
  }
  const double arrival_rate = 1.0 / interarrival;
  if (arrival_rate >= bottleneck) return kNan;
  return problem.hops() / (bottleneck - arrival_rate);
}

SweepResult run_sweep(const SweepSpec& spec, SweepSpec::Variable variable) {
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep needs at least one value");
  }
  if (spec.replications < 1) {
    throw std::invalid_argument("sweep needs at least one replication");
  }
  if (spec.algorithms.empty()) {
    throw std::invalid_argument("sweep needs at least one algorithm");
  }
  const bool platoon = variable == SweepSpec::Variable::kPlatoonSize;
  const char* var_name = platoon ? "platoon_size" : "payload_bytes";

  SweepResult result;
  for (int value : spec.values) {
    const int n = platoon ? value : spec.fixed.n_vehicles;
    const int bytes = platoon ? spec.fixed.payload_bytes : value;
    const AllocProblem problem = sweep_problem(spec.fixed, n, bytes);
    const double interarrival = spec.fixed.command_interarrival
                                    ? *spec.fixed.command_interarrival
                                    : auto_interarrival(problem);
    for (const std::string& algorithm : spec.algorithms) {
      SweepRow row;
      row.algorithm = algorithm;
      row.sweep_var = var_name;
      row.sweep_value = value;
      row.replications = spec.replications;

      RatePlan plan;
      bool feasible = true;
      try {
        plan = allocate_by_name(algorithm, problem,
                                spec.fixed.nftrp_threshold,
                                spec.fixed.budget_cells);
      } catch (const InfeasibleError&) {
        feasible = false;
      }
      if (!feasible) {
        row.infeasible_count = spec.replications;
        row.diss_rate_mean = kNan;
        row.diss_rate_ci95 = kNan;
        row.latency_mean_s = kNan;
        row.latency_ci95_s = kNan;
        row.analytic_latency_s = kNan;
        result.rows.push_back(row);
        continue;
      }

      std::vector<double> rates(spec.replications);
      std::vector<double> latencies(spec.replications);
      for (int rep = 0; rep < spec.replications; ++rep) {
        SimConfig config{problem, plan};
        config.command_interarrival = interarrival;
        config.command_count = spec.fixed.commands_per_run;
        // Streams depend on the point and replication but not on the
        // algorithm, so algorithms are compared on common random numbers.
        config.seed = derive_seed(spec.master_seed,
                                  static_cast<std::uint64_t>(value),
                                  static_cast<std::uint64_t>(rep));
        const DisseminationMetrics metrics = run_dissemination(config);
        rates[rep] = metrics.dissemination_rate;
        latencies[rep] = metrics.latency_mean;
      }
      row.diss_rate_mean = mean_of(rates);
      row.diss_rate_ci95 = ci95_half_width(rates);
      row.latency_mean_s = mean_of(latencies);
      row.latency_ci95_s = ci95_half_width(latencies);
      row.analytic_latency_s =
          analytic_chain_latency(problem, plan, interarrival);
      result.rows.push_back(row);
    }
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
              return a.sweep_value < b.sweep_value;
            });
  return result;
}

}  // namespace

AllocProblem sweep_problem(const SweepFixed& fixed, int n_vehicles,
                           int payload_bytes) {
  if (fixed.max_rate < 1 || fixed.max_rate > kMaxRateBits) {
    throw std::invalid_argument("max_rate out of range");
  }
  AllocProblem problem{.n_vehicles = n_vehicles,
                       .payload_bits = 8.0 * payload_bytes,
                       .power_cap = 1.0,
                       .rate_alphabet = {},
                       .per_hop_mean_gain = {},
                       .radio = fixed.radio};
  for (int r = 1; r <= fixed.max_rate; ++r) {
    problem.rate_alphabet.push_back(RateLevel(r));
  }
  problem.per_hop_mean_gain.assign(problem.hops(), fixed.radio.mean_gain);
  problem.power_cap =
      fixed.power_cap
          ? *fixed.power_cap
          : required_power(RateLevel(std::min(4, fixed.max_rate)),
                           fixed.radio.ber_target, fixed.radio.mean_gain,
                           fixed.radio);
  problem.validate();
  return problem;
}

double auto_interarrival(const AllocProblem& problem) {
  const std::vector<RateLevel> lowest(problem.hops(),
                                      problem.rate_alphabet.front());
  const RatePlan floor_plan = make_plan(problem, lowest);
  return 2.0 * floor_plan.expected_latency / problem.radio.symbol_rate;
}

RatePlan allocate_by_name(const std::string& algorithm,
                          const AllocProblem& problem, double nftrp_threshold,
                          int budget_cells) {
  if (algorithm == "lcd") return lcd_allocate(problem, budget_cells);
  if (algorithm == "ltrp") return ltrp_allocate(problem);
  if (algorithm == "pctrp") return pctrp_allocate(problem);
  if (algorithm == "nftrp") return nftrp_allocate(problem, nftrp_threshold);
  throw std::invalid_argument("unknown algorithm: " + algorithm);
}

SweepResult sweep_platoon_size(const SweepSpec& spec) {
  return run_sweep(spec, SweepSpec::Variable::kPlatoonSize);
}

SweepResult sweep_packet_size(const SweepSpec& spec) {
  return run_sweep(spec, SweepSpec::Variable::kPayloadBytes);
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& row : result.rows) {
    out << row.algorithm << ',' << row.sweep_var << ','
        << format_value(row.sweep_value) << ',' << row.replications << ','
        << format_value(row.diss_rate_mean) << ','
        << format_value(row.diss_rate_ci95) << ','
        << format_value(row.latency_mean_s) << ','
        << format_value(row.latency_ci95_s) << ','
        << format_value(row.analytic_latency_s) << ','
        << row.infeasible_count << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  emit_csv(result, out);
  return out.str();
}

SweepResult parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw std::runtime_error("unrecognized sweep CSV header");
  }
  SweepResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 10) {
      throw std::runtime_error("sweep CSV row must have 10 fields");
    }
    auto to_double = [](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') {
        throw std::runtime_error("malformed number in sweep CSV: " + s);
      }
      return v;
    };
    SweepRow row;
    row.algorithm = fields[0];
    row.sweep_var = fields[1];
    row.sweep_value = to_double(fields[2]);
    row.replications = static_cast<int>(to_double(fields[3]));
    row.diss_rate_mean = to_double(fields[4]);
    row.diss_rate_ci95 = to_double(fields[5]);
    row.latency_mean_s = to_double(fields[6]);
    row.latency_ci95_s = to_double(fields[7]);
    row.analytic_latency_s = to_double(fields[8]);
    row.infeasible_count = static_cast<int>(to_double(fields[9]));
    result.rows.push_back(row);
  }
  return result;
}

double ci95_half_width(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = mean_of(values);
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(n - 1));
  return kZ95 * sd / std::sqrt(static_cast<double>(n));
}

}  // namespace platoon
