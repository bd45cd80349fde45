#include "platoon/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>

namespace platoon {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(const std::string& where, const std::string& key,
                            const std::string& value, const std::string& hint) {
  throw ConfigError(where + ": bad value '" + value + "' for " + key + " (" +
                    hint + ")");
}

double parse_double(const std::string& where, const std::string& key,
                    const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() ||
      !std::isfinite(v)) {
    bad_value(where, key, value, "expected a finite number");
  }
  return v;
}

long long parse_integer(const std::string& where, const std::string& key,
                        const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    bad_value(where, key, value, "expected an integer");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& where, const std::string& key,
                         const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || value[0] == '-' ||
      end != value.c_str() + value.size()) {
    bad_value(where, key, value, "expected an unsigned integer");
  }
  return v;
}

const std::set<std::string>& known_algorithms() {
  static const std::set<std::string> names = {"lcd", "ltrp", "pctrp", "nftrp"};
  return names;
}

}  // namespace

void apply_assignment(RunConfig& config, const std::string& key,
                      const std::string& value, const std::string& where) {
  if (key == "n_vehicles") {
    config.n_vehicles = static_cast<int>(parse_integer(where, key, value));
  } else if (key == "payload_bits") {
    config.payload_bits = parse_double(where, key, value);
  } else if (key == "max_rate") {
    config.max_rate = static_cast<int>(parse_integer(where, key, value));
  } else if (key == "power_cap") {
    if (value == "auto") {
      config.power_cap.reset();
    } else {
      config.power_cap = parse_double(where, key, value);
    }
  } else if (key == "mean_gain") {
    config.mean_gain = parse_double(where, key, value);
  } else if (key == "mean_gains") {
    config.mean_gains.clear();
    if (!value.empty()) {
      for (const std::string& part : split_list(value)) {
        config.mean_gains.push_back(parse_double(where, key, part));
      }
    }
  } else if (key == "kappa1") {
    config.kappa1 = parse_double(where, key, value);
  } else if (key == "kappa2") {
    config.kappa2 = parse_double(where, key, value);
  } else if (key == "noise_power") {
    config.noise_power = parse_double(where, key, value);
  } else if (key == "ber_target") {
    config.ber_target = parse_double(where, key, value);
  } else if (key == "symbol_rate") {
    config.symbol_rate = parse_double(where, key, value);
  } else if (key == "algorithm") {
    if (known_algorithms().count(value) == 0) {
      bad_value(where, key, value, "expected lcd, ltrp, pctrp or nftrp");
    }
    config.algorithm = value;
  } else if (key == "nftrp_threshold") {
    config.nftrp_threshold = parse_double(where, key, value);
  } else if (key == "budget_cells") {
    config.budget_cells = static_cast<int>(parse_integer(where, key, value));
  } else if (key == "command_count") {
    config.command_count = parse_integer(where, key, value);
  } else if (key == "command_interarrival") {
    if (value == "auto") {
      config.command_interarrival.reset();
    } else {
      config.command_interarrival = parse_double(where, key, value);
    }
  } else if (key == "horizon_seconds") {
    config.horizon_seconds = parse_double(where, key, value);
  } else if (key == "max_attempts") {
    config.max_attempts = parse_integer(where, key, value);
  } else if (key == "arrival_process") {
    if (value != "poisson" && value != "periodic") {
      bad_value(where, key, value, "expected poisson or periodic");
    }
    config.arrival_process = value;
  } else if (key == "seed") {
    config.seed = parse_seed(where, key, value);
  } else if (key == "trace_file") {
    config.trace_file = value;
  } else if (key == "replications") {
    config.replications = static_cast<int>(parse_integer(where, key, value));
  } else if (key == "sweep_values") {
    config.sweep_values.clear();
    if (!value.empty()) {
      for (const std::string& part : split_list(value)) {
        config.sweep_values.push_back(
            static_cast<int>(parse_integer(where, key, part)));
      }
    }
  } else if (key == "algorithms") {
    std::vector<std::string> names;
    if (!value.empty()) {
      for (const std::string& part : split_list(value)) {
        if (known_algorithms().count(part) == 0) {
          bad_value(where, key, part, "expected lcd, ltrp, pctrp or nftrp");
        }
        names.push_back(part);
      }
    }
    config.algorithms = std::move(names);
  } else if (key == "arrival_rate") {
    config.arrival_rate = parse_double(where, key, value);
  } else if (key == "service_rate") {
    config.service_rate = parse_double(where, key, value);
  } else if (key == "truncation_tail") {
    config.truncation_tail = parse_double(where, key, value);
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
  config.keys_set.insert(key);
}

void apply_config_file(RunConfig& config, std::istream& in,
                       const std::string& source_name) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + body +
                        "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(where + ": missing key before '='");
    }
    apply_assignment(config, key, value, where);
  }
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  apply_assignment(config, key, value, "--set " + key);
}

AllocProblem problem_from(const RunConfig& config) {
  if (config.n_vehicles < 2) {
    throw ConfigError("n_vehicles must be at least 2");
  }
  if (config.max_rate < 1 || config.max_rate > kMaxRateBits) {
    throw ConfigError("max_rate must be between 1 and " +
                      std::to_string(kMaxRateBits));
  }
  try {
    AllocProblem problem{
        .n_vehicles = config.n_vehicles,
        .payload_bits = config.payload_bits,
        .power_cap = 1.0,
        .rate_alphabet = {},
        .per_hop_mean_gain = {},
        .radio = RadioConstants(config.kappa1, config.kappa2,
                                config.noise_power, config.mean_gain,
                                config.ber_target, config.symbol_rate)};
    for (int r = 1; r <= config.max_rate; ++r) {
      problem.rate_alphabet.push_back(RateLevel(r));
    }
    if (config.mean_gains.empty()) {
      problem.per_hop_mean_gain.assign(problem.hops(), config.mean_gain);
    } else {
      if (static_cast<int>(config.mean_gains.size()) != problem.hops()) {
        throw ConfigError("mean_gains needs one entry per hop (" +
                          std::to_string(problem.hops()) + "), got " +
                          std::to_string(config.mean_gains.size()));
      }
      problem.per_hop_mean_gain = config.mean_gains;
    }
    problem.power_cap =
        config.power_cap
            ? *config.power_cap
            : required_power(RateLevel(std::min(4, config.max_rate)),
                             config.ber_target, config.mean_gain,
                             problem.radio);
    problem.validate();
    return problem;
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
}

RatePlan plan_from(const RunConfig& config, const AllocProblem& problem) {
  if (config.budget_cells < 1) {
    throw ConfigError("budget_cells must be positive");
  }
  if (config.nftrp_threshold < 0.0 || config.nftrp_threshold > 1.0) {
    throw ConfigError("nftrp_threshold must lie in [0, 1]");
  }
  return allocate_by_name(config.algorithm, problem, config.nftrp_threshold,
                          config.budget_cells);
}

SimConfig sim_config_from(const RunConfig& config, const AllocProblem& problem,
                          const RatePlan& plan) {
  SimConfig sim{problem, plan};
  sim.command_interarrival = config.command_interarrival
                                 ? *config.command_interarrival
                                 : auto_interarrival(problem);
  if (config.horizon_seconds > 0.0) {
    sim.horizon_seconds = config.horizon_seconds;
    sim.command_count = 0;
  } else {
    sim.command_count = config.command_count;
  }
  sim.max_attempts = config.max_attempts;
  sim.periodic_arrivals = config.arrival_process == "periodic";
  sim.seed = config.seed;
  try {
    sim.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return sim;
}

SweepSpec sweep_spec_from(const RunConfig& config,
                          SweepSpec::Variable variable) {
  const bool platoon = variable == SweepSpec::Variable::kPlatoonSize;
  SweepSpec spec;
  spec.variable = variable;
  if (!config.sweep_values.empty()) {
    spec.values = config.sweep_values;
  } else if (platoon) {
    for (int n = 5; n <= 50; n += 5) spec.values.push_back(n);
  } else {
    for (int bytes = 5; bytes <= 65; bytes += 10) spec.values.push_back(bytes);
  }
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const int lower_bound = platoon ? 2 : 1;
    if (spec.values[i] < lower_bound) {
      throw ConfigError("sweep_values entries must be at least " +
                        std::to_string(lower_bound));
    }
    if (i > 0 && spec.values[i] <= spec.values[i - 1]) {
      throw ConfigError("sweep_values must be strictly increasing");
    }
  }
  if (config.replications < 1) {
    throw ConfigError("replications must be at least 1");
  }
  if (config.algorithms.empty()) {
    throw ConfigError("algorithms must name at least one allocator");
  }
  if (config.command_count < 1) {
    throw ConfigError("command_count must be at least 1 for sweeps");
  }
  const double bytes = config.payload_bits / 8.0;
  if (bytes != std::floor(bytes) || bytes < 1.0) {
    throw ConfigError("payload_bits must be a whole positive byte count "
                      "when sweeping");
  }

  SweepFixed fixed;
  try {
    fixed.radio =
        RadioConstants(config.kappa1, config.kappa2, config.noise_power,
                       config.mean_gain, config.ber_target,
                       config.symbol_rate);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (config.max_rate < 1 || config.max_rate > kMaxRateBits) {
    throw ConfigError("max_rate must be between 1 and " +
                      std::to_string(kMaxRateBits));
  }
  fixed.max_rate = config.max_rate;
  // Payload sweeps default to a 30-vehicle platoon unless one was asked for.
  fixed.n_vehicles = (platoon || config.is_set("n_vehicles"))
                         ? config.n_vehicles
                         : 30;
  if (fixed.n_vehicles < 2) {
    throw ConfigError("n_vehicles must be at least 2");
  }
  fixed.payload_bytes = static_cast<int>(bytes);
  fixed.power_cap = config.power_cap;
  fixed.command_interarrival = config.command_interarrival;
  fixed.nftrp_threshold = config.nftrp_threshold;
  fixed.commands_per_run = config.command_count;
  if (config.budget_cells < 1) {
    throw ConfigError("budget_cells must be positive");
  }
  fixed.budget_cells = config.budget_cells;
  spec.fixed = fixed;
  spec.algorithms = config.algorithms;
  spec.replications = config.replications;
  spec.master_seed = config.seed;
  return spec;
}

QueueParams queue_params_from(const RunConfig& config) {
  try {
    return QueueParams(config.arrival_rate, config.service_rate);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
}

}  // namespace platoon
