// Command-line front end: binds key=value run configs and flag overrides to
// the allocators, the dissemination simulator, the queue analytics and the
// sweep harness. All output is line oriented.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platoon/allocation.hpp"
#include "platoon/config.hpp"
#include "platoon/experiments.hpp"
#include "platoon/queueing.hpp"
#include "platoon/sim.hpp"
#include "platoon/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // bad flags, config or input
constexpr int kExitInfeasible = 2;  // no plan fits / queue saturated

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Output sink: --out redirects everything a subcommand prints.
struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;

  void open(const std::string& path) {
    file.open(path);
    if (!file) {
      throw platoon::ConfigError("cannot open output file: " + path);
    }
    out = &file;
  }
  std::ostream& stream() { return *out; }
};

void print_plan(std::ostream& out, const platoon::RunConfig& config,
                const platoon::AllocProblem& problem,
                const platoon::RatePlan& plan,
                const platoon::DpStats* stats) {
  out << "algorithm = " << config.algorithm << '\n';
  out << "n_vehicles = " << problem.n_vehicles << '\n';
  out << "payload_bits = " << fmt(problem.payload_bits) << '\n';
  out << "power_cap = " << fmt(problem.power_cap) << '\n';
  for (int h = 0; h < problem.hops(); ++h) {
    const double eta = platoon::hop_success_probability(
        problem, h, plan.rates[h], plan.per_hop_power[h]);
    const std::string prefix = "hop." + std::to_string(h);
    out << prefix << ".rate = " << plan.rates[h].bits_per_symbol << '\n';
    out << prefix << ".power = " << fmt(plan.per_hop_power[h]) << '\n';
    out << prefix << ".eta = " << fmt(eta) << '\n';
    out << prefix << ".latency_symbols = "
        << fmt(eta > 0.0 ? platoon::expected_hop_latency(plan.rates[h], eta,
                                                         problem.payload_bits)
                         : std::numeric_limits<double>::infinity())
        << '\n';
  }
  out << "mean_power = " << fmt(platoon::mean_power(plan)) << '\n';
  out << "expected_latency_symbols = " << fmt(plan.expected_latency) << '\n';
  out << "expected_latency_seconds = "
      << fmt(plan.expected_latency / problem.radio.symbol_rate) << '\n';
  if (stats != nullptr) {
    out << "dp.relaxation_steps = " << stats->relaxation_steps << '\n';
    out << "dp.budget_cells = " << stats->budget_cells << '\n';
  }
}

int cmd_allocate(const platoon::RunConfig& config, Sink& sink) {
  const platoon::AllocProblem problem = platoon::problem_from(config);
  platoon::DpStats stats;
  platoon::RatePlan plan;
  bool have_stats = false;
  if (config.algorithm == "lcd") {
    if (config.budget_cells < 1) {
      throw platoon::ConfigError("budget_cells must be positive");
    }
    plan = platoon::lcd_allocate(problem, config.budget_cells, &stats);
    have_stats = true;
  } else {
    plan = platoon::plan_from(config, problem);
  }
  print_plan(sink.stream(), config, problem, plan,
             have_stats ? &stats : nullptr);
  return kExitOk;
}

int cmd_simulate(const platoon::RunConfig& config, Sink& sink) {
  const platoon::AllocProblem problem = platoon::problem_from(config);
  const platoon::RatePlan plan = platoon::plan_from(config, problem);
  const platoon::SimConfig sim = platoon::sim_config_from(config, problem, plan);

  std::ofstream trace;
  std::ostream* trace_out = nullptr;
  if (!config.trace_file.empty()) {
    trace.open(config.trace_file);
    if (!trace) {
      throw platoon::ConfigError("cannot open trace file: " +
                                 config.trace_file);
    }
    trace_out = &trace;
  }

  const platoon::DisseminationMetrics metrics =
      platoon::run_dissemination(sim, trace_out);
  std::ostream& out = sink.stream();
  out << "algorithm = " << config.algorithm << '\n';
  out << "seed = " << sim.seed << '\n';
  out << "command_interarrival_s = " << fmt(sim.command_interarrival) << '\n';
  out << "commands_generated = " << metrics.commands_generated << '\n';
  out << "commands_delivered_to_tail = " << metrics.commands_delivered_to_tail
      << '\n';
  out << "commands_dropped = " << metrics.commands_dropped << '\n';
  out << "commands_in_flight = " << metrics.commands_in_flight << '\n';
  out << "dissemination_rate = " << fmt(metrics.dissemination_rate) << '\n';
  out << "latency_mean_s = " << fmt(metrics.latency_mean) << '\n';
  out << "latency_p95_s = " << fmt(metrics.latency_p95) << '\n';
  out << "elapsed_sim_time_s = " << fmt(metrics.elapsed_sim_time) << '\n';
  out << "per_hop_attempt_mean = ";
  for (std::size_t h = 0; h < metrics.per_hop_attempt_mean.size(); ++h) {
    if (h > 0) out << ',';
    out << fmt(metrics.per_hop_attempt_mean[h]);
  }
  out << '\n';
  return kExitOk;
}

int cmd_sweep(const platoon::RunConfig& config, Sink& sink,
              platoon::SweepSpec::Variable variable) {
  if (!config.is_set("seed")) {
    std::cerr << "warning: seed not set; sweeping with seed 0\n";
  }
  const platoon::SweepSpec spec = platoon::sweep_spec_from(config, variable);
  const platoon::SweepResult result =
      variable == platoon::SweepSpec::Variable::kPlatoonSize
          ? platoon::sweep_platoon_size(spec)
          : platoon::sweep_packet_size(spec);
  platoon::emit_csv(result, sink.stream());
  return kExitOk;
}

int cmd_queue_analyze(const platoon::RunConfig& config, Sink& sink) {
  const platoon::QueueParams params = platoon::queue_params_from(config);
  if (!(config.truncation_tail > 0.0) || config.truncation_tail >= 1.0) {
    throw platoon::ConfigError("truncation_tail must lie in (0, 1)");
  }
  const platoon::SteadyState state =
      platoon::steady_state(params, config.truncation_tail);
  std::ostream& out = sink.stream();
  out << "arrival_rate = " << fmt(params.arrival_rate) << '\n';
  out << "service_rate = " << fmt(params.service_rate) << '\n';
  out << "utilization = " << fmt(state.utilization) << '\n';
  out << "truncation_states = " << state.pi.size() << '\n';
  out << "tail_mass = " << fmt(state.tail_mass) << '\n';
  out << "pi_zero = " << fmt(state.pi.empty() ? 0.0 : state.pi[0]) << '\n';
  out << "expected_commands = " << fmt(state.expected_commands) << '\n';
  out << "variance_commands = " << fmt(state.variance_commands) << '\n';
  out << "expected_latency_s = " << fmt(state.expected_latency) << '\n';
  // The alternate empty-queue closed form, reported next to the standard
  // 1 - phi so the gap is visible rather than hidden.
  double alternate = std::numeric_limits<double>::quiet_NaN();
  try {
    alternate = platoon::pi_zero_paper(state.utilization, config.n_vehicles);
  } catch (const std::domain_error&) {
  }
  out << "pi_zero_alternate_form = " << fmt(alternate) << '\n';
  out << "pi_zero_alternate_gap = "
      << fmt(alternate - (state.pi.empty() ? 0.0 : state.pi[0])) << '\n';
  return kExitOk;
}

int cmd_validate(const platoon::RunConfig& config, Sink& sink) {
  const std::vector<platoon::CheckResult> results =
      platoon::run_validation_suite(config.seed);
  std::ostream& out = sink.stream();
  bool all_pass = true;
  for (const platoon::CheckResult& check : results) {
    const char* status =
        check.informational ? "INFO" : (check.pass ? "PASS" : "FAIL");
    if (!check.informational && !check.pass) all_pass = false;
    out << status << ' ' << check.name << " measured=" << fmt(check.measured)
        << " bound=" << fmt(check.bound);
    if (!check.note.empty()) out << " note=\"" << check.note << '"';
    out << '\n';
  }
  out << (all_pass ? "RESULT PASS" : "RESULT FAIL") << '\n';
  return all_pass ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate allocation and command dissemination toolkit for "
               "vehicle platoons"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::uint64_t seed_flag = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value config file");
  auto* seed_opt =
      app.add_option("--seed", seed_flag, "master seed (overrides the file)");
  app.add_option("--out", out_path, "write output to this file");
  app.add_option("--set", overrides, "override one key=value; repeatable");

  CLI::App* allocate = app.add_subcommand(
      "allocate", "compute a rate plan and print it per hop");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run one dissemination simulation under the chosen plan");
  CLI::App* sweep_platoon = app.add_subcommand(
      "sweep-platoon", "replicate simulations across platoon sizes (CSV)");
  CLI::App* sweep_packet = app.add_subcommand(
      "sweep-packet", "replicate simulations across payload sizes (CSV)");
  CLI::App* queue_analyze = app.add_subcommand(
      "queue-analyze", "steady-state head-of-platoon queue analytics");
  CLI::App* validate = app.add_subcommand(
      "validate", "run the self-check suite and report each invariant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    platoon::RunConfig config;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) {
        throw platoon::ConfigError("cannot read config file: " + config_path);
      }
      platoon::apply_config_file(config, file, config_path);
    }
    for (const std::string& assignment : overrides) {
      platoon::apply_override(config, assignment);
    }
    if (seed_opt->count() > 0) {
      platoon::apply_assignment(config, "seed", std::to_string(seed_flag),
                                "--seed");
    }

    Sink sink;
    if (!out_path.empty()) sink.open(out_path);

    if (allocate->parsed()) return cmd_allocate(config, sink);
    if (simulate->parsed()) return cmd_simulate(config, sink);
    if (sweep_platoon->parsed()) {
      return cmd_sweep(config, sink,
                       platoon::SweepSpec::Variable::kPlatoonSize);
    }
    if (sweep_packet->parsed()) {
      return cmd_sweep(config, sink,
                       platoon::SweepSpec::Variable::kPayloadBytes);
    }
    if (queue_analyze->parsed()) return cmd_queue_analyze(config, sink);
    if (validate->parsed()) return cmd_validate(config, sink);
    std::cerr << "error: no subcommand selected\n";
    return kExitUsage;
  } catch (const platoon::InfeasibleError& err) {
    std::cerr << "error: infeasible: " << err.what() << '\n';
    return kExitInfeasible;
  } catch (const platoon::UnstableQueueError& err) {
    std::cerr << "error: unstable queue: " << err.what() << '\n';
    return kExitInfeasible;
  } catch (const platoon::ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
}
