// Acceptance gate: every release-blocking behaviour in one binary, one
// PASS/FAIL line each, nonzero exit when anything fails. Tolerances and
// wall-clock budgets are part of the checks.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/allocation.hpp"
#include "platoon/experiments.hpp"
#include "platoon/queueing.hpp"
#include "platoon/radio.hpp"
#include "platoon/sim.hpp"
#include "platoon/validation.hpp"

using namespace platoon;

namespace {

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<bool(std::string&)> body;
};

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof(buffer), pattern, args);
  va_end(args);
  return buffer;
}

// Least-squares R^2 of y against x.
double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = intercept + slope * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
  }
  return 1.0 - ss_res / ss_tot;
}

const SweepRow& find_row(const SweepResult& result, const std::string& algo,
                         double value) {
  for (const SweepRow& row : result.rows) {
    if (row.algorithm == algo && row.sweep_value == value) return row;
  }
  throw std::runtime_error("missing sweep row " + algo);
}

SweepSpec default_platoon_spec() {
  SweepSpec spec;
  spec.variable = SweepSpec::Variable::kPlatoonSize;
  for (int n = 5; n <= 50; n += 5) spec.values.push_back(n);
  spec.replications = 50;
  spec.master_seed = 0xACCE5505;
  return spec;
}

SweepSpec default_packet_spec() {
  SweepSpec spec;
  spec.variable = SweepSpec::Variable::kPayloadBytes;
  for (int bytes = 5; bytes <= 65; bytes += 10) spec.values.push_back(bytes);
  spec.fixed.n_vehicles = 30;
  spec.replications = 50;
  spec.master_seed = 0xACCE5506;
  return spec;
}

// The optimizer must reproduce exhaustive search exactly, bit for bit, on
// randomized instances spanning infeasible, binding and slack power caps.
bool dp_matches_enumeration(std::string& detail) {
  RandomStream rng(0xACCE5501);
  int compared = 0;
  int generated = 0;
  int mismatches = 0;
  while (compared < 200) {
    ++generated;
    const AllocProblem problem = random_problem(rng, 7, 4);
    RatePlan fast;
    RatePlan exact;
    bool fast_feasible = true;
    bool exact_feasible = true;
    try {
      fast = lcd_allocate(problem);
    } catch (const InfeasibleError&) {
      fast_feasible = false;
    }
    try {
      exact = brute_force_allocate(problem);
    } catch (const InfeasibleError&) {
      exact_feasible = false;
    }
    if (fast_feasible != exact_feasible) {
      ++mismatches;
      ++compared;
      continue;
    }
    if (!fast_feasible) continue;
    ++compared;
    if (fast.rates != exact.rates ||
        fast.per_hop_power != exact.per_hop_power ||
        fast.expected_latency != exact.expected_latency) {
      ++mismatches;
    }
  }
  detail = fmt("mismatches=%d over %d feasible instances (%d generated)",
               mismatches, compared, generated);
  return mismatches == 0;
}

// Per-attempt success frequency observed in the event simulator against the
// closed-form probability, every rate, >= 1e5 attempts per hop.
bool channel_sim_agreement(std::string& detail) {
  const RadioConstants radio(0.2, 3.0, 1.0, 1.0, 0.0005, 1e4);
  const std::int64_t commands = 65000;
  AllocProblem problem{.n_vehicles = 9,
                       .payload_bits = 256.0,
                       .power_cap = 1e9,
                       .rate_alphabet = {},
                       .per_hop_mean_gain = {},
                       .radio = radio};
  RatePlan plan;
  for (int r = 1; r <= 8; ++r) {
    const RateLevel level(r);
    problem.rate_alphabet.push_back(level);
    plan.rates.push_back(level);
    plan.per_hop_power.push_back(
        required_power(level, radio.ber_target, 1.0, radio));
  }
  problem.per_hop_mean_gain.assign(8, 1.0);

  SimConfig config{problem, plan};
  config.command_interarrival = 1e-3;
  config.command_count = commands;
  config.periodic_arrivals = true;
  config.seed = 0xACCE5502;
  const DisseminationMetrics metrics = run_dissemination(config);
  if (metrics.commands_delivered_to_tail != commands) {
    detail = "not every command reached the tail";
    return false;
  }
  double worst_gap = 0.0;
  double min_attempts = 1e18;
  for (int h = 0; h < 8; ++h) {
    const double mean_attempts = metrics.per_hop_attempt_mean[h];
    const double frequency = 1.0 / mean_attempts;
    const double predicted =
        success_probability(plan.rates[h], plan.per_hop_power[h], 1.0, 1.0);
    worst_gap = std::max(worst_gap, std::abs(frequency - predicted));
    min_attempts =
        std::min(min_attempts, mean_attempts * static_cast<double>(commands));
  }
  detail = fmt("max |freq - predicted| = %.5f over rates 1..8, "
               ">= %.0f attempts per hop",
               worst_gap, min_attempts);
  return worst_gap <= 0.01 && min_attempts >= 1e5;
}

// Sampled sojourn time of the queue simulation against 1 / (mu - lambda).
bool queue_sim_vs_analytic(std::string& detail) {
  const QueueSimStats stats =
      run_queue_sim(QueueParams(0.5, 1.0), 100000, 0xACCE5503);
  const double expected = 2.0;
  const double rel = std::abs(stats.sojourn_mean - expected) / expected;
  detail = fmt("sojourn mean %.4f s vs %.1f s analytic, rel err %.4f",
               stats.sojourn_mean, expected, rel);
  return rel <= 0.05;
}

// With powers sized against the mean gain, the per-attempt success
// probability must not depend on the chosen rate.
bool rate_invariant_success(std::string& detail) {
  const RadioConstants radio(0.2, 3.0, 1.0, 1.0, 0.0005, 1e4);
  double lo = 1.0;
  double hi = 0.0;
  for (int r = 1; r <= 8; ++r) {
    const RateLevel level(r);
    const double power = required_power(level, radio.ber_target, 1.0, radio);
    const double eta = success_probability(level, power, 1.0, 1.0);
    lo = std::min(lo, eta);
    hi = std::max(hi, eta);
  }
  const double spread = hi - lo;
  detail = fmt("success probability spread %.3g across rates 1..8 (eta=%.6f)",
               spread, lo);
  return spread <= 1e-12;
}

// Full platoon-size sweep at defaults: the optimizer must dominate every
// baseline on dissemination rate at every size, sit between the greedy and
// the all-lowest plan on latency, and beat the all-lowest baseline by at
// least 20% rate at 30 vehicles.
bool platoon_sweep_dominance(std::string& detail) {
  const SweepSpec spec = default_platoon_spec();
  const SweepResult result = sweep_platoon_size(spec);
  for (const SweepRow& row : result.rows) {
    if (row.infeasible_count != 0 || !std::isfinite(row.diss_rate_mean)) {
      detail = fmt("unexpected infeasible row at %g vehicles",
                   row.sweep_value);
      return false;
    }
  }
  for (int value : spec.values) {
    const SweepRow& lcd = find_row(result, "lcd", value);
    const SweepRow& ltrp = find_row(result, "ltrp", value);
    const SweepRow& pctrp = find_row(result, "pctrp", value);
    const SweepRow& nftrp = find_row(result, "nftrp", value);
    if (lcd.diss_rate_mean < ltrp.diss_rate_mean ||
        lcd.diss_rate_mean < pctrp.diss_rate_mean ||
        lcd.diss_rate_mean < nftrp.diss_rate_mean) {
      detail = fmt("rate dominance lost at %d vehicles", value);
      return false;
    }
    if (pctrp.latency_mean_s > lcd.latency_mean_s ||
        lcd.latency_mean_s > ltrp.latency_mean_s) {
      detail = fmt("latency ordering broken at %d vehicles", value);
      return false;
    }
  }
  const SweepRow& lcd30 = find_row(result, "lcd", 30.0);
  const SweepRow& ltrp30 = find_row(result, "ltrp", 30.0);
  const double advantage =
      (lcd30.diss_rate_mean - ltrp30.diss_rate_mean) / ltrp30.diss_rate_mean;
  detail = fmt("dominance holds at all 10 sizes; rate advantage over the "
               "all-lowest baseline at 30 vehicles = %.0f%%",
               100.0 * advantage);
  return advantage >= 0.20;
}

// Longer payloads cannot raise the optimizer's dissemination rate beyond
// confidence-interval overlap.
bool packet_sweep_monotone(std::string& detail) {
  SweepSpec spec = default_packet_spec();
  spec.algorithms = {"lcd"};
  const SweepResult result = sweep_packet_size(spec);
  double worst = -1e18;
  for (std::size_t k = 0; k + 1 < spec.values.size(); ++k) {
    const SweepRow& a = find_row(result, "lcd", spec.values[k]);
    const SweepRow& b = find_row(result, "lcd", spec.values[k + 1]);
    const double rise =
        b.diss_rate_mean - a.diss_rate_mean - a.diss_rate_ci95 -
        b.diss_rate_ci95;
    worst = std::max(worst, rise);
  }
  detail = fmt("max CI-adjusted rate increase %.4g per step (must be <= 0)",
               worst);
  return worst <= 0.0;
}

// Work done by the optimizer grows linearly with the platoon length when the
// budget resolution is held fixed.
bool dp_step_scaling(std::string& detail) {
  std::vector<double> hops;
  std::vector<double> steps;
  for (int n : {10, 20, 40}) {
    const AllocProblem problem = sweep_problem(SweepFixed{}, n, 32);
    DpStats stats;
    lcd_allocate(problem, kDefaultBudgetCells, &stats);
    hops.push_back(static_cast<double>(stats.hops));
    steps.push_back(static_cast<double>(stats.relaxation_steps));
  }
  const double r2 = r_squared(hops, steps);
  detail = fmt("R^2 = %.12f over 10/20/40 vehicles (steps %.3g..%.3g)", r2,
               steps.front(), steps.back());
  return r2 > 0.99;
}

// The experiment harness must be deterministic: same spec, same seed, byte
// for byte the same CSV.
bool sweep_reproducibility(std::string& detail) {
  const SweepSpec platoon = default_platoon_spec();
  SweepSpec packet = default_packet_spec();
  packet.algorithms = {"lcd", "nftrp"};
  const std::string platoon_a = to_csv(sweep_platoon_size(platoon));
  const std::string platoon_b = to_csv(sweep_platoon_size(platoon));
  const std::string packet_a = to_csv(sweep_packet_size(packet));
  const std::string packet_b = to_csv(sweep_packet_size(packet));
  const bool same = platoon_a == platoon_b && packet_a == packet_b;
  detail = fmt("platoon csv %zu bytes, packet csv %zu bytes, reruns %s",
               platoon_a.size(), packet_a.size(),
               same ? "identical" : "DIFFER");
  return same;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"dp-matches-enumeration", 60.0, dp_matches_enumeration},
      {"channel-sim-agreement", 30.0, channel_sim_agreement},
      {"queue-sim-vs-analytic", 30.0, queue_sim_vs_analytic},
      {"rate-invariant-success", 30.0, rate_invariant_success},
      {"platoon-sweep-dominance", 600.0, platoon_sweep_dominance},
      {"packet-sweep-monotone", 300.0, packet_sweep_monotone},
      {"dp-step-scaling", 30.0, dp_step_scaling},
      {"sweep-reproducibility", 600.0, sweep_reproducibility},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion.body(detail);
    } catch (const std::exception& err) {
      detail = fmt("exception: %s", err.what());
      ok = false;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (seconds > criterion.time_limit_s) {
      detail += fmt(" [over %.0f s budget]", criterion.time_limit_s);
      ok = false;
    }
    std::printf("%s %-24s %s [%.2f s]\n", ok ? "PASS" : "FAIL",
                criterion.name.c_str(), detail.c_str(), seconds);
    if (!ok) ++failed;
  }
  if (failed == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    return 0;
  }
  std::printf("acceptance: %d of %zu criteria failed\n", failed,
              criteria.size());
  return 1;
}
