#include "platoon/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace platoon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Precomputed numbers for one (hop, rate) choice.
struct RateOption {
  double power = 0.0;        // required transmit power
  double latency = 0.0;      // expected symbol periods, inf when eta == 0
  std::int64_t weight = 0;   // budget cells consumed, floor(power / cell)
};

using OptionTable = std::vector<std::vector<RateOption>>;

OptionTable build_options(const AllocProblem& p) {
  const int hops = p.hops();
  const int m = static_cast<int>(p.rate_alphabet.size());
  OptionTable options(hops, std::vector<RateOption>(m));
  for (int h = 0; h < hops; ++h) {
    for (int k = 0; k < m; ++k) {
      const RateLevel r = p.rate_alphabet[k];
      RateOption& opt = options[h][k];
      opt.power = required_power(r, p.radio.ber_target,
                                 p.per_hop_mean_gain[h], p.radio);
      const double eta = hop_success_probability(p, h, r, opt.power);
      opt.latency =
          eta > 0.0 ? expected_hop_latency(r, eta, p.payload_bits) : kInf;
    }
  }
  return options;
}

double total_power_of(const OptionTable& options,
                      const std::vector<int>& choice) {
  double total = 0.0;
  for (std::size_t h = 0; h < choice.size(); ++h) {
    total += options[h][choice[h]].power;
  }
  return total;
}

double total_latency_of(const OptionTable& options,
                        const std::vector<int>& choice) {
  double total = 0.0;
  for (std::size_t h = 0; h < choice.size(); ++h) {
    total += options[h][choice[h]].latency;
  }
  return total;
}

RatePlan plan_from_choice(const AllocProblem& p, const OptionTable& options,
                          const std::vector<int>& choice) {
  RatePlan plan;
  plan.rates.reserve(choice.size());
  plan.per_hop_power.reserve(choice.size());
  for (std::size_t h = 0; h < choice.size(); ++h) {
    plan.rates.push_back(p.rate_alphabet[choice[h]]);
    plan.per_hop_power.push_back(options[h][choice[h]].power);
  }
  plan.expected_latency = total_latency_of(options, choice);
  return plan;
}

// Cheapest-rate feasibility gate shared by lcd and the fallback baselines.
void require_floor_feasible(const AllocProblem& p, const OptionTable& options) {
  const std::vector<int> all_lowest(p.hops(), 0);
  if (!within_power_cap(total_power_of(options, all_lowest), p.hops(),
                        p.power_cap)) {
    throw InfeasibleError(
        "even the lowest rate on every hop exceeds the power cap");
  }
}

// ---- dynamic program ------------------------------------------------------

// Compensated running sum. Exact for the few dozen positive terms a chain
// produces, so totals of the same multiset compare equal no matter which hop
// order accumulated them; plain doubles differ by an ulp under reordering
// and would leak into the tie-break.
struct Acc {
  double hi = 0.0;
  double lo = 0.0;
};

Acc acc_add(const Acc& a, double x) {
  const double s = a.hi + x;
  if (!std::isfinite(s)) return {s, 0.0};
  const double b = s - a.hi;
  const double err = (a.hi - (s - b)) + (x - b);
  const double lo = a.lo + err;
  const double hi = s + lo;
  return {hi, lo - (hi - s)};
}

// -1, 0, +1. Infinite totals compare equal so the lexicographic rule can
// settle plans that cannot deliver at all.
int acc_cmp(const Acc& a, const Acc& b) {
  if (a.hi != b.hi) return a.hi < b.hi ? -1 : 1;
  if (!std::isfinite(a.hi)) return 0;
  if (a.lo != b.lo) return a.lo < b.lo ? -1 : 1;
  return 0;
}

struct Entry {
  Acc lat;   // order-insensitive total latency, drives every comparison
  Acc pow;   // order-insensitive total power, drives dominance
  double fold_latency = 0.0;  // plain hop-order sum, the reported number
  double fold_power = 0.0;    // plain hop-order sum, checked against the cap
  std::int32_t prev_cell = -1;
  std::int32_t prev_index = -1;
  std::int8_t rate_idx = -1;
};

// Each budget cell keeps the front over (latency, power, lex rank): a slower
// prefix may still be the only one with enough power headroom for a later
// hop, and among equal-latency prefixes the cheaper one and the
// lexicographically smaller one can each be the one the answer needs.
using Cell = std::vector<Entry>;
using Layers = std::vector<std::vector<Cell>>;

// Rate indices of the prefix ending at `e` in layer `layer`, recovered by
// walking parent links. Only needed to break exact latency ties.
void trace_choice(const Layers& layers, int layer, const Entry* e,
                  std::vector<int>& out) {
  out.clear();
  while (layer > 0) {
    out.push_back(e->rate_idx);
    e = &layers[layer - 1][e->prev_cell][e->prev_index];
    --layer;
  }
  std::reverse(out.begin(), out.end());
}

struct FrontMerger {
  const Layers& layers;
  int layer;
  std::vector<int> scratch_a;
  std::vector<int> scratch_b;

  bool lex_less(const Entry& a, const Entry& b) {
    trace_choice(layers, layer, &a, scratch_a);
    trace_choice(layers, layer, &b, scratch_b);
    return scratch_a < scratch_b;
  }

  // Insert `cand` unless a member makes it useless; evict members it makes
  // useless. A strictly faster prefix that is no dearer wins outright. Exact
  // latency ties are everywhere (the per-attempt success probability does
  // not depend on the rate, so permuted rate multisets tie bitwise), and
  // there the lexicographic rank decides the final answer, so an equal-
  // latency prefix may only displace another when it is also cheaper and
  // lexicographically ahead.
  void merge(Cell& front, const Entry& cand) {
    for (Entry& member : front) {
      const int lc = acc_cmp(member.lat, cand.lat);
      const int pc = acc_cmp(member.pow, cand.pow);
      if (lc == 0 && pc == 0) {
        if (lex_less(cand, member)) member = cand;
        return;
      }
      if (lc < 0 && pc <= 0) return;  // faster and no dearer
      if (lc == 0 && pc < 0 && lex_less(member, cand)) {
        return;  // same speed, cheaper, lexicographically ahead
      }
    }
    std::size_t w = 0;
    for (std::size_t i = 0; i < front.size(); ++i) {
      const Entry& member = front[i];
      const int lc = acc_cmp(member.lat, cand.lat);
      const int pc = acc_cmp(member.pow, cand.pow);
      const bool evict = (lc > 0 && pc >= 0) ||
                         (lc == 0 && pc > 0 && lex_less(cand, member));
      if (!evict) {
        if (w != i) front[w] = front[i];
        ++w;
      }
    }
    front.resize(w);
    front.push_back(cand);
  }
};

}  // namespace

void AllocProblem::validate() const {
  if (n_vehicles < 2) {
    throw std::invalid_argument("a platoon needs at least two vehicles");
  }
  if (!(payload_bits > 0.0) || !std::isfinite(payload_bits)) {
    throw std::invalid_argument("payload_bits must be positive");
  }
  if (!(power_cap > 0.0) || !std::isfinite(power_cap)) {
    throw std::invalid_argument("power_cap must be positive");
  }
  if (rate_alphabet.empty()) {
    throw std::invalid_argument("rate alphabet must not be empty");
  }
  for (std::size_t i = 1; i < rate_alphabet.size(); ++i) {
    if (!(rate_alphabet[i - 1] < rate_alphabet[i])) {
      throw std::invalid_argument("rate alphabet must be strictly increasing");
    }
  }
  if (static_cast<int>(per_hop_mean_gain.size()) != hops()) {
    throw std::invalid_argument(
        "per_hop_mean_gain must provide one gain per hop");
  }
  for (double g : per_hop_mean_gain) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("per-hop mean gains must be positive");
    }
  }
}

bool within_power_cap(double total_power, int hops, double power_cap) {
  return total_power / hops <= power_cap + kPowerCapSlack;
}

double expected_hop_latency(RateLevel r, double eta, double payload_bits) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::domain_error("per-attempt success probability must be in (0,1]");
  }
  if (!(payload_bits > 0.0)) {
    throw std::domain_error("payload must be positive");
  }
  return (payload_bits / r.bits_per_symbol) * (1.0 / eta);
}

double hop_success_probability(const AllocProblem& problem, int hop,
                               RateLevel r, double power) {
  if (hop < 0 || hop >= problem.hops()) {
    throw std::out_of_range("hop index out of range");
  }
  if (power == 0.0) return 0.0;  // zero power can never clear the threshold
  return success_probability(r, power, problem.per_hop_mean_gain[hop],
                             problem.radio.noise_power);
}

RatePlan make_plan(const AllocProblem& problem,
                   const std::vector<RateLevel>& rates) {
  problem.validate();
  if (static_cast<int>(rates.size()) != problem.hops()) {
    throw std::invalid_argument("plan needs one rate per hop");
  }
  RatePlan plan;
  plan.rates = rates;
  plan.per_hop_power.reserve(rates.size());
  double total = 0.0;
  for (int h = 0; h < problem.hops(); ++h) {
    const double power = required_power(rates[h], problem.radio.ber_target,
                                        problem.per_hop_mean_gain[h],
                                        problem.radio);
    plan.per_hop_power.push_back(power);
    const double eta = hop_success_probability(problem, h, rates[h], power);
    total += eta > 0.0
                 ? expected_hop_latency(rates[h], eta, problem.payload_bits)
                 : kInf;
  }
  plan.expected_latency = total;
  return plan;
}

double plan_latency(const RatePlan& plan, const AllocProblem& problem) {
  problem.validate();
  if (static_cast<int>(plan.rates.size()) != problem.hops() ||
      plan.per_hop_power.size() != plan.rates.size()) {
    throw std::invalid_argument("plan shape does not match the problem");
  }
  double total = 0.0;
  for (int h = 0; h < problem.hops(); ++h) {
    const double eta =
        hop_success_probability(problem, h, plan.rates[h],
                                plan.per_hop_power[h]);
    total += eta > 0.0
                 ? expected_hop_latency(plan.rates[h], eta,
                                        problem.payload_bits)
                 : kInf;
  }
  return total;
}

double mean_power(const RatePlan& plan) {
  double total = 0.0;
  for (double p : plan.per_hop_power) total += p;
  return plan.per_hop_power.empty()
             ? 0.0
             : total / static_cast<double>(plan.per_hop_power.size());
}

RatePlan lcd_allocate(const AllocProblem& problem, int budget_cells,
                      DpStats* stats) {
  problem.validate();
  if (budget_cells < 1) {
    throw std::invalid_argument("budget_cells must be at least 1");
  }
  const int hops = problem.hops();
  const int m = static_cast<int>(problem.rate_alphabet.size());
  OptionTable options = build_options(problem);
  require_floor_feasible(problem, options);

  const std::int64_t cells = budget_cells;
  const double budget_total = problem.power_cap * hops;
  const double cell_width = budget_total / static_cast<double>(cells);
  for (auto& hop_options : options) {
    for (auto& opt : hop_options) {
      const double w = std::floor(opt.power / cell_width);
      opt.weight =
          w > static_cast<double>(cells) ? cells + 1 : static_cast<std::int64_t>(w);
    }
  }

  Layers layers(hops + 1, std::vector<Cell>(cells + 1));
  layers[0][0].push_back(Entry{});

  std::uint64_t steps = 0;
  FrontMerger merger{layers, 0, {}, {}};
  for (int h = 0; h < hops; ++h) {
    merger.layer = h + 1;
    const auto& prev = layers[h];
    auto& next = layers[h + 1];
    for (std::int64_t b = 0; b <= cells; ++b) {
      for (int k = 0; k < m; ++k) {
        ++steps;
        const RateOption& opt = options[h][k];
        if (opt.weight > b) continue;
        const Cell& src = prev[b - opt.weight];
        for (std::size_t s = 0; s < src.size(); ++s) {
          const Entry& base = src[s];
          const double fold_power = base.fold_power + opt.power;
          if (!within_power_cap(fold_power, hops, problem.power_cap)) continue;
          Entry cand;
          cand.lat = acc_add(base.lat, opt.latency);
          cand.pow = acc_add(base.pow, opt.power);
          cand.fold_latency = base.fold_latency + opt.latency;
          cand.fold_power = fold_power;
          cand.prev_cell = static_cast<std::int32_t>(b - opt.weight);
          cand.prev_index = static_cast<std::int32_t>(s);
          cand.rate_idx = static_cast<std::int8_t>(k);
          merger.merge(next[b], cand);
        }
      }
    }
  }

  if (stats != nullptr) {
    stats->relaxation_steps = steps;
    stats->budget_cells = budget_cells;
    stats->hops = hops;
  }

  const Entry* best = nullptr;
  FrontMerger final_cmp{layers, hops, {}, {}};
  for (std::int64_t b = 0; b <= cells; ++b) {
    for (const Entry& e : layers[hops][b]) {
      if (best == nullptr) {
        best = &e;
        continue;
      }
      const int lc = acc_cmp(e.lat, best->lat);
      if (lc < 0 || (lc == 0 && final_cmp.lex_less(e, *best))) best = &e;
    }
  }
  if (best == nullptr) {
    throw InfeasibleError("no rate assignment satisfies the power cap");
  }

  std::vector<int> choice;
  trace_choice(layers, hops, best, choice);
  return plan_from_choice(problem, options, choice);
}

RatePlan brute_force_allocate(const AllocProblem& problem) {
  problem.validate();
  const int hops = problem.hops();
  const int m = static_cast<int>(problem.rate_alphabet.size());
  if (hops * std::log2(static_cast<double>(m)) > 24.0 + 1e-9) {
    throw InstanceTooLargeError(
        "exhaustive search is limited to 2^24 candidate plans");
  }
  OptionTable options = build_options(problem);

  std::vector<int> choice(hops, 0);
  std::vector<int> best_choice;
  Acc best_latency;
  bool found = false;
  while (true) {
    const double power = total_power_of(options, choice);
    if (within_power_cap(power, hops, problem.power_cap)) {
      Acc latency;
      for (std::size_t h = 0; h < choice.size(); ++h) {
        latency = acc_add(latency, options[h][choice[h]].latency);
      }
      // Strict improvement only: the compensated total makes permuted plans
      // tie exactly, and enumeration runs in lexicographic order, so the
      // first plan reaching a total is the lexicographically smallest.
      if (!found || acc_cmp(latency, best_latency) < 0) {
        best_latency = latency;
        best_choice = choice;
        found = true;
      }
    }
    int h = hops - 1;
    while (h >= 0 && choice[h] == m - 1) {
      choice[h] = 0;
      --h;
    }
    if (h < 0) break;
    ++choice[h];
  }
  if (!found) {
    throw InfeasibleError("no rate assignment satisfies the power cap");
  }
  return plan_from_choice(problem, options, best_choice);
}

RatePlan ltrp_allocate(const AllocProblem& problem) {
  problem.validate();
  OptionTable options = build_options(problem);
  require_floor_feasible(problem, options);
  return plan_from_choice(problem, options,
                          std::vector<int>(problem.hops(), 0));
}

RatePlan pctrp_allocate(const AllocProblem& problem) {
  problem.validate();
  OptionTable options = build_options(problem);
  const int m = static_cast<int>(problem.rate_alphabet.size());
  std::vector<int> choice(problem.hops(), -1);
  for (int h = 0; h < problem.hops(); ++h) {
    for (int k = m - 1; k >= 0; --k) {
      if (options[h][k].power <= problem.power_cap) {
        choice[h] = k;
        break;
      }
    }
    if (choice[h] < 0) {
      throw InfeasibleError(
          "a hop cannot afford the lowest rate under the per-hop cap");
    }
  }
  return plan_from_choice(problem, options, choice);
}

RatePlan nftrp_allocate(const AllocProblem& problem, double threshold) {
  problem.validate();
  if (!(threshold >= 0.0) || threshold > 1.0) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }
  OptionTable options = build_options(problem);
  require_floor_feasible(problem, options);
  const int hops = problem.hops();
  const int top = static_cast<int>(problem.rate_alphabet.size()) - 1;
  const RateLevel top_rate = problem.rate_alphabet[top];

  std::vector<int> choice(hops, 0);
  for (int h = 0; h < hops; ++h) {
    const double probe_power = std::min(options[h][top].power,
                                        problem.power_cap);
    const double eta =
        probe_power > 0.0
            ? success_probability(top_rate, probe_power,
                                  problem.per_hop_mean_gain[h],
                                  problem.radio.noise_power)
            : 0.0;
    choice[h] = eta >= threshold ? top : 0;
  }

  // Mean cap repair: drop the most expensive top-rate hop to the lowest rate,
  // rightmost first on ties, until the plan fits.
  while (!within_power_cap(total_power_of(options, choice), hops,
                           problem.power_cap)) {
    int victim = -1;
    for (int h = 0; h < hops; ++h) {
      if (choice[h] == 0) continue;
      if (victim < 0 || options[h][choice[h]].power >=
                            options[victim][choice[victim]].power) {
        victim = h;
      }
    }
    if (victim < 0) {
      throw InfeasibleError("no rate assignment satisfies the power cap");
    }
    choice[victim] = 0;
  }
  return plan_from_choice(problem, options, choice);
}

}  // namespace platoon
