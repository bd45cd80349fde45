#include "platoon/queueing.hpp"

#include <cmath>
#include <stdexcept>

namespace platoon {

QueueParams::QueueParams(double arrival_rate, double service_rate)
    : arrival_rate(arrival_rate), service_rate(service_rate) {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
    throw std::invalid_argument("arrival rate must be positive");
  }
  if (!(service_rate > 0.0) || !std::isfinite(service_rate)) {
    throw std::invalid_argument("service rate must be positive");
  }
}

double utilization(const QueueParams& params) {
  return params.arrival_rate / params.service_rate;
}

SteadyState steady_state(const QueueParams& params, double truncation_tail) {
  if (!(truncation_tail > 0.0) || truncation_tail >= 1.0) {
    throw std::invalid_argument("truncation tail must lie in (0, 1)");
  }
  if (!params.stable()) {
    throw UnstableQueueError(
        "steady state requires arrival rate below service rate");
  }
  const double phi = utilization(params);

  SteadyState state;
  state.utilization = phi;
  state.expected_commands = phi / (1.0 - phi);
  state.variance_commands = phi / ((1.0 - phi) * (1.0 - phi));
  state.expected_latency =
      1.0 / (params.service_rate - params.arrival_rate);

  // Truncate the geometric tail: keep states 0..K with phi^{K+1} below the
  // requested tail mass.
  int k = 0;
  if (phi > 0.0) {
    k = static_cast<int>(
        std::ceil(std::log(truncation_tail) / std::log(phi))) - 1;
    if (k < 0) k = 0;
    while (std::pow(phi, k + 1) >= truncation_tail) ++k;
  }
  state.pi.reserve(k + 1);
  double mass = 1.0 - phi;
  for (int i = 0; i <= k; ++i) {
    state.pi.push_back(mass);
    mass *= phi;
  }
  state.tail_mass = std::pow(phi, k + 1);
  return state;
}

double analytic_dissemination_latency(const QueueParams& params) {
  if (!params.stable()) {
    throw UnstableQueueError(
        "sojourn time diverges at or beyond full utilization");
  }
  return 1.0 / (params.service_rate - params.arrival_rate);
}

std::vector<std::vector<double>> transition_matrix(
    int n, const std::vector<double>& lambdas,
    const std::vector<double>& mus) {
  if (n < 1) {
    throw std::invalid_argument("matrix dimension must be at least 1");
  }
  if (static_cast<int>(lambdas.size()) != n ||
      static_cast<int>(mus.size()) != n) {
    throw std::invalid_argument(
        "lambdas and mus must each hold one rate per state");
  }
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  m[0][0] = lambdas[0];
  for (int i = 1; i < n; ++i) {
    m[i][i] = mus[i] + lambdas[i];
    m[i][i - 1] = -lambdas[i - 1];
  }
  for (int i = 0; i + 1 < n; ++i) {
    m[i][i + 1] = -mus[i + 1];
  }
  return m;
}

double pi_zero_paper(double phi, int n) {
  if (phi < 0.0 || n < 1) {
    throw std::domain_error("phi must be non-negative and n at least 1");
  }
  const double nd = static_cast<double>(n);
  const double neg_phi_n = std::pow(-phi, nd);
  const double neg_phi_n1 = std::pow(-phi, nd + 1.0);
  const double numerator =
      nd + phi * (nd + 1.0) - neg_phi_n + neg_phi_n1 + neg_phi_n;
  const double denominator = (1.0 + phi) * (1.0 - neg_phi_n);
  if (denominator == 0.0) {
    throw std::domain_error("closed form is undefined: zero denominator");
  }
  return numerator / denominator;
}

}  // namespace platoon
