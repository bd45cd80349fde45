#pragma once

#include <stdexcept>
#include <vector>

namespace platoon {

// Raised when a latency or steady-state query hits a saturated queue.
class UnstableQueueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Command arrival/service rates at the head of the platoon, modeled as an
// M/M/1 queue. Saturated parameters are representable; latency and
// steady-state queries reject them.
struct QueueParams {
  double arrival_rate;  // lambda_c, commands per second
  double service_rate;  // mu_c, commands per second

  QueueParams(double arrival_rate, double service_rate);

  bool stable() const { return arrival_rate < service_rate; }
};

// Offered load phi = lambda / mu.
double utilization(const QueueParams& params);

// Truncated geometric stationary distribution of the queue plus its moments.
struct SteadyState {
  double utilization = 0.0;
  std::vector<double> pi;        // pi[i] = P(i commands in the system)
  double tail_mass = 0.0;        // probability mass beyond the truncation
  double expected_commands = 0.0;   // E(number in system) = phi / (1 - phi)
  double variance_commands = 0.0;   // phi / (1 - phi)^2
  double expected_latency = 0.0;    // mean sojourn, 1 / (mu - lambda)
};

// Birth-death solution pi_i = (1 - phi) * phi^i, truncated once the
// remaining tail drops below `truncation_tail`. Throws UnstableQueueError
// when phi >= 1.
SteadyState steady_state(const QueueParams& params,
                         double truncation_tail = 1e-12);

// Mean time a command spends at one queueing stage: 1 / (mu - lambda).
// Throws UnstableQueueError when phi >= 1.
double analytic_dissemination_latency(const QueueParams& params);

// Tridiagonal generator of the n lowest queue states, laid out exactly as
// the balance equations print it: first entry lambda_0, diagonal
// mu_i + lambda_i, superdiagonal -mu_{i+1}, subdiagonal -lambda_{i-1}.
// Returned for inspection and validation only; steady_state does not invert
// it. lambdas and mus must each hold n entries (mus[0] is unused).
std::vector<std::vector<double>> transition_matrix(
    int n, const std::vector<double>& lambdas, const std::vector<double>& mus);

// Empty-queue probability in the nonstandard closed form this model is
// sometimes quoted with, evaluated term by term:
//   (N + phi(N+1) - (-phi)^N + (-phi)^{N+1} + (-phi)^N)
//   / ((1+phi) (1 - (-phi)^N)).
// Kept verbatim for comparison against the standard 1 - phi; the two
// disagree for phi > 0, and callers are expected to report the gap rather
// than hide it. Throws std::domain_error when the denominator is zero.
double pi_zero_paper(double phi, int n);

}  // namespace platoon
