#include "ifcascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ifcascade/errors.hpp"

namespace ifc {

namespace {

void check_state(const SpikeState& state) {
  if (!(state.alpha > 0.0 && state.alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (state.potentials.empty())
    throw std::domain_error("empty potential vector");
  for (double x : state.potentials)
    if (!std::isfinite(x)) throw std::domain_error("non-finite potential");
}

}  // namespace

CascadeResult resolve_cascade(const SpikeState& state) {
  check_state(state);
  const std::size_t n = state.n();
  const double alpha = state.alpha;
  const auto& x = state.potentials;

  CascadeResult result;
  std::vector<char> fired(n, 0);
  std::size_t fired_count = 0;

  while (true) {
    const double kick =
        alpha * static_cast<double>(fired_count) / static_cast<double>(n);
    std::vector<std::size_t> round;
    for (std::size_t i = 0; i < n; ++i)
      if (!fired[i] && x[i] + kick >= 1.0) round.push_back(i);
    if (round.empty()) break;
    for (std::size_t i : round) fired[i] = 1;
    fired_count += round.size();
    result.rounds.push_back(std::move(round));
  }

  for (std::size_t i = 0; i < n; ++i)
    if (fired[i]) result.gamma.push_back(i);
  result.jump_fraction =
      static_cast<double>(fired_count) / static_cast<double>(n);

  const double kick =
      alpha * static_cast<double>(fired_count) / static_cast<double>(n);
  result.post_potentials.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.post_potentials[i] = x[i] + kick - (fired[i] ? 1.0 : 0.0);
    if (result.post_potentials[i] >= 1.0)
      throw std::runtime_error(
          "cascade post-update left a potential at or above threshold "
          "(barrier overshoot exceeds 1 - alpha)");
  }
  return result;
}

std::size_t cascade_size_inf(const SpikeState& state) {
  check_state(state);
  const std::size_t n = state.n();
  const auto& x = state.potentials;
  for (std::size_t k = 0; k <= n; ++k) {
    const double level =
        1.0 - state.alpha * static_cast<double>(k) / static_cast<double>(n);
    std::size_t count = 0;
    for (double xi : x) count += (xi >= level) ? 1 : 0;
    if (count <= k) return k;
  }
  return n;  // unreachable: count <= N always holds at k = N
}

double physical_jump_size(const std::vector<double>& samples, double alpha) {
  if (samples.empty()) throw std::domain_error("empty sample vector");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");

  const std::size_t n = samples.size();
  // Breakpoints of eta -> (1/N) #{x_i >= 1 - alpha*eta}: the i-th sample is
  // counted once eta >= (1 - x_i)/alpha (clamped at 0 for samples >= 1).
  std::vector<double> brk(n);
  for (std::size_t i = 0; i < n; ++i)
    brk[i] = std::max(0.0, (1.0 - samples[i]) / alpha);
  std::sort(brk.begin(), brk.end());

  // On [B_k, B_{k+1}) the tail function equals k/N; the set {tail < eta}
  // first becomes nonempty either at B_k (when k/N < B_k) or at k/N itself.
  for (std::size_t k = 0; k <= n; ++k) {
    const double lo = (k == 0) ? 0.0 : brk[k - 1];
    const double hi =
        (k == n) ? std::numeric_limits<double>::infinity() : brk[k];
    if (lo >= hi) continue;
    const double tail = static_cast<double>(k) / static_cast<double>(n);
    if (tail < lo) return std::min(lo, 1.0);
    if (tail < hi) return std::min(tail, 1.0);
  }
  return 1.0;  // tail stays on or above the diagonal throughout [0, 1]
}

CriterionReport physical_criterion_check(const std::vector<double>& samples,
                                         double alpha, double jump,
                                         std::size_t grid) {
  if (samples.empty()) throw std::domain_error("empty sample vector");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (grid == 0) grid = 1;

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  CriterionReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= grid; ++j) {
    const double eta =
        jump * static_cast<double>(j) / static_cast<double>(grid);
    const double level = 1.0 - alpha * eta;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), level);
    const double tail = static_cast<double>(sorted.end() - it) / n;
    const double margin = tail - eta;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_eta = eta;
    }
  }
  report.pass = report.worst_margin >= -(1.0 / n + 1e-12);
  return report;
}

}  // namespace ifc
