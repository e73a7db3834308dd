#include "ifcascade/delayed_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ifcascade/errors.hpp"
#include "ifcascade/rng.hpp"

namespace ifc {

void DelayedConfig::validate() const {
  if (replicas == 0) throw ConfigError("replica count must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (delta < dt) throw ConfigError("delay must be at least one dt");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (noise_scale < 0.0) throw ConfigError("noise scale must be >= 0");
  drift.validate();
  init.validate();
}

namespace {

// Linear interpolation of grid samples; shared by the online estimate and
// the path evaluation so both modes consume identical doubles.
double interp_grid(const std::vector<double>& grid,
                   const std::vector<double>& values, double t) {
  if (t <= grid.front()) return values.front();
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (i >= grid.size()) return values.back();
  if (grid[i - 1] == t) return values[i - 1];
  const double theta = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return values[i - 1] + theta * (values[i] - values[i - 1]);
}

DelayedOutput run_impl(const DelayedConfig& config,
                       const CadlagPath* frozen_input) {
  config.validate();
  const std::size_t r_count = config.replicas;
  const double dt = config.dt;
  const std::size_t n_rec = std::min(config.record_replicas, r_count);

  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(config.horizon / dt - 1e-9));
  std::vector<double> grid(steps + 1);
  grid[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k)
    grid[k] = std::min(static_cast<double>(k) * dt, config.horizon);

  std::vector<Xoshiro256> rng;
  rng.reserve(r_count);
  for (std::size_t r = 0; r < r_count; ++r) rng.emplace_back(config.seed, r);

  std::vector<double> x(r_count), m(r_count, 0.0);
  for (std::size_t r = 0; r < r_count; ++r)
    x[r] = sample_initial_one(config.init, rng[r], r);

  std::vector<double> mean_m(steps + 1, 0.0);
  std::vector<double> e_input(steps + 1, 0.0);
  std::vector<std::vector<double>> m_rec(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    m_rec[r].reserve(steps + 1);
    m_rec[r].push_back(0.0);
  }

  auto input_at = [&](double t) -> double {
    if (frozen_input) return frozen_input->evaluate(t);
    if (t <= config.delta) return 0.0;
    return interp_grid(grid, mean_m, t - config.delta);
  };

  e_input[0] = input_at(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double h = grid[k + 1] - grid[k];
    const double sig = config.noise_scale * std::sqrt(h);
    e_input[k + 1] = input_at(grid[k + 1]);
    const double kick = config.alpha * (e_input[k + 1] - e_input[k]);

    double m_sum = 0.0;
    for (std::size_t r = 0; r < r_count; ++r) {
      double xr = x[r] + drift_eval(config.drift, x[r]) * h + kick;
      if (sig > 0.0) xr += sig * rng[r].next_normal();
      if (!std::isfinite(xr))
        throw SimRuntimeError("replica potential became non-finite", k);
      if (xr >= 1.0) {
        m[r] += 1.0;
        xr -= 1.0;  // reset keeps the grid overshoot
        if (xr >= 1.0)
          throw SimRuntimeError("replica crossed the threshold twice in one "
                                "step (delay too small for this kick)",
                                k);
      }
      x[r] = xr;
      m_sum += m[r];
    }
    mean_m[k + 1] = m_sum / static_cast<double>(r_count);
    for (std::size_t r = 0; r < n_rec; ++r) m_rec[r].push_back(m[r]);
  }

  DelayedOutput out;
  out.replica_count = r_count;
  out.e_delta = CadlagPath(grid, std::move(e_input), Interp::Linear);
  out.sample_m_paths.reserve(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r)
    out.sample_m_paths.emplace_back(grid, std::move(m_rec[r]), Interp::Step);
  return out;
}

}  // namespace

DelayedOutput run_delayed(const DelayedConfig& config) {
  return run_impl(config, nullptr);
}

DelayedOutput run_delayed_with_input(const DelayedConfig& config,
                                     const CadlagPath& e_input) {
  return run_impl(config, &e_input);
}

DelayedCompareReport delayed_to_limit_compare(
    const std::vector<DelayedOutput>& outputs,
    const std::vector<double>& deltas, const CadlagPath& reference,
    std::size_t m1_resolution, double jump_threshold) {
  if (outputs.size() != deltas.size())
    throw std::invalid_argument("one delta per output required");
  const double horizon = reference.horizon();
  for (const auto& out : outputs)
    if (std::fabs(out.e_delta.horizon() - horizon) > 1e-9)
      throw std::domain_error("compared curves have mismatched horizons");

  // Jump-free comparison times: the reference grid minus a window around
  // every reference jump of at least `jump_threshold`.
  std::vector<double> jump_times;
  const auto& rt = reference.times();
  const auto& rv = reference.values();
  for (std::size_t i = 1; i < rt.size(); ++i)
    if (rv[i] - rv[i - 1] >= jump_threshold) jump_times.push_back(rt[i]);
  const double window = 2.0 * (horizon / 100.0);

  DelayedCompareReport report;
  report.jump_threshold = jump_threshold;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    DelayedCompareEntry entry;
    entry.delta = deltas[j];
    double gap = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) {
      bool excluded = false;
      for (double tj : jump_times)
        if (std::fabs(rt[i] - tj) <= window) {
          excluded = true;
          break;
        }
      if (excluded) continue;
      gap = std::max(gap, std::fabs(outputs[j].e_delta.evaluate(rt[i]) -
                                    reference.evaluate(rt[i])));
    }
    entry.pointwise_gap = gap;
    entry.m1_gap = m1_distance(outputs[j].e_delta, reference, m1_resolution);
    report.entries.push_back(entry);
  }
  for (std::size_t j = 1; j < report.entries.size(); ++j) {
    if (report.entries[j].pointwise_gap >
            report.entries[j - 1].pointwise_gap ||
        report.entries[j].m1_gap > report.entries[j - 1].m1_gap)
      report.gaps_non_increasing = false;
  }
  return report;
}

}  // namespace ifc
