#include "ifcascade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ifcascade/cascade.hpp"

namespace ifc {

namespace {

void check_jump_inputs(const CadlagPath& e, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::domain_error("jump threshold must lie in (0, 1)");
  const auto& v = e.values();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - 1e-12)
      throw std::domain_error("jump detection expects a non-decreasing path");
}

}  // namespace

std::vector<JumpEvent> detect_jumps(const CadlagPath& e, double threshold) {
  check_jump_inputs(e, threshold);
  std::vector<JumpEvent> events;
  const auto& t = e.times();
  const auto& v = e.values();
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double inc = v[i] - v[i - 1];
    if (inc >= threshold) {
      JumpEvent ev;
      ev.time = t[i];
      ev.size = inc;
      events.push_back(std::move(ev));
    }
  }
  return events;
}

std::vector<JumpEvent> detect_jumps(const SimOutput& run, double threshold) {
  auto detected = detect_jumps(run.ebar, threshold);
  std::vector<JumpEvent> events;
  for (const auto& d : detected) {
    const CascadeEvent* match = nullptr;
    for (const auto& logged : run.events) {
      if (logged.time == d.time) {
        match = &logged;
        break;
      }
    }
    if (match == nullptr || std::fabs(match->jump_fraction - d.size) > 1e-12)
      throw std::runtime_error(
          "macroscopic ebar jump has no matching cascade event");
    JumpEvent ev;
    ev.time = d.time;
    ev.size = match->jump_fraction;
    ev.pre_hist = match->pre_hist;
    ev.pre_samples = match->pre_samples;
    ev.has_samples = !match->pre_samples.empty();
    ev.criterion_pass = match->criterion_pass;
    events.push_back(std::move(ev));
  }
  return events;
}

VerifyReport verify_physical_jump(const JumpEvent& event, double alpha) {
  VerifyReport report;
  report.reported = event.size;
  if (event.size == 0.0) {  // vacuous
    report.pass = true;
    report.criterion_pass = true;
    return report;
  }
  if (!event.has_samples) {
    report.unverifiable = true;
    return report;
  }
  const double n = static_cast<double>(event.pre_samples.size());
  report.recomputed = physical_jump_size(event.pre_samples, alpha);
  report.tolerance = 1.0 / n + 1e-9;
  const bool size_ok =
      std::fabs(report.recomputed - event.size) <= report.tolerance;
  report.criterion_pass =
      physical_criterion_check(event.pre_samples, alpha, event.size, 200)
          .pass;
  report.pass = size_ok && report.criterion_pass;
  return report;
}

FiringRateResult firing_rate(const CadlagPath& e, double bandwidth,
                             double jump_threshold) {
  if (!(bandwidth > 0.0)) throw std::domain_error("bandwidth must be > 0");
  const auto jumps = detect_jumps(e, jump_threshold);

  FiringRateResult result;
  for (const auto& j : jumps) result.jump_times.push_back(j.time);

  const auto& t = e.times();
  std::vector<double> rates(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = std::max(e.times().front(), t[i] - bandwidth);
    const double b = std::min(e.horizon(), t[i] + bandwidth);
    double jump_mass = 0.0;
    for (const auto& j : jumps)
      if (j.time > a && j.time <= b) jump_mass += j.size;
    rates[i] = (b > a)
                   ? (e.evaluate(b) - e.evaluate(a) - jump_mass) / (b - a)
                   : 0.0;
  }
  result.rate = CadlagPath(t, std::move(rates), Interp::Linear);
  return result;
}

ConvergenceReport convergence_report(const std::vector<LabeledCurve>& runs,
                                     const CadlagPath& reference,
                                     const ConvergenceOptions& options) {
  if (runs.size() < 2)
    throw std::domain_error("convergence report needs at least two runs");
  const double horizon = reference.horizon();
  for (const auto& run : runs)
    if (std::fabs(run.curve.horizon() - horizon) > 1e-9)
      throw std::domain_error("runs must share the reference horizon");

  // Jump times pooled over the reference and every run define the excluded
  // comparison windows (the continuity-time restriction).
  std::vector<double> excluded;
  auto collect = [&](const CadlagPath& curve) {
    for (const auto& j : detect_jumps(curve, options.jump_threshold))
      excluded.push_back(j.time);
  };
  collect(reference);
  for (const auto& run : runs) collect(run.curve);

  std::vector<double> comparison_times;
  for (std::size_t i = 0; i < options.comparison_points; ++i) {
    const double t = horizon * static_cast<double>(i) /
                     static_cast<double>(options.comparison_points - 1);
    bool near_jump = false;
    for (double j : excluded)
      if (std::fabs(t - j) <= options.exclusion_window) {
        near_jump = true;
        break;
      }
    if (!near_jump) comparison_times.push_back(t);
  }

  struct Acc {
    double axis_value = 0.0;
    std::vector<double> pointwise, m1;
    std::vector<double> jump_times, jump_sizes;
  };
  std::map<std::string, Acc> groups;

  for (const auto& run : runs) {
    Acc& acc = groups[run.label];
    acc.axis_value = run.axis_value;
    double gap = 0.0;
    for (double t : comparison_times)
      gap = std::max(gap,
                     std::fabs(run.curve.evaluate(t) - reference.evaluate(t)));
    acc.pointwise.push_back(gap);
    acc.m1.push_back(
        m1_distance(run.curve, reference, options.m1_resolution));
    for (const auto& j : detect_jumps(run.curve, options.jump_threshold)) {
      acc.jump_times.push_back(j.time);
      acc.jump_sizes.push_back(j.size);
    }
  }

  auto mean_se = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return std::pair<double, double>(mean, 0.0);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1.0);
    return std::pair<double, double>(mean, std::sqrt(var / n));
  };

  ConvergenceReport report;
  report.options = options;
  report.reference_horizon = horizon;
  for (auto& [label, acc] : groups) {
    ConvergenceEntry entry;
    entry.label = label;
    entry.axis_value = acc.axis_value;
    entry.seeds = acc.pointwise.size();
    std::tie(entry.mean_pointwise_gap, entry.se_pointwise) =
        mean_se(acc.pointwise);
    std::tie(entry.mean_m1_gap, entry.se_m1) = mean_se(acc.m1);
    entry.jump_times = std::move(acc.jump_times);
    entry.jump_sizes = std::move(acc.jump_sizes);
    report.entries.push_back(std::move(entry));
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const ConvergenceEntry& a, const ConvergenceEntry& b) {
              return a.axis_value < b.axis_value;
            });
  return report;
}

}  // namespace ifc
