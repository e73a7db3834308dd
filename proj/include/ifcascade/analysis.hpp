#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifcascade/particle_sim.hpp"
#include "ifcascade/paths.hpp"

namespace ifc {

/// A macroscopic discontinuity of a firing map.
struct JumpEvent {
  double time = 0.0;
  double size = 0.0;  // population fraction, in (0, 1]
  std::vector<double> pre_hist;
  std::vector<double> pre_samples;  // raw potentials when captured
  bool criterion_pass = true;
  bool has_samples = false;
};

/// Jumps of a non-decreasing path: single-sample increments of at least
/// `threshold`. Throws std::domain_error for decreasing input or a threshold
/// outside (0, 1).
std::vector<JumpEvent> detect_jumps(const CadlagPath& e, double threshold);

/// Same detection on a particle run's ebar, cross-checked against the
/// cascade event log (every macroscopic jump must match exactly one logged
/// cascade); events carry the logged pre-cascade data.
std::vector<JumpEvent> detect_jumps(const SimOutput& run, double threshold);

struct VerifyReport {
  bool pass = false;
  bool unverifiable = false;
  double recomputed = 0.0;
  double reported = 0.0;
  double tolerance = 0.0;
  bool criterion_pass = false;
};

/// Recomputes the physical jump size from the event's pre-jump samples and
/// checks it against the observed size within the 1/N quantization, together
/// with the sufficient-condition inequality. Events without raw samples are
/// reported unverifiable.
VerifyReport verify_physical_jump(const JumpEvent& event, double alpha);

struct FiringRateResult {
  CadlagPath rate;  // jump-corrected difference quotient on the input grid
  std::vector<double> jump_times;  // where the rate is +infinity
};

/// Centered finite-difference estimate of e' with detected jumps subtracted
/// from the difference quotient, so the estimate tracks the continuous part
/// even next to a discontinuity.
FiringRateResult firing_rate(const CadlagPath& e, double bandwidth,
                             double jump_threshold = 0.05);

struct LabeledCurve {
  std::string label;   // grouping key, e.g. "N=1000" or "delta=0.1"
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  CadlagPath curve;
};

struct ConvergenceEntry {
  std::string label;
  double axis_value = 0.0;
  std::size_t seeds = 0;
  double mean_pointwise_gap = 0.0;
  double se_pointwise = 0.0;
  double mean_m1_gap = 0.0;
  double se_m1 = 0.0;
  std::vector<double> jump_times;  // pooled over seeds
  std::vector<double> jump_sizes;
};

struct ConvergenceOptions {
  double jump_threshold = 0.05;
  double exclusion_window = 0.05;  // half-width around jumps, time units
  std::size_t comparison_points = 101;
  std::size_t m1_resolution = 2000;
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;  // sorted by axis value
  ConvergenceOptions options;
  double reference_horizon = 0.0;
};

/// Pointwise (at jump-free times) and M1 gaps of each labeled curve to the
/// reference, grouped by label with Monte Carlo standard errors across
/// seeds. Needs at least two runs.
ConvergenceReport convergence_report(const std::vector<LabeledCurve>& runs,
                                     const CadlagPath& reference,
                                     const ConvergenceOptions& options = {});

}  // namespace ifc
