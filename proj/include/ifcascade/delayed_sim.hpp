#pragma once

#include <cstdint>
#include <vector>

#include "ifcascade/particle_sim.hpp"
#include "ifcascade/paths.hpp"

namespace ifc {

struct DelayedConfig {
  double delta = 0.0;        // delay, must be >= dt
  std::size_t replicas = 0;  // ensemble size estimating E(M^delta)
  double horizon = 0.0;
  double dt = 0.0;
  double alpha = 0.0;
  DriftSpec drift;
  InitialLaw init;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t record_replicas = 0;  // replica counting paths kept

  void validate() const;
};

struct DelayedOutput {
  CadlagPath e_delta;  // t -> estimate of E(M^delta_{t-delta}), 0 on [0,delta]
  std::vector<CadlagPath> sample_m_paths;
  std::size_t replica_count = 0;
};

/// Solves the delayed equation by the windowed construction: the firing map
/// fed into the dynamics at time t only reads the replica average of M at
/// t - delta, which is already known, so each window is a plain SDE with a
/// deterministic input. Replicas evolve independently with single-particle
/// resets X -> X - 1 at the threshold (the delayed map is continuous, no
/// cascade can occur). The replica average is interpolated linearly on the
/// dt grid before being fed forward.
DelayedOutput run_delayed(const DelayedConfig& config);

/// Same stepping with a frozen exogenous firing map instead of the online
/// estimate. Feeding back a run's own e_delta must reproduce its replica
/// paths bit-exactly; this is the fixed-point check of the construction.
DelayedOutput run_delayed_with_input(const DelayedConfig& config,
                                     const CadlagPath& e_input);

struct DelayedCompareEntry {
  double delta = 0.0;
  double pointwise_gap = 0.0;  // sup over jump-free grid times
  double m1_gap = 0.0;
};

struct DelayedCompareReport {
  std::vector<DelayedCompareEntry> entries;  // in the order supplied
  bool gaps_non_increasing = true;
  double jump_threshold = 0.05;
};

/// Gaps of each delayed curve to a reference (typically a large-N particle
/// ebar). Pointwise gaps are taken away from reference jumps; entries keep
/// the caller's order, expected to be decreasing in delta.
DelayedCompareReport delayed_to_limit_compare(
    const std::vector<DelayedOutput>& outputs,
    const std::vector<double>& deltas, const CadlagPath& reference,
    std::size_t m1_resolution = 2000, double jump_threshold = 0.05);

}  // namespace ifc
