#pragma once

#include <cstddef>
#include <vector>

namespace ifc {

/// Pre-cascade snapshot: potentials X^i_{t-} of the N particles and the
/// coupling strength alpha in (0, 1).
struct SpikeState {
  std::vector<double> potentials;
  double alpha = 0.0;

  std::size_t n() const { return potentials.size(); }
};

/// Outcome of one exact cascade resolution. `rounds` holds the disjoint sets
/// Gamma_0, Gamma_1, ... in firing order; `gamma` is their union in index
/// order. Each particle spikes at most once per cascade.
struct CascadeResult {
  std::vector<std::size_t> gamma;
  std::vector<std::vector<std::size_t>> rounds;
  std::vector<double> post_potentials;
  double jump_fraction = 0.0;

  std::size_t spike_count() const { return gamma.size(); }
};

/// Exact sequential cascade at a spike time. Round k+1 collects the
/// particles dragged over the threshold by the kick alpha*|Gamma_0 u ... u
/// Gamma_k|/N of the earlier rounds; the recursion stops at the first empty
/// round. The final update adds alpha*|Gamma|/N to every particle and
/// subtracts 1 from the spikers, leaving all potentials strictly below 1.
///
/// Triggering uses X >= 1 (not X == 1): a discrete-time scheme overshoots
/// the barrier and any particle at or above it must spike.
CascadeResult resolve_cascade(const SpikeState& state);

/// Cascade size via the inf formula
///   inf{ k in {0..N} : #\{i : X^i >= 1 - alpha*k/N\} <= k },
/// an independent route to |Gamma| (the two must agree for every state).
std::size_t cascade_size_inf(const SpikeState& state);

/// Physical jump size of the empirical measure of `samples`:
///   inf{ eta >= 0 : (1/N) #\{x_i >= 1 - alpha*eta\} < eta },
/// computed exactly by walking the breakpoints eta_i = (1-x_i)/alpha of the
/// empirical tail function (the inf lies at a breakpoint or at the level the
/// tail function takes just before it drops below the diagonal). Result is
/// always in [0, 1]; samples need not be sorted.
double physical_jump_size(const std::vector<double>& samples, double alpha);

struct CriterionReport {
  bool pass = false;
  double worst_margin = 0.0;  // min over eta of P(X >= 1 - alpha*eta) - eta
  double worst_eta = 0.0;
};

/// Checks the sufficient condition for a physical jump on the empirical
/// measure: P(X_{t-} >= 1 - alpha*eta) >= eta for all eta in [0, jump],
/// evaluated on `grid` equally spaced eta values. The empirical tail can
/// undershoot by its own resolution, so pass tolerates a margin of -1/N.
CriterionReport physical_criterion_check(const std::vector<double>& samples,
                                         double alpha, double jump,
                                         std::size_t grid);

}  // namespace ifc
