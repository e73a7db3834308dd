#pragma once

#include <cstdint>
#include <vector>

#include "ifcascade/cascade.hpp"
#include "ifcascade/paths.hpp"
#include "ifcascade/rng.hpp"

namespace ifc {

/// Drift b on (-infty, 1], globally Lipschitz. Evaluation clamps x to 1:
/// potentials can overshoot the barrier transiently on a discrete grid and b
/// is only defined up to the threshold.
struct DriftSpec {
  enum class Kind { Zero, Constant, Affine, PiecewiseLinear };

  Kind kind = Kind::Zero;
  double c0 = 0.0;  // Constant value, or Affine intercept
  double c1 = 0.0;  // Affine slope
  std::vector<double> xs, ys;  // PiecewiseLinear knots, xs strictly increasing

  static DriftSpec zero() { return {}; }
  static DriftSpec constant(double c);
  static DriftSpec affine(double slope, double intercept);
  static DriftSpec piecewise_linear(std::vector<double> xs,
                                    std::vector<double> ys);

  double lipschitz_constant() const;
  void validate() const;
};

double drift_eval(const DriftSpec& spec, double x);

/// Initial law with support in (-infty, 1 - epsilon0]. The Explicit kind
/// assigns listed values round-robin by particle index, for deterministic
/// oracle runs with hand-picked starting potentials.
struct InitialLaw {
  enum class Kind { PointMass, Uniform, TruncatedGaussian, Explicit };

  Kind kind = Kind::PointMass;
  double a = 0.0;  // point value / uniform lo / gaussian mean
  double b = 0.0;  // uniform hi / gaussian sigma
  double hi = 0.0;  // gaussian truncation bound
  std::vector<double> xs;  // explicit values
  double epsilon0 = 0.1;

  static InitialLaw point_mass(double x0, double epsilon0 = 0.1);
  static InitialLaw uniform(double lo, double hi, double epsilon0 = 0.1);
  static InitialLaw truncated_gaussian(double mean, double sigma, double hi,
                                       double epsilon0 = 0.1);
  static InitialLaw explicit_values(std::vector<double> xs,
                                    double epsilon0 = 1e-3);

  void validate() const;
};

/// One draw from the law using the given substream; `index` selects the slot
/// of an Explicit law and is ignored otherwise.
double sample_initial_one(const InitialLaw& law, Xoshiro256& rng,
                          std::size_t index = 0);

/// n i.i.d. draws, particle i reading substream (seed, i). Matches the draws
/// run_particle_system makes, so an initial condition can be reproduced
/// standalone.
std::vector<double> sample_initial(const InitialLaw& law, std::size_t n,
                                   std::uint64_t seed);

struct SimConfig {
  std::size_t n = 0;
  double horizon = 0.0;
  double dt = 0.0;
  double alpha = 0.0;
  DriftSpec drift;
  InitialLaw init;
  double noise_scale = 1.0;  // 1 = the model's unit noise; 0 = deterministic
  std::uint64_t seed = 0;
  bool record_trajectories = false;
  std::size_t record_limit = 128;  // per-particle paths kept when recording
  double capture_fraction = 0.04;  // keep raw pre-cascade samples above this
  std::size_t criterion_grid = 200;

  void validate() const;
};

/// One resolved cascade with its grid timestamp and pre-cascade summary.
struct CascadeEvent {
  double time = 0.0;
  std::size_t step = 0;
  std::size_t gamma_size = 0;
  double jump_fraction = 0.0;
  double delta_z = 0.0;  // common Z increment alpha*|Gamma|/N
  std::vector<std::size_t> round_sizes;
  std::vector<double> pre_hist;     // fixed-bin histogram of X_{t-}
  std::vector<double> pre_samples;  // raw X_{t-}, kept for macroscopic events
  bool criterion_pass = true;
};

struct SimOutput {
  std::size_t n = 0;
  double alpha = 0.0;
  double dt = 0.0;
  CadlagPath ebar;  // empirical firing map, step path on the grid
  std::vector<CascadeEvent> events;
  std::vector<CadlagPath> z_paths;  // recorded subset, piecewise linear
  std::vector<CadlagPath> m_paths;  // matching counting paths
  double mean_sup_abs_z = 0.0;      // across all particles
  double mean_m_terminal_sq = 0.0;
};

/// Histogram layout used for CascadeEvent::pre_hist: `bins` uniform bins on
/// [1 - alpha - margin, 1], outliers clamped into the end bins.
struct PreHistLayout {
  static constexpr std::size_t bins = 40;
  static constexpr double margin = 0.25;
};

/// Euler-Maruyama time stepping with exact cascade resolution at every grid
/// point where some potential reaches the threshold. Fully deterministic
/// given (config, seed); each particle consumes its own counter-derived
/// substream, so results do not depend on how particles are partitioned
/// across workers.
SimOutput run_particle_system(const SimConfig& config);

}  // namespace ifc
