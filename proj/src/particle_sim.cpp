#include "ifcascade/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ifcascade/errors.hpp"

namespace ifc {

DriftSpec DriftSpec::constant(double c) {
  DriftSpec spec;
  spec.kind = Kind::Constant;
  spec.c0 = c;
  return spec;
}

DriftSpec DriftSpec::affine(double slope, double intercept) {
  DriftSpec spec;
  spec.kind = Kind::Affine;
  spec.c1 = slope;
  spec.c0 = intercept;
  return spec;
}

DriftSpec DriftSpec::piecewise_linear(std::vector<double> xs,
                                      std::vector<double> ys) {
  DriftSpec spec;
  spec.kind = Kind::PiecewiseLinear;
  spec.xs = std::move(xs);
  spec.ys = std::move(ys);
  spec.validate();
  return spec;
}

void DriftSpec::validate() const {
  if (kind != Kind::PiecewiseLinear) return;
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("piecewise drift needs >= 2 matching knots");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1])
      throw ConfigError("piecewise drift knots must increase");
}

double DriftSpec::lipschitz_constant() const {
  switch (kind) {
    case Kind::Zero:
    case Kind::Constant:
      return 0.0;
    case Kind::Affine:
      return std::fabs(c1);
    case Kind::PiecewiseLinear: {
      double k = 0.0;
      for (std::size_t i = 1; i < xs.size(); ++i)
        k = std::max(k, std::fabs((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])));
      return k;
    }
  }
  return 0.0;
}

double drift_eval(const DriftSpec& spec, double x) {
  if (x > 1.0) x = 1.0;  // b lives on (-infty, 1]
  switch (spec.kind) {
    case DriftSpec::Kind::Zero:
      return 0.0;
    case DriftSpec::Kind::Constant:
      return spec.c0;
    case DriftSpec::Kind::Affine:
      return spec.c1 * x + spec.c0;
    case DriftSpec::Kind::PiecewiseLinear: {
      if (x <= spec.xs.front()) return spec.ys.front();
      if (x >= spec.xs.back()) return spec.ys.back();
      auto it = std::upper_bound(spec.xs.begin(), spec.xs.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - spec.xs.begin());
      const double theta =
          (x - spec.xs[i - 1]) / (spec.xs[i] - spec.xs[i - 1]);
      return spec.ys[i - 1] + theta * (spec.ys[i] - spec.ys[i - 1]);
    }
  }
  return 0.0;
}

InitialLaw InitialLaw::point_mass(double x0, double epsilon0) {
  InitialLaw law;
  law.kind = Kind::PointMass;
  law.a = x0;
  law.epsilon0 = epsilon0;
  law.validate();
  return law;
}

InitialLaw InitialLaw::uniform(double lo, double hi, double epsilon0) {
  InitialLaw law;
  law.kind = Kind::Uniform;
  law.a = lo;
  law.b = hi;
  law.epsilon0 = epsilon0;
  law.validate();
  return law;
}

InitialLaw InitialLaw::truncated_gaussian(double mean, double sigma, double hi,
                                          double epsilon0) {
  InitialLaw law;
  law.kind = Kind::TruncatedGaussian;
  law.a = mean;
  law.b = sigma;
  law.hi = hi;
  law.epsilon0 = epsilon0;
  law.validate();
  return law;
}

InitialLaw InitialLaw::explicit_values(std::vector<double> xs,
                                       double epsilon0) {
  InitialLaw law;
  law.kind = Kind::Explicit;
  law.xs = std::move(xs);
  law.epsilon0 = epsilon0;
  law.validate();
  return law;
}

void InitialLaw::validate() const {
  if (!(epsilon0 > 0.0)) throw ConfigError("epsilon0 must be positive");
  const double bound = 1.0 - epsilon0;
  switch (kind) {
    case Kind::PointMass:
      if (a > bound) throw ConfigError("point mass above 1 - epsilon0");
      break;
    case Kind::Uniform:
      if (a > b) throw ConfigError("uniform law has lo > hi");
      if (b > bound)
        throw ConfigError("uniform law support exceeds 1 - epsilon0");
      break;
    case Kind::TruncatedGaussian:
      if (!(b > 0.0)) throw ConfigError("gaussian sigma must be positive");
      if (hi > bound)
        throw ConfigError("gaussian truncation exceeds 1 - epsilon0");
      break;
    case Kind::Explicit:
      if (xs.empty()) throw ConfigError("explicit initial list is empty");
      for (double x : xs)
        if (!std::isfinite(x) || x > bound)
          throw ConfigError("explicit initial value exceeds 1 - epsilon0");
      break;
  }
}

double sample_initial_one(const InitialLaw& law, Xoshiro256& rng,
                          std::size_t index) {
  switch (law.kind) {
    case InitialLaw::Kind::PointMass:
      return law.a;
    case InitialLaw::Kind::Uniform:
      return law.a + (law.b - law.a) * rng.next_uniform();
    case InitialLaw::Kind::TruncatedGaussian: {
      for (;;) {
        const double x = law.a + law.b * rng.next_normal();
        if (x <= law.hi) return x;
      }
    }
    case InitialLaw::Kind::Explicit:
      return law.xs[index % law.xs.size()];
  }
  return law.a;
}

std::vector<double> sample_initial(const InitialLaw& law, std::size_t n,
                                   std::uint64_t seed) {
  law.validate();
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    Xoshiro256 rng(seed, i);
    draws[i] = sample_initial_one(law, rng, i);
  }
  return draws;
}

void SimConfig::validate() const {
  if (n == 0) throw ConfigError("particle count must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (noise_scale < 0.0) throw ConfigError("noise scale must be >= 0");
  drift.validate();
  init.validate();
}

namespace {

std::vector<double> bin_histogram(const std::vector<double>& samples,
                                  double alpha) {
  const double lo = 1.0 - alpha - PreHistLayout::margin;
  const double width = (1.0 - lo) / static_cast<double>(PreHistLayout::bins);
  std::vector<double> hist(PreHistLayout::bins, 0.0);
  for (double x : samples) {
    auto b = static_cast<long>(std::floor((x - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(PreHistLayout::bins) - 1);
    hist[static_cast<std::size_t>(b)] += 1.0;
  }
  return hist;
}

}  // namespace

SimOutput run_particle_system(const SimConfig& config) {
  config.validate();
  const std::size_t n = config.n;
  const double dt = config.dt;
  const double horizon = config.horizon;
  const std::size_t n_rec =
      config.record_trajectories ? std::min(n, config.record_limit) : 0;

  std::vector<Xoshiro256> rng;
  rng.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rng.emplace_back(config.seed, i);

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = sample_initial_one(config.init, rng[i], i);

  std::vector<double> m(n, 0.0);
  std::vector<double> sup_abs_z(n);
  for (std::size_t i = 0; i < n; ++i) sup_abs_z[i] = std::fabs(x[i]);

  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> grid(steps + 1);
  grid[0] = 0.0;
  for (std::size_t k = 1; k <= steps; ++k)
    grid[k] = std::min(static_cast<double>(k) * dt, horizon);

  std::vector<double> ebar_values(steps + 1, 0.0);
  std::vector<std::vector<double>> z_rec(n_rec), m_rec(n_rec);
  std::vector<std::vector<std::size_t>> z_jump_idx(n_rec);
  std::vector<std::vector<double>> z_jump_left(n_rec);
  for (std::size_t i = 0; i < n_rec; ++i) {
    z_rec[i].reserve(steps + 1);
    z_rec[i].push_back(x[i]);
    m_rec[i].reserve(steps + 1);
    m_rec[i].push_back(0.0);
  }

  SimOutput out;
  out.n = n;
  out.alpha = config.alpha;
  out.dt = dt;

  SpikeState scratch;
  scratch.alpha = config.alpha;
  double total_spikes = 0.0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double h = grid[k + 1] - grid[k];
    const double sig = config.noise_scale * std::sqrt(h);
    bool any_at_threshold = false;
    for (std::size_t i = 0; i < n; ++i) {
      double xi = x[i] + drift_eval(config.drift, x[i]) * h;
      if (sig > 0.0) xi += sig * rng[i].next_normal();
      if (!std::isfinite(xi))
        throw SimRuntimeError("potential became non-finite", k);
      x[i] = xi;
      any_at_threshold |= (xi >= 1.0);
    }

    bool event_fired = false;
    std::vector<double> z_pre_rec(n_rec);  // honest pre-cascade left limits
    if (any_at_threshold) {
      scratch.potentials = x;
      for (std::size_t i = 0; i < n_rec; ++i) z_pre_rec[i] = x[i] + m[i];
      CascadeResult cascade = resolve_cascade(scratch);

      CascadeEvent event;
      event.time = grid[k + 1];
      event.step = k + 1;
      event.gamma_size = cascade.spike_count();
      event.jump_fraction = cascade.jump_fraction;
      event.delta_z = config.alpha * cascade.jump_fraction;
      event.round_sizes.reserve(cascade.rounds.size());
      for (const auto& round : cascade.rounds)
        event.round_sizes.push_back(round.size());
      event.pre_hist = bin_histogram(scratch.potentials, config.alpha);
      if (cascade.jump_fraction >= config.capture_fraction) {
        event.pre_samples = scratch.potentials;
        event.criterion_pass =
            physical_criterion_check(event.pre_samples, config.alpha,
                                     cascade.jump_fraction,
                                     config.criterion_grid)
                .pass;
      }

      for (std::size_t i : cascade.gamma) m[i] += 1.0;
      total_spikes += static_cast<double>(cascade.spike_count());
      event_fired = true;
      x = std::move(cascade.post_potentials);
      out.events.push_back(std::move(event));
    }

    ebar_values[k + 1] = total_spikes / static_cast<double>(n);
    for (std::size_t i = 0; i < n_rec; ++i) {
      const double z = x[i] + m[i];
      if (event_fired) {
        z_jump_idx[i].push_back(k + 1);
        z_jump_left[i].push_back(z_pre_rec[i]);
      }
      z_rec[i].push_back(z);
      m_rec[i].push_back(m[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
      sup_abs_z[i] = std::max(sup_abs_z[i], std::fabs(x[i] + m[i]));
  }

  double sum_sup = 0.0, sum_msq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_sup += sup_abs_z[i];
    sum_msq += m[i] * m[i];
  }
  out.mean_sup_abs_z = sum_sup / static_cast<double>(n);
  out.mean_m_terminal_sq = sum_msq / static_cast<double>(n);

  out.ebar = CadlagPath(grid, std::move(ebar_values), Interp::Step);
  out.z_paths.reserve(n_rec);
  out.m_paths.reserve(n_rec);
  for (std::size_t i = 0; i < n_rec; ++i) {
    out.z_paths.emplace_back(grid, std::move(z_rec[i]), Interp::Linear,
                             std::move(z_jump_idx[i]),
                             std::move(z_jump_left[i]));
    out.m_paths.emplace_back(grid, std::move(m_rec[i]), Interp::Step);
  }
  return out;
}

}  // namespace ifc
