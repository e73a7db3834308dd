#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ifcascade/errors.hpp"
#include "ifcascade/particle_sim.hpp"

using namespace ifc;

namespace {

SimConfig noisy_config() {
  SimConfig config;
  config.n = 32;
  config.horizon = 1.0;
  config.dt = 1e-3;
  config.alpha = 0.7;
  config.drift = DriftSpec::zero();
  config.init = InitialLaw::uniform(0.3, 0.85, 0.15);
  config.noise_scale = 1.0;
  config.seed = 99;
  config.record_trajectories = true;
  config.record_limit = 32;
  return config;
}

std::size_t grid_index(const CadlagPath& path, double t) {
  const auto& times = path.times();
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] == t) return i;
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("drift evaluation") {
  CHECK(drift_eval(DriftSpec::zero(), 3.0) == 0.0);
  CHECK(drift_eval(DriftSpec::constant(1.0), -3.0) == 1.0);
  CHECK(drift_eval(DriftSpec::affine(-1.0, 0.5), 0.5) == 0.0);
  // clamp at the threshold: b lives on (-infty, 1]
  CHECK(drift_eval(DriftSpec::affine(2.0, 0.0), 1.3) == 2.0);

  const auto pwl = DriftSpec::piecewise_linear({-1.0, 0.0, 1.0}, {0.0, 2.0, 1.0});
  CHECK(drift_eval(pwl, -0.5) == doctest::Approx(1.0));
  CHECK(drift_eval(pwl, 0.5) == doctest::Approx(1.5));
  CHECK(drift_eval(pwl, -5.0) == 0.0);  // constant extension
  CHECK(pwl.lipschitz_constant() == doctest::Approx(2.0));
  CHECK(DriftSpec::affine(-1.0, 0.5).lipschitz_constant() == 1.0);
}

TEST_CASE("initial sampling stays inside the admissible support") {
  SUBCASE("point mass") {
    const auto draws = sample_initial(InitialLaw::point_mass(0.0), 3, 1);
    CHECK(draws == std::vector<double>{0.0, 0.0, 0.0});
  }
  SUBCASE("uniform") {
    const auto draws =
        sample_initial(InitialLaw::uniform(0.0, 0.9, 0.1), 500, 7);
    for (double x : draws) {
      CHECK(x >= 0.0);
      CHECK(x <= 0.9);
    }
  }
  SUBCASE("truncated gaussian") {
    const auto draws = sample_initial(
        InitialLaw::truncated_gaussian(0.95, 0.1, 0.95, 0.05), 500, 7);
    for (double x : draws) CHECK(x <= 0.95);
  }
  SUBCASE("explicit values round robin") {
    const auto draws =
        sample_initial(InitialLaw::explicit_values({0.1, 0.2}), 3, 7);
    CHECK(draws == std::vector<double>{0.1, 0.2, 0.1});
  }
  SUBCASE("support violations are config errors") {
    CHECK_THROWS_AS(InitialLaw::uniform(0.0, 0.95, 0.1), ConfigError);
    CHECK_THROWS_AS(InitialLaw::point_mass(0.99, 0.1), ConfigError);
    CHECK_THROWS_AS(InitialLaw::truncated_gaussian(0.5, 0.1, 0.95, 0.1),
                    ConfigError);
  }
}

TEST_CASE("deterministic two-particle run reproduces the closed form") {
  SimConfig config;
  config.n = 2;
  config.horizon = 0.8;
  config.dt = 1e-4;
  config.alpha = 0.5;
  config.drift = DriftSpec::constant(1.0);
  config.init = InitialLaw::explicit_values({0.0, 0.5});
  config.noise_scale = 0.0;
  config.record_trajectories = true;

  const auto out = run_particle_system(config);
  REQUIRE(out.events.size() == 2);

  // particle 2 hits the barrier at t = 0.5, gets no companion
  CHECK(std::fabs(out.events[0].time - 0.5) <= config.dt + 1e-9);
  CHECK(out.events[0].gamma_size == 1);
  // particle 1 (kicked to 0.75 at the first event) hits at t = 0.75
  CHECK(std::fabs(out.events[1].time - 0.75) <= config.dt + 1e-9);
  CHECK(out.events[1].gamma_size == 1);

  // ebar steps 0 -> 0.5 -> 1.0
  CHECK(out.ebar.evaluate(0.25) == 0.0);
  CHECK(out.ebar.evaluate(0.6) == doctest::Approx(0.5));
  CHECK(out.ebar.evaluate(0.8) == doctest::Approx(1.0));

  // post-cascade state of the first event: (0.75, 0.25), so Z = (0.75, 1.25)
  const double t1 = out.events[0].time;
  CHECK(out.z_paths[0].evaluate(t1) == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(out.z_paths[1].evaluate(t1) == doctest::Approx(1.25).epsilon(1e-3));
  // and of the second: (0.25, 0.75), so Z = (1.25, 1.75)
  const double t2 = out.events[1].time;
  CHECK(out.z_paths[0].evaluate(t2) == doctest::Approx(1.25).epsilon(1e-3));
  CHECK(out.z_paths[1].evaluate(t2) == doctest::Approx(1.75).epsilon(1e-3));
}

TEST_CASE("single particle below the barrier never spikes") {
  SimConfig config;
  config.n = 1;
  config.horizon = 1.0;
  config.dt = 1e-3;
  config.alpha = 0.5;
  config.drift = DriftSpec::zero();
  config.init = InitialLaw::point_mass(0.5);
  config.noise_scale = 0.0;
  config.record_trajectories = true;

  const auto out = run_particle_system(config);
  CHECK(out.events.empty());
  CHECK(out.ebar.evaluate(1.0) == 0.0);
  CHECK(out.z_paths[0].evaluate(1.0) == 0.5);
}

TEST_CASE("physical selection: only the leading particle spikes") {
  SimConfig config;
  config.n = 3;
  config.horizon = 0.002;
  config.dt = 1e-5;
  config.alpha = 0.9;
  config.drift = DriftSpec::constant(1.0);
  config.init = InitialLaw::explicit_values({0.999, 0.549, 0.519}, 5e-4);
  config.noise_scale = 0.0;

  const auto out = run_particle_system(config);
  REQUIRE(!out.events.empty());
  const auto& first = out.events[0];
  CHECK(first.gamma_size == 1);
  CHECK(first.round_sizes == std::vector<std::size_t>{1});
  CHECK(out.ebar.evaluate(first.time) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("identical seeds give bit-identical outputs") {
  const auto a = run_particle_system(noisy_config());
  const auto b = run_particle_system(noisy_config());
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t e = 0; e < a.events.size(); ++e) {
    CHECK(a.events[e].time == b.events[e].time);
    CHECK(a.events[e].gamma_size == b.events[e].gamma_size);
  }
  REQUIRE(a.ebar.size() == b.ebar.size());
  for (std::size_t i = 0; i < a.ebar.size(); ++i)
    CHECK(a.ebar.values()[i] == b.ebar.values()[i]);
  for (std::size_t p = 0; p < a.z_paths.size(); ++p)
    for (std::size_t i = 0; i < a.z_paths[p].size(); ++i)
      CHECK(a.z_paths[p].values()[i] == b.z_paths[p].values()[i]);

  auto different = noisy_config();
  different.seed += 1;
  const auto c = run_particle_system(different);
  bool identical = a.events.size() == c.events.size();
  if (identical)
    for (std::size_t i = 0; i < a.ebar.size(); ++i)
      identical = identical && a.ebar.values()[i] == c.ebar.values()[i];
  CHECK_FALSE(identical);
}

TEST_CASE("Z increments at events are common to all particles") {
  const auto out = run_particle_system(noisy_config());
  REQUIRE(!out.events.empty());
  for (const auto& event : out.events) {
    const std::size_t idx = grid_index(out.ebar, event.time);
    const double ebar_jump =
        out.ebar.values()[idx] - out.ebar.values()[idx - 1];
    CHECK(std::fabs(ebar_jump - event.jump_fraction) <= 1e-12);
    CHECK(event.jump_fraction <= 1.0);
    for (const auto& z : out.z_paths) {
      REQUIRE(z.is_jump(idx));
      const double dz = z.values()[idx] - z.left_value(idx);
      CHECK(std::fabs(dz - out.alpha * ebar_jump) <= 1e-12);
    }
  }
}

TEST_CASE("recorded counting paths equal the counting map of Z") {
  const auto out = run_particle_system(noisy_config());
  REQUIRE(!out.z_paths.empty());
  double total = 0.0;
  for (std::size_t p = 0; p < out.z_paths.size(); ++p) {
    const auto mapped = counting_map(out.z_paths[p]);
    const auto& grid = out.m_paths[p].times();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      INFO("particle=", p, " t=", grid[i]);
      CHECK(mapped.evaluate(grid[i]) == out.m_paths[p].values()[i]);
    }
    total += out.m_paths[p].values().back();
  }
  CHECK(total > 0.0);  // the identity is vacuous without spikes
}

TEST_CASE("ebar is a counting-style step path") {
  const auto out = run_particle_system(noisy_config());
  const auto& v = out.ebar.values();
  const double n = static_cast<double>(out.n);
  for (std::size_t i = 1; i < v.size(); ++i) {
    CHECK(v[i] >= v[i - 1]);
    const double counts = v[i] * n;
    CHECK(std::fabs(counts - std::round(counts)) < 1e-9);
  }
  CHECK(out.mean_sup_abs_z > 0.0);
  CHECK(out.mean_m_terminal_sq >= 0.0);
}

TEST_CASE("configuration validation") {
  SimConfig config = noisy_config();
  config.dt = 0.0;
  CHECK_THROWS_AS(run_particle_system(config), ConfigError);
  config = noisy_config();
  config.alpha = 1.0;
  CHECK_THROWS_AS(run_particle_system(config), ConfigError);
  config = noisy_config();
  config.n = 0;
  CHECK_THROWS_AS(run_particle_system(config), ConfigError);
}
