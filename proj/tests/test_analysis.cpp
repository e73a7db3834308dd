#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ifcascade/analysis.hpp"

using namespace ifc;

namespace {

SimOutput blowup_run() {
  SimConfig config;
  config.n = 200;
  config.horizon = 0.3;
  config.dt = 1e-3;
  config.alpha = 0.9;
  config.init = InitialLaw::truncated_gaussian(0.93, 0.05, 0.98, 0.02);
  config.noise_scale = 1.0;
  config.seed = 17;
  return run_particle_system(config);
}

// linear ramp of slope c with one explicit jump of `size` at time 1
CadlagPath ramp_with_jump(double c, double size, double horizon, double dt) {
  std::vector<double> times, values;
  std::vector<std::size_t> jump_idx;
  std::vector<double> jump_left;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = dt * static_cast<double>(i);
    times.push_back(t);
    values.push_back(c * t + (t >= 1.0 ? size : 0.0));
    if (t == 1.0) {
      jump_idx.push_back(i);
      jump_left.push_back(c * t);
    }
  }
  return CadlagPath(times, values, Interp::Linear, jump_idx, jump_left);
}

}  // namespace

TEST_CASE("jump detection on synthetic curves") {
  CHECK(detect_jumps(CadlagPath::constant(0.0, 1.0), 0.05).empty());

  const CadlagPath one_jump({0.0, 0.4, 1.0}, {0.0, 0.6, 0.6}, Interp::Step);
  const auto events = detect_jumps(one_jump, 0.05);
  REQUIRE(events.size() == 1);
  CHECK(events[0].time == 0.4);
  CHECK(events[0].size == doctest::Approx(0.6));

  // a smooth slope never trips the detector
  const CadlagPath smooth({0.0, 0.5, 1.0}, {0.0, 0.01, 0.02}, Interp::Linear);
  CHECK(detect_jumps(smooth, 0.05).empty());

  const CadlagPath decreasing({0.0, 1.0}, {1.0, 0.0}, Interp::Linear);
  CHECK_THROWS_AS(detect_jumps(decreasing, 0.05), std::domain_error);
  CHECK_THROWS_AS(detect_jumps(smooth, 0.0), std::domain_error);
}

TEST_CASE("jump detection cross-checks the cascade log") {
  const auto run = blowup_run();
  const auto events = detect_jumps(run, 0.05);
  REQUIRE(!events.empty());
  for (const auto& event : events) {
    CHECK(event.size > 0.05);
    CHECK(event.size <= 1.0);
    CHECK(event.has_samples);
    CHECK(event.pre_samples.size() == run.n);
    bool logged = false;
    for (const auto& log_entry : run.events)
      logged = logged || (log_entry.time == event.time &&
                          log_entry.jump_fraction == event.size);
    CHECK(logged);
  }
}

TEST_CASE("physical jump verification") {
  SUBCASE("the four-particle cascade verifies") {
    JumpEvent event;
    event.time = 0.1;
    event.size = 0.75;
    event.pre_samples = {1.0, 0.85, 0.7, 0.3};
    event.has_samples = true;
    const auto report = verify_physical_jump(event, 0.8);
    CHECK(report.pass);
    CHECK(report.recomputed == doctest::Approx(0.75));
  }
  SUBCASE("zero-size events pass vacuously") {
    JumpEvent event;
    event.size = 0.0;
    CHECK(verify_physical_jump(event, 0.8).pass);
  }
  SUBCASE("mass far from the threshold fails") {
    JumpEvent event;
    event.size = 0.5;
    event.pre_samples = std::vector<double>(50, 0.0);
    event.has_samples = true;
    const auto report = verify_physical_jump(event, 0.5);
    CHECK_FALSE(report.pass);
  }
  SUBCASE("missing samples are unverifiable") {
    JumpEvent event;
    event.size = 0.5;
    const auto report = verify_physical_jump(event, 0.5);
    CHECK(report.unverifiable);
    CHECK_FALSE(report.pass);
  }
  SUBCASE("macroscopic jumps of a blow-up run verify") {
    const auto run = blowup_run();
    const auto events = detect_jumps(run, 0.05);
    REQUIRE(!events.empty());
    for (const auto& event : events)
      CHECK(verify_physical_jump(event, run.alpha).pass);
  }
}

TEST_CASE("firing rate estimation") {
  SUBCASE("linear input returns its slope") {
    const CadlagPath e({0.0, 1.0, 2.0}, {0.0, 0.3, 0.6}, Interp::Linear);
    const auto result = firing_rate(e, 0.1);
    CHECK(result.jump_times.empty());
    for (double t = 0.0; t <= 2.0; t += 0.2)
      CHECK(result.rate.evaluate(t) == doctest::Approx(0.3));
  }
  SUBCASE("flat input has zero rate") {
    const auto result = firing_rate(CadlagPath::constant(0.0, 1.0), 0.1);
    CHECK(result.rate.evaluate(0.5) == 0.0);
  }
  SUBCASE("a pure step is flagged and contributes no rate") {
    std::vector<double> times, values;
    for (int i = 0; i <= 100; ++i) {
      times.push_back(i / 50.0);
      values.push_back(times.back() >= 1.0 ? 0.4 : 0.0);
    }
    const CadlagPath e(times, values, Interp::Step);
    const auto result = firing_rate(e, 0.1);
    REQUIRE(result.jump_times.size() == 1);
    CHECK(result.jump_times[0] == doctest::Approx(1.0));
    for (double t = 0.0; t <= 2.0; t += 0.1)
      CHECK(result.rate.evaluate(t) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("rate integrates back to the continuous part") {
    const double bandwidth = 0.05;
    const auto e = ramp_with_jump(0.3, 0.2, 2.0, 0.01);
    const auto result = firing_rate(e, bandwidth);
    REQUIRE(result.jump_times.size() == 1);

    const auto& t = result.rate.times();
    const auto& r = result.rate.values();
    double integral = 0.0, max_rate = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      integral += 0.5 * (r[i] + r[i - 1]) * (t[i] - t[i - 1]);
      max_rate = std::max(max_rate, std::fabs(r[i]));
    }
    const double continuous_part = e.evaluate(2.0) - e.evaluate(0.0) - 0.2;
    CHECK(std::fabs(integral - continuous_part) <=
          2.0 * bandwidth * max_rate + 1e-9);
  }
}

TEST_CASE("convergence report") {
  const auto run = blowup_run();
  const CadlagPath& reference = run.ebar;

  std::vector<LabeledCurve> curves;
  curves.push_back({"n=200", 200.0, 1, reference});
  curves.push_back({"n=200", 200.0, 2, reference});
  auto perturbed = reference.values();
  for (auto& v : perturbed) v += 0.01;
  curves.push_back({"n=50", 50.0, 1,
                    CadlagPath(reference.times(), perturbed, Interp::Step)});

  const auto report = convergence_report(curves, reference);
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].label == "n=50");  // sorted by axis value
  CHECK(report.entries[1].label == "n=200");
  CHECK(report.entries[1].seeds == 2);
  CHECK(report.entries[1].mean_pointwise_gap == 0.0);
  CHECK(report.entries[1].mean_m1_gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.entries[0].mean_pointwise_gap == doctest::Approx(0.01));

  CHECK_THROWS_AS(convergence_report({curves[0]}, reference),
                  std::domain_error);
}
