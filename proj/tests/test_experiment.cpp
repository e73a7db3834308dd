#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ifcascade/errors.hpp"
#include "ifcascade/experiment.hpp"

using namespace ifc;
namespace fs = std::filesystem;

namespace {

ExperimentSpec parse_string(const std::string& body) {
  std::istringstream in(body);
  return parse_experiment(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ifcascade_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("config document parsing") {
  const auto spec = parse_string(R"(
# particle run
mode = particles
n = 16
horizon = 0.5
dt = 0.001
alpha = 0.4
drift = affine:-1.0,0.5
init = uniform:0.0,0.8
epsilon0 = 0.2
noise_scale = 1
seed = 5
record_trajectories = true
record_limit = 4
seeds = 5,6
)");
  CHECK(spec.mode == ExperimentMode::Particles);
  CHECK(spec.sim.n == 16);
  CHECK(spec.sim.alpha == 0.4);
  CHECK(spec.sim.drift.kind == DriftSpec::Kind::Affine);
  CHECK(spec.sim.init.kind == InitialLaw::Kind::Uniform);
  CHECK(spec.sim.init.epsilon0 == 0.2);
  CHECK(spec.sim.record_limit == 4);
  CHECK(spec.seeds.size() == 2);
  spec.validate();
}

TEST_CASE("parse failures carry the offending field") {
  CHECK_THROWS_AS(parse_string("unknown_key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_string("n = abc"), ConfigError);
  CHECK_THROWS_AS(parse_string("drift = cubic:1"), ConfigError);
  CHECK_THROWS_AS(parse_string("init = beta:1,2"), ConfigError);
  CHECK_THROWS_AS(parse_string("mode = warp"), ConfigError);
  CHECK_THROWS_AS(parse_string("n 12"), ConfigError);
}

TEST_CASE("spec validation matches the mode") {
  auto sweep = parse_string("mode = sweep\nsweep_axis = n");
  CHECK_THROWS_AS(sweep.validate(), ConfigError);  // empty sweep list

  auto compare = parse_string("mode = compare");
  CHECK_THROWS_AS(compare.validate(), ConfigError);  // no reference

  auto check = parse_string("mode = cascade-check");
  CHECK_THROWS_AS(check.validate(), ConfigError);  // no potentials
}

TEST_CASE("cascade-check prints the resolved cascade") {
  const auto spec = parse_string(
      "mode = cascade-check\npotentials = 1.0,0.85,0.7,0.3\ncheck_alpha = "
      "0.8");
  std::ostringstream log;
  run_experiment(spec, log);
  const std::string text = log.str();
  CHECK(text.find("gamma size: 3") != std::string::npos);
  CHECK(text.find("inf formula: 3") != std::string::npos);
  CHECK(text.find("jump fraction: 0.75") != std::string::npos);
}

TEST_CASE("particle experiment writes byte-identical artifacts on rerun") {
  TempDir tmp;
  auto spec = parse_string(R"(
mode = particles
n = 24
horizon = 0.4
dt = 0.002
alpha = 0.7
drift = zero
init = uniform:0.3,0.85
epsilon0 = 0.15
seed = 11
record_trajectories = true
record_limit = 2
)");
  spec.out_dir = (tmp.path / "run").string();

  std::ostringstream log;
  run_experiment(spec, log);
  const auto ebar_first = slurp(tmp.path / "run" / "ebar.csv");
  const auto events_first = slurp(tmp.path / "run" / "events.jsonl");
  const auto jumps_first = slurp(tmp.path / "run" / "jumps.csv");
  const auto particle_first = slurp(tmp.path / "run" / "particle_0.csv");

  run_experiment(spec, log);
  CHECK(slurp(tmp.path / "run" / "ebar.csv") == ebar_first);
  CHECK(slurp(tmp.path / "run" / "events.jsonl") == events_first);
  CHECK(slurp(tmp.path / "run" / "jumps.csv") == jumps_first);
  CHECK(slurp(tmp.path / "run" / "particle_0.csv") == particle_first);

  // artifacts round-trip through the path reader
  const auto ebar = read_path_csv((tmp.path / "run" / "ebar.csv").string(),
                                  Interp::Step);
  CHECK(ebar.horizon() == 0.4);
  const auto z = read_path_csv((tmp.path / "run" / "particle_0.csv").string(),
                               Interp::Linear);
  CHECK(z.size() == ebar.size());
}

TEST_CASE("sweep experiment produces a convergence report") {
  TempDir tmp;
  auto spec = parse_string(R"(
mode = sweep
sweep_axis = n
sweep_values = 8,16
horizon = 0.3
dt = 0.002
alpha = 0.5
drift = zero
init = uniform:0.2,0.8
epsilon0 = 0.2
seeds = 3,4
threads = 2
)");
  spec.out_dir = (tmp.path / "sweep").string();
  std::ostringstream log;
  run_experiment(spec, log);

  CHECK(fs::exists(tmp.path / "sweep" / "n=8" / "seed_3" / "ebar.csv"));
  CHECK(fs::exists(tmp.path / "sweep" / "n=16" / "seed_4" / "ebar.csv"));
  const auto report = slurp(tmp.path / "sweep" / "report.json");
  CHECK(report.find("\"entries\"") != std::string::npos);
  CHECK(report.find("pointwise_gap") != std::string::npos);

  // reruns with a different worker count are byte-identical
  const auto ebar_first =
      slurp(tmp.path / "sweep" / "n=16" / "seed_3" / "ebar.csv");
  spec.threads = 1;
  run_experiment(spec, log);
  CHECK(slurp(tmp.path / "sweep" / "n=16" / "seed_3" / "ebar.csv") ==
        ebar_first);
  CHECK(slurp(tmp.path / "sweep" / "report.json") == report);
}

TEST_CASE("delayed experiment writes the firing map") {
  TempDir tmp;
  auto spec = parse_string(R"(
mode = delayed
delta = 0.1
replicas = 16
horizon = 0.5
dt = 0.002
alpha = 0.5
drift = constant:1.0
init = point:0.0
seed = 2
)");
  spec.out_dir = (tmp.path / "delayed").string();
  std::ostringstream log;
  run_experiment(spec, log);
  const auto e_delta = read_path_csv(
      (tmp.path / "delayed" / "e_delta.csv").string(), Interp::Linear);
  CHECK(e_delta.evaluate(0.05) == 0.0);
}

TEST_CASE("dry run reports derived quantities without writing") {
  TempDir tmp;
  auto spec = parse_string(R"(
mode = particles
n = 100
horizon = 1.0
dt = 0.01
alpha = 0.5
init = point:0.0
)");
  spec.out_dir = (tmp.path / "nothing").string();
  spec.dry_run = true;
  std::ostringstream log;
  run_experiment(spec, log);
  CHECK(log.str().find("grid steps: 100") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "nothing"));
}
