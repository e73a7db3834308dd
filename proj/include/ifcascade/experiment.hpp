#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ifcascade/delayed_sim.hpp"
#include "ifcascade/particle_sim.hpp"

namespace ifc {

enum class ExperimentMode { Particles, Delayed, Sweep, Compare, CascadeCheck };

/// Fully resolved experiment: one flat key = value document, no inheritance.
struct ExperimentSpec {
  ExperimentMode mode = ExperimentMode::Particles;
  SimConfig sim;
  DelayedConfig delayed;

  std::string sweep_axis;  // "n" or "delta"
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds;  // empty -> the config seed alone
  std::string out_dir = ".";
  std::size_t threads = 1;
  bool dry_run = false;
  double jump_threshold = 0.05;

  // cascade-check inputs
  std::vector<double> check_potentials;
  double check_alpha = 0.0;

  // compare inputs
  std::string reference_path;
  Interp reference_interp = Interp::Step;
  std::vector<std::string> input_paths;
  Interp inputs_interp = Interp::Step;

  void validate() const;
};

/// Parses the flat key = value config document ('#' starts a comment).
/// Unknown keys and malformed values raise ConfigError with the field name.
ExperimentSpec parse_experiment(std::istream& in);
ExperimentSpec parse_experiment_file(const std::string& filename);

/// Executes the experiment and writes all artifacts under spec.out_dir.
/// Reruns of the same (spec, seeds) overwrite byte-identically regardless of
/// the worker count. Throws ConfigError for invalid specs (CLI exit 2) and
/// SimRuntimeError for numerical failures (CLI exit 3).
void run_experiment(const ExperimentSpec& spec, std::ostream& log);

/// Artifact writers shared by the run modes.
void write_events_jsonl(const SimOutput& run, const std::string& filename);
void write_jumps_csv(const SimOutput& run, double threshold,
                     const std::string& filename);

}  // namespace ifc
