#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifcascade/errors.hpp"
#include "ifcascade/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::size_t threads = 0;
  bool dry_run = false;
};

void attach_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path,
                              "flat key = value config document");
  if (config_required) opt->required();
  cmd->add_option("--out-dir", flags.out_dir, "artifact directory");
  cmd->add_option("--seeds", flags.seeds, "comma-separated seed list");
  cmd->add_option("--threads", flags.threads, "worker pool size");
  cmd->add_flag("--dry-run", flags.dry_run,
                "print the resolved config and derived quantities");
}

ifc::ExperimentSpec resolve(const CommonFlags& flags,
                            ifc::ExperimentMode mode) {
  ifc::ExperimentSpec spec = ifc::parse_experiment_file(flags.config_path);
  spec.mode = mode;
  if (!flags.out_dir.empty()) spec.out_dir = flags.out_dir;
  if (!flags.seeds.empty()) {
    spec.seeds.clear();
    std::size_t start = 0;
    while (start <= flags.seeds.size()) {
      const auto comma = flags.seeds.find(',', start);
      const std::string item =
          flags.seeds.substr(start, comma == std::string::npos
                                        ? std::string::npos
                                        : comma - start);
      if (!item.empty()) spec.seeds.push_back(std::stoull(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (flags.threads > 0) spec.threads = flags.threads;
  spec.dry_run = flags.dry_run;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-driven simulator for the mean-field integrate-and-fire "
               "model with exact spike cascades"};
  app.require_subcommand(1);

  CommonFlags particles_flags, delayed_flags, sweep_flags, compare_flags,
      check_flags;
  attach_common(app.add_subcommand("simulate-particles",
                                   "run the N-particle system"),
                particles_flags, true);
  attach_common(app.add_subcommand("simulate-delayed",
                                   "run the delayed nonlinear equation"),
                delayed_flags, true);
  attach_common(app.add_subcommand("sweep", "run a grid over N or delta"),
                sweep_flags, true);
  attach_common(app.add_subcommand("compare",
                                   "convergence report for stored curves"),
                compare_flags, true);
  attach_common(app.add_subcommand("cascade-check",
                                   "resolve one cascade state and check the "
                                   "inf formula"),
                check_flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    ifc::ExperimentSpec spec;
    if (app.got_subcommand("simulate-particles"))
      spec = resolve(particles_flags, ifc::ExperimentMode::Particles);
    else if (app.got_subcommand("simulate-delayed"))
      spec = resolve(delayed_flags, ifc::ExperimentMode::Delayed);
    else if (app.got_subcommand("sweep"))
      spec = resolve(sweep_flags, ifc::ExperimentMode::Sweep);
    else if (app.got_subcommand("compare"))
      spec = resolve(compare_flags, ifc::ExperimentMode::Compare);
    else
      spec = resolve(check_flags, ifc::ExperimentMode::CascadeCheck);
    ifc::run_experiment(spec, std::cout);
  } catch (const ifc::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "runtime error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
