#include "ifcascade/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ifcascade/analysis.hpp"
#include "ifcascade/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ifc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(trim(s.substr(start)));
      break;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': cannot parse number '" + value +
                      "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': cannot parse integer '" + value +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("field '" + key + "': expected true/false, got '" + value +
                    "'");
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> xs;
  for (const auto& item : split(value, ','))
    if (!item.empty()) xs.push_back(parse_double(key, item));
  return xs;
}

DriftSpec parse_drift(const std::string& value) {
  if (value == "zero") return DriftSpec::zero();
  const auto colon = value.find(':');
  const std::string kind = value.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : value.substr(colon + 1);
  if (kind == "constant") return DriftSpec::constant(parse_double("drift", args));
  if (kind == "affine") {
    const auto parts = split(args, ',');
    if (parts.size() != 2)
      throw ConfigError("field 'drift': affine needs slope,intercept");
    return DriftSpec::affine(parse_double("drift", parts[0]),
                             parse_double("drift", parts[1]));
  }
  if (kind == "pwl") {
    std::vector<double> xs, ys;
    for (const auto& knot : split(args, ';')) {
      const auto xy = split(knot, ',');
      if (xy.size() != 2) throw ConfigError("field 'drift': pwl knot needs x,y");
      xs.push_back(parse_double("drift", xy[0]));
      ys.push_back(parse_double("drift", xy[1]));
    }
    return DriftSpec::piecewise_linear(std::move(xs), std::move(ys));
  }
  throw ConfigError("field 'drift': unknown kind '" + value + "'");
}

InitialLaw parse_init(const std::string& value, double epsilon0) {
  const auto colon = value.find(':');
  const std::string kind = value.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : value.substr(colon + 1);
  const auto parts = split(args, ',');
  if (kind == "point") {
    if (parts.size() != 1) throw ConfigError("field 'init': point needs x0");
    return InitialLaw::point_mass(parse_double("init", parts[0]), epsilon0);
  }
  if (kind == "uniform") {
    if (parts.size() != 2) throw ConfigError("field 'init': uniform needs lo,hi");
    return InitialLaw::uniform(parse_double("init", parts[0]),
                               parse_double("init", parts[1]), epsilon0);
  }
  if (kind == "tgauss") {
    if (parts.size() != 3)
      throw ConfigError("field 'init': tgauss needs mean,sigma,hi");
    return InitialLaw::truncated_gaussian(parse_double("init", parts[0]),
                                          parse_double("init", parts[1]),
                                          parse_double("init", parts[2]),
                                          epsilon0);
  }
  if (kind == "explicit") {
    std::vector<double> xs;
    for (const auto& item : split(args, ';'))
      if (!item.empty()) xs.push_back(parse_double("init", item));
    return InitialLaw::explicit_values(std::move(xs), epsilon0);
  }
  throw ConfigError("field 'init': unknown kind '" + value + "'");
}

}  // namespace

void ExperimentSpec::validate() const {
  switch (mode) {
    case ExperimentMode::Particles:
      sim.validate();
      break;
    case ExperimentMode::Delayed:
      delayed.validate();
      break;
    case ExperimentMode::Sweep: {
      if (sweep_axis != "n" && sweep_axis != "delta")
        throw ConfigError("sweep_axis must be 'n' or 'delta'");
      if (sweep_values.empty()) throw ConfigError("sweep_values is empty");
      if (sweep_axis == "n")
        sim.validate();
      else
        delayed.validate();
      break;
    }
    case ExperimentMode::Compare:
      if (reference_path.empty()) throw ConfigError("reference path missing");
      if (input_paths.empty()) throw ConfigError("input path list is empty");
      break;
    case ExperimentMode::CascadeCheck:
      if (check_potentials.empty())
        throw ConfigError("cascade-check needs a potentials list");
      if (!(check_alpha > 0.0 && check_alpha < 1.0))
        throw ConfigError("cascade-check needs alpha in (0, 1)");
      break;
  }
  if (!(jump_threshold > 0.0 && jump_threshold < 1.0))
    throw ConfigError("jump_threshold must lie in (0, 1)");
  if (threads == 0) throw ConfigError("threads must be positive");
}

ExperimentSpec parse_experiment(std::istream& in) {
  ExperimentSpec spec;
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  double epsilon0 = 0.1;
  if (auto it = kv.find("epsilon0"); it != kv.end())
    epsilon0 = parse_double("epsilon0", it->second);

  for (const auto& [key, value] : kv) {
    if (key == "mode") {
      if (value == "particles")
        spec.mode = ExperimentMode::Particles;
      else if (value == "delayed")
        spec.mode = ExperimentMode::Delayed;
      else if (value == "sweep")
        spec.mode = ExperimentMode::Sweep;
      else if (value == "compare")
        spec.mode = ExperimentMode::Compare;
      else if (value == "cascade-check")
        spec.mode = ExperimentMode::CascadeCheck;
      else
        throw ConfigError("field 'mode': unknown mode '" + value + "'");
    } else if (key == "n") {
      spec.sim.n = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "horizon") {
      spec.sim.horizon = spec.delayed.horizon = parse_double(key, value);
    } else if (key == "dt") {
      spec.sim.dt = spec.delayed.dt = parse_double(key, value);
    } else if (key == "alpha") {
      spec.sim.alpha = spec.delayed.alpha = parse_double(key, value);
    } else if (key == "noise_scale") {
      spec.sim.noise_scale = spec.delayed.noise_scale =
          parse_double(key, value);
    } else if (key == "seed") {
      spec.sim.seed = spec.delayed.seed = parse_u64(key, value);
    } else if (key == "drift") {
      spec.sim.drift = spec.delayed.drift = parse_drift(value);
    } else if (key == "init") {
      spec.sim.init = spec.delayed.init = parse_init(value, epsilon0);
    } else if (key == "epsilon0") {
      // consumed above, before the init law is parsed
    } else if (key == "record_trajectories") {
      spec.sim.record_trajectories = parse_bool(key, value);
    } else if (key == "record_limit") {
      spec.sim.record_limit = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "capture_fraction") {
      spec.sim.capture_fraction = parse_double(key, value);
    } else if (key == "delta") {
      spec.delayed.delta = parse_double(key, value);
    } else if (key == "replicas") {
      spec.delayed.replicas = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "record_replicas") {
      spec.delayed.record_replicas =
          static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "sweep_axis") {
      spec.sweep_axis = value;
    } else if (key == "sweep_values") {
      spec.sweep_values = parse_double_list(key, value);
    } else if (key == "seeds") {
      for (const auto& item : split(value, ','))
        if (!item.empty()) spec.seeds.push_back(parse_u64(key, item));
    } else if (key == "out_dir") {
      spec.out_dir = value;
    } else if (key == "threads") {
      spec.threads = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "jump_threshold") {
      spec.jump_threshold = parse_double(key, value);
    } else if (key == "potentials") {
      spec.check_potentials = parse_double_list(key, value);
    } else if (key == "check_alpha") {
      spec.check_alpha = parse_double(key, value);
    } else if (key == "reference") {
      spec.reference_path = value;
    } else if (key == "reference_interp") {
      spec.reference_interp = (value == "linear") ? Interp::Linear
                                                  : Interp::Step;
    } else if (key == "inputs") {
      for (const auto& item : split(value, ','))
        if (!item.empty()) spec.input_paths.push_back(item);
    } else if (key == "inputs_interp") {
      spec.inputs_interp = (value == "linear") ? Interp::Linear : Interp::Step;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  // cascade-check reuses the shared alpha when no dedicated one is given
  if (spec.mode == ExperimentMode::CascadeCheck && spec.check_alpha == 0.0)
    spec.check_alpha = spec.sim.alpha;
  return spec;
}

ExperimentSpec parse_experiment_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError("cannot open config file " + filename);
  return parse_experiment(in);
}

void write_events_jsonl(const SimOutput& run, const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename);
  for (const auto& event : run.events) {
    json record;
    record["t"] = event.time;
    record["gamma_size"] = event.gamma_size;
    record["jump_fraction"] = event.jump_fraction;
    record["rounds"] = event.round_sizes;
    record["pre_hist"] = event.pre_hist;
    record["criterion_pass"] = event.criterion_pass;
    out << record.dump() << '\n';
  }
}

void write_jumps_csv(const SimOutput& run, double threshold,
                     const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename);
  out << "t,size,criterion_pass\n";
  char buf[80];
  for (const auto& jump : detect_jumps(run, threshold)) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", jump.time, jump.size,
                  jump.criterion_pass ? 1 : 0);
    out << buf;
  }
}

namespace {

json report_to_json(const ConvergenceReport& report) {
  json j;
  j["reference_horizon"] = report.reference_horizon;
  j["jump_threshold"] = report.options.jump_threshold;
  j["exclusion_window"] = report.options.exclusion_window;
  j["m1_resolution"] = report.options.m1_resolution;
  j["entries"] = json::array();
  for (const auto& entry : report.entries) {
    json e;
    e["label"] = entry.label;
    e["axis_value"] = entry.axis_value;
    e["seeds"] = entry.seeds;
    e["pointwise_gap"] = entry.mean_pointwise_gap;
    e["pointwise_se"] = entry.se_pointwise;
    e["m1_gap"] = entry.mean_m1_gap;
    e["m1_se"] = entry.se_m1;
    e["jump_times"] = entry.jump_times;
    e["jump_sizes"] = entry.jump_sizes;
    j["entries"].push_back(e);
  }
  return j;
}

void write_text_file(const std::string& filename, const std::string& body) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename);
  out << body;
}

SimConfig with_n(SimConfig base, std::size_t n, std::uint64_t seed) {
  base.n = n;
  base.seed = seed;
  return base;
}

void write_particle_artifacts(const SimOutput& run, double jump_threshold,
                              const fs::path& dir) {
  fs::create_directories(dir);
  write_path_csv(run.ebar, (dir / "ebar.csv").string());
  write_events_jsonl(run, (dir / "events.jsonl").string());
  write_jumps_csv(run, jump_threshold, (dir / "jumps.csv").string());
  for (std::size_t i = 0; i < run.z_paths.size(); ++i)
    write_path_csv(run.z_paths[i],
                   (dir / ("particle_" + std::to_string(i) + ".csv")).string());
}

void run_jobs(std::size_t threads, std::size_t count,
              const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, count);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string describe_dry_run(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "mode resolved; derived quantities:\n";
  if (spec.mode == ExperimentMode::Particles ||
      (spec.mode == ExperimentMode::Sweep && spec.sweep_axis == "n")) {
    const std::size_t steps =
        static_cast<std::size_t>(std::ceil(spec.sim.horizon / spec.sim.dt));
    out << "  grid steps: " << steps << "\n";
    out << "  particles: " << spec.sim.n << "\n";
    const double mib =
        static_cast<double>(spec.sim.n) * 8.0 * 3.0 / (1024.0 * 1024.0) +
        (spec.sim.record_trajectories
             ? static_cast<double>(
                   std::min(spec.sim.n, spec.sim.record_limit)) *
                   static_cast<double>(steps) * 16.0 / (1024.0 * 1024.0)
             : 0.0);
    out << "  est. memory: " << mib << " MiB\n";
    out << "  lipschitz K: " << spec.sim.drift.lipschitz_constant() << "\n";
  }
  if (spec.mode == ExperimentMode::Delayed ||
      (spec.mode == ExperimentMode::Sweep && spec.sweep_axis == "delta")) {
    const std::size_t steps = static_cast<std::size_t>(
        std::ceil(spec.delayed.horizon / spec.delayed.dt));
    out << "  grid steps: " << steps << "\n";
    out << "  replicas: " << spec.delayed.replicas << "\n";
    out << "  windows: "
        << static_cast<std::size_t>(
               std::ceil(spec.delayed.horizon / spec.delayed.delta))
        << "\n";
  }
  out << "  seeds: " << (spec.seeds.empty() ? 1 : spec.seeds.size()) << "\n";
  return out.str();
}

}  // namespace

void run_experiment(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  if (spec.dry_run) {
    log << describe_dry_run(spec);
    return;
  }

  const fs::path out_dir(spec.out_dir);
  std::mutex log_mutex;

  switch (spec.mode) {
    case ExperimentMode::Particles: {
      std::vector<std::uint64_t> seeds =
          spec.seeds.empty() ? std::vector<std::uint64_t>{spec.sim.seed}
                             : spec.seeds;
      run_jobs(spec.threads, seeds.size(), [&](std::size_t i) {
        SimConfig config = spec.sim;
        config.seed = seeds[i];
        const SimOutput run = run_particle_system(config);
        const fs::path dir = seeds.size() == 1
                                 ? out_dir
                                 : out_dir / ("seed_" + std::to_string(seeds[i]));
        write_particle_artifacts(run, spec.jump_threshold, dir);
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "particles seed=" << seeds[i] << " events=" << run.events.size()
            << " ebar(T)=" << run.ebar.values().back() << "\n";
      });
      break;
    }
    case ExperimentMode::Delayed: {
      std::vector<std::uint64_t> seeds =
          spec.seeds.empty() ? std::vector<std::uint64_t>{spec.delayed.seed}
                             : spec.seeds;
      run_jobs(spec.threads, seeds.size(), [&](std::size_t i) {
        DelayedConfig config = spec.delayed;
        config.seed = seeds[i];
        const DelayedOutput run = run_delayed(config);
        const fs::path dir = seeds.size() == 1
                                 ? out_dir
                                 : out_dir / ("seed_" + std::to_string(seeds[i]));
        fs::create_directories(dir);
        write_path_csv(run.e_delta, (dir / "e_delta.csv").string());
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "delayed seed=" << seeds[i]
            << " e_delta(T)=" << run.e_delta.values().back() << "\n";
      });
      break;
    }
    case ExperimentMode::Sweep: {
      std::vector<std::uint64_t> seeds =
          spec.seeds.empty() ? std::vector<std::uint64_t>{spec.sim.seed}
                             : spec.seeds;
      struct Job {
        double value;
        std::uint64_t seed;
      };
      std::vector<Job> jobs;
      for (double v : spec.sweep_values)
        for (std::uint64_t s : seeds) jobs.push_back({v, s});
      std::vector<LabeledCurve> curves(jobs.size());

      run_jobs(spec.threads, jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        std::ostringstream label;
        CadlagPath curve;
        if (spec.sweep_axis == "n") {
          const SimOutput run = run_particle_system(
              with_n(spec.sim, static_cast<std::size_t>(job.value), job.seed));
          label << "n=" << static_cast<std::size_t>(job.value);
          const fs::path dir = out_dir / label.str() /
                               ("seed_" + std::to_string(job.seed));
          write_particle_artifacts(run, spec.jump_threshold, dir);
          curve = run.ebar;
        } else {
          DelayedConfig config = spec.delayed;
          config.delta = job.value;
          config.seed = job.seed;
          const DelayedOutput run = run_delayed(config);
          label << "delta=" << job.value;
          const fs::path dir = out_dir / label.str() /
                               ("seed_" + std::to_string(job.seed));
          fs::create_directories(dir);
          write_path_csv(run.e_delta, (dir / "e_delta.csv").string());
          curve = run.e_delta;
        }
        curves[i] = LabeledCurve{label.str(), job.value, job.seed,
                                 std::move(curve)};
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "sweep " << label.str() << " seed=" << job.seed << " done\n";
      });

      // Reference: largest particle count or smallest delay, first seed.
      std::size_t ref_index = 0;
      for (std::size_t i = 1; i < curves.size(); ++i) {
        const bool better = spec.sweep_axis == "n"
                                ? curves[i].axis_value >
                                      curves[ref_index].axis_value
                                : curves[i].axis_value <
                                      curves[ref_index].axis_value;
        if (better) ref_index = i;
      }
      ConvergenceOptions options;
      options.jump_threshold = spec.jump_threshold;
      const auto report =
          convergence_report(curves, curves[ref_index].curve, options);
      fs::create_directories(out_dir);
      write_text_file((out_dir / "report.json").string(),
                      report_to_json(report).dump(2) + "\n");
      log << "sweep report: " << (out_dir / "report.json").string() << "\n";
      break;
    }
    case ExperimentMode::Compare: {
      const CadlagPath reference =
          read_path_csv(spec.reference_path, spec.reference_interp);
      std::vector<LabeledCurve> curves;
      for (std::size_t i = 0; i < spec.input_paths.size(); ++i) {
        curves.push_back(LabeledCurve{
            spec.input_paths[i], static_cast<double>(i), 0,
            read_path_csv(spec.input_paths[i], spec.inputs_interp)});
      }
      ConvergenceOptions options;
      options.jump_threshold = spec.jump_threshold;
      const auto report = convergence_report(curves, reference, options);
      fs::create_directories(out_dir);
      write_text_file((out_dir / "report.json").string(),
                      report_to_json(report).dump(2) + "\n");
      log << "compare report: " << (out_dir / "report.json").string() << "\n";
      break;
    }
    case ExperimentMode::CascadeCheck: {
      SpikeState state{spec.check_potentials, spec.check_alpha};
      const CascadeResult cascade = resolve_cascade(state);
      const std::size_t inf_value = cascade_size_inf(state);
      log << "gamma size: " << cascade.spike_count() << "\n";
      log << "gamma:";
      for (std::size_t i : cascade.gamma) log << ' ' << i;
      log << "\nrounds:";
      for (const auto& round : cascade.rounds) log << ' ' << round.size();
      log << "\ninf formula: " << inf_value << "\n";
      log << "jump fraction: " << cascade.jump_fraction << "\n";
      log << "physical jump size: "
          << physical_jump_size(spec.check_potentials, spec.check_alpha)
          << "\n";
      if (cascade.spike_count() != inf_value)
        throw std::runtime_error("cascade and inf formula disagree");
      break;
    }
  }
}

}  // namespace ifc
