#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcvd/analytic.hpp"
#include "mcvd/error.hpp"
#include "mcvd/experiments.hpp"
#include "mcvd/montecarlo.hpp"
#include "mcvd/topology.hpp"

#ifndef MCVD_VERSION
#define MCVD_VERSION "0.0.0+unknown"
#endif

namespace mcvd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using experiments::TopologyId;
using experiments::TopologySpec;
using geometry::Vec3;

namespace {

/// Bad flags, unreadable inputs: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Output could not be written: exit code 3.
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec3 parse_vec3(const std::string& text, const std::string& flag) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> values;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + text + "' is not a comma-separated x,y,z triple");
    }
  }
  if (values.size() != 3) {
    throw UsageError(flag + ": '" + text + "' is not a comma-separated x,y,z triple");
  }
  return {values[0], values[1], values[2]};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write file '" + path.string() + "'");
  out << content;
  if (!out) throw RuntimeFailure("write failed for '" + path.string() + "'");
}

struct SimOptions {
  bool desk_scale{false};
  bool paper_scale{false};
  std::optional<long long> n_molecules;
  std::optional<int> n_reps;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<double> bin_width;
  std::optional<double> jump_safety;
  double D{79.4};
  std::uint64_t seed{1};
  int threads{0};

  void add_to(CLI::App& app) {
    auto* desk = app.add_flag("--desk-scale", desk_scale,
                              "N=1e5, dt=1e-4 s, 10 replications (default)");
    app.add_flag("--paper-scale", paper_scale, "N=1e6, dt=1e-5 s, 100 replications")
        ->excludes(desk);
    app.add_option("--n", n_molecules, "molecules per replication");
    app.add_option("--reps", n_reps, "replications");
    app.add_option("--dt", dt, "time step, s");
    app.add_option("--t-max", t_max, "simulated duration, s");
    app.add_option("--bin-width", bin_width, "histogram bin width, s");
    app.add_option("--jump-safety", jump_safety,
                   "sigma multiple guarding multi-step jumps (0 disables)");
    app.add_option("--D", D, "diffusion coefficient, um^2/s");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "worker threads (0: MCVD_THREADS or hardware)");
  }

  montecarlo::SimConfig build() const {
    montecarlo::SimConfig cfg =
        paper_scale ? montecarlo::paper_scale_config(seed) : montecarlo::desk_scale_config(seed);
    cfg.D = D;
    if (n_molecules) cfg.n_molecules = *n_molecules;
    if (n_reps) cfg.n_reps = *n_reps;
    if (dt) cfg.dt = *dt;
    if (t_max) cfg.t_total = *t_max;
    if (bin_width) cfg.bin_width = *bin_width;
    if (jump_safety) cfg.jump_safety = *jump_safety;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

struct TopologyOptions {
  std::string topology;
  std::string topology_file;
  std::optional<double> r_r;
  std::optional<double> d;
  std::optional<int> k_prime;

  void add_variants(CLI::App& app) {
    app.add_option("--rr", r_r, "receiver radius, um");
    app.add_option("--d", d, "receiver-to-wall gap, um");
    app.add_option("--kprime", k_prime, "images kept in the two-plane series");
  }

  bool given() const { return !topology.empty() || !topology_file.empty(); }

  TopologySpec resolve() const {
    if (!topology.empty() && !topology_file.empty()) {
      throw UsageError("--topology and --topology-file are mutually exclusive");
    }
    if (!topology_file.empty()) {
      TopologySpec spec = experiments::parse_topology_json(read_file(topology_file));
      if (r_r) spec.r_r = *r_r;
      if (d) spec.d = *d;
      if (k_prime) spec.k_prime = *k_prime;
      spec.validate();
      return spec;
    }
    if (topology.empty()) throw UsageError("one of --topology or --topology-file is required");
    return experiments::paper_topology(experiments::parse_topology_id(topology), r_r, d, k_prime);
  }
};

std::string manifest_json(const std::string& command, const std::vector<std::string>& args,
                          const montecarlo::SimConfig* cfg, const std::vector<TopologySpec>& specs,
                          double seconds, const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["argv"] = args;
  m["version"] = MCVD_VERSION;
  if (cfg) {
    m["seed"] = cfg->seed;
    m["config"] = json::parse(experiments::config_json(*cfg));
    m["threads"] = cfg->threads > 0 ? cfg->threads : montecarlo::default_thread_count();
  }
  json topo = json::array();
  for (const auto& spec : specs) topo.push_back(json::parse(experiments::to_json(spec)));
  m["topologies"] = topo;
  m["outputs"] = outputs;
  m["wall_clock_seconds"] = seconds;
  return m.dump(2) + "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticCommand {
  std::string model;
  TopologyOptions topo;
  double D{79.4};
  double t_max{2.0};
  double t_step{1e-3};
  std::string out_path;
  std::optional<double> r0, r0i, r0j, ri, rj, phi;
  std::string tx, rx, plane_point, plane_normal;

  void add_to(CLI::App& app) {
    app.add_option("model", model, "siso | simo | halfspace | twoplane")
        ->required()
        ->check(CLI::IsMember({"siso", "simo", "halfspace", "twoplane"}));
    app.add_option("--topology", topo.topology, "builtin topology id");
    app.add_option("--topology-file", topo.topology_file, "topology JSON document");
    topo.add_variants(app);
    app.add_option("--D", D, "diffusion coefficient, um^2/s");
    app.add_option("--t-max", t_max, "grid end, s");
    app.add_option("--t-step", t_step, "grid step, s");
    app.add_option("--out", out_path, "output CSV (default stdout)");
    app.add_option("--r0", r0, "siso: Tx-Rx center distance, um");
    app.add_option("--r0i", r0i, "simo: Tx distance to receiver i, um");
    app.add_option("--r0j", r0j, "simo: Tx distance to receiver j, um");
    app.add_option("--ri", ri, "simo: radius of receiver i, um");
    app.add_option("--rj", rj, "simo: radius of receiver j, um");
    app.add_option("--phi", phi, "simo: angular separation, rad");
    app.add_option("--tx", tx, "halfspace: transmitter x,y,z");
    app.add_option("--rx", rx, "halfspace: receiver center x,y,z");
    app.add_option("--plane-point", plane_point, "halfspace: point on the wall x,y,z");
    app.add_option("--plane-normal", plane_normal, "halfspace: wall normal toward Tx x,y,z");
  }

  static double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string(flag) + " is required for this model");
    return *v;
  }

  analytic::ChannelModel build_model() const {
    const analytic::DiffusionParams diffusion{D};
    if (model == "siso") {
      return analytic::ChannelModel(analytic::SisoModel({need(r0, "--r0"), need(topo.r_r, "--rr"), diffusion}));
    }
    if (model == "halfspace" && !topo.given()) {
      if (tx.empty() || rx.empty() || plane_point.empty() || plane_normal.empty()) {
        throw UsageError(
            "halfspace needs --topology/--topology-file or --tx, --rx, --rr, --plane-point, "
            "--plane-normal");
      }
      const geometry::Plane plane(parse_vec3(plane_point, "--plane-point"),
                                  parse_vec3(plane_normal, "--plane-normal"));
      return analytic::ChannelModel(analytic::HalfSpaceModel(
          {parse_vec3(tx, "--tx"), {parse_vec3(rx, "--rx"), need(topo.r_r, "--rr")}, plane, diffusion}));
    }
    const TopologySpec spec = topo.resolve();
    auto built = experiments::build_topology(spec, D);
    if (!built.model) throw UsageError("topology has no closed-form model");
    if (built.model->name() != model) {
      throw UsageError("topology '" + std::string(experiments::to_string(spec.id)) +
                       "' matches model '" + built.model->name() + "', not '" + model + "'");
    }
    return *built.model;
  }

  int run(std::ostream& out) const {
    if (!(t_max > 0.0) || !(t_step > 0.0)) throw UsageError("--t-max and --t-step must be > 0");
    const auto grid = experiments::uniform_grid(t_max, t_step);
    std::string csv;
    if (model == "simo") {
      const analytic::SimoPairParams pair{need(ri, "--ri"), need(rj, "--rj"), need(r0i, "--r0i"),
                                          need(r0j, "--r0j"), need(phi, "--phi")};
      const analytic::DiffusionParams diffusion{D};
      csv = "t_seconds,rate,cdf\n";
      for (const double t : grid) {
        char line[96];
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", t,
                      analytic::simo_hit_rate_clamped(t, pair, diffusion),
                      analytic::simo_hit_cdf(t, pair, diffusion));
        csv += line;
      }
    } else {
      csv = experiments::analytic_csv(build_model(), grid);
    }
    if (out_path.empty()) {
      out << csv;
    } else {
      write_file(out_path, csv);
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCommand {
  TopologyOptions topo;
  SimOptions sim;
  std::string out_dir{"."};
  std::string prefix;

  void add_to(CLI::App& app) {
    app.add_option("--topology", topo.topology, "builtin topology id");
    app.add_option("--topology-file", topo.topology_file, "topology JSON document");
    topo.add_variants(app);
    sim.add_to(app);
    app.add_option("--out-dir", out_dir, "directory for outputs");
    app.add_option("--prefix", prefix, "output file prefix (default: topology label)");
  }

  int run(const std::vector<std::string>& args, std::ostream& out) const {
    const auto start = std::chrono::steady_clock::now();
    const TopologySpec spec = topo.resolve();
    const montecarlo::SimConfig cfg = sim.build();
    const auto built = experiments::build_topology(spec, cfg.D);
    const auto hist = montecarlo::simulate(built.environment, cfg);
    const std::string stem = prefix.empty() ? experiments::variant_label(spec) : prefix;
    const fs::path dir(out_dir);
    const fs::path csv_path = dir / (stem + "_histogram.csv");
    const fs::path manifest_path = dir / (stem + "_manifest.json");
    write_file(csv_path, experiments::histogram_csv(hist));
    write_file(manifest_path, manifest_json("simulate", args, &cfg, {spec}, seconds_since(start),
                                            {csv_path.filename().string()}));
    out << stem << ": emitted " << hist.n_emitted() << ", absorbed " << hist.n_absorbed(0)
        << ", fraction at T " << montecarlo::cumulative_fraction(hist, 0, cfg.t_total) << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// experiment

struct ExperimentCommand {
  std::string id;
  bool all{false};
  TopologyOptions topo;
  SimOptions sim;
  std::string out_dir{"."};

  void add_to(CLI::App& app) {
    app.add_option("id", id, "topology id (t0..t4, t2_finite, twoplane)");
    app.add_flag("--all", all, "run every paper topology and variant");
    app.add_option("--topology-file", topo.topology_file, "topology JSON document");
    topo.add_variants(app);
    sim.add_to(app);
    app.add_option("--out-dir", out_dir, "directory for outputs");
  }

  int run(const std::vector<std::string>& args, std::ostream& out) const {
    const auto start = std::chrono::steady_clock::now();
    std::vector<TopologySpec> specs;
    if (all) {
      if (!id.empty() || topo.given()) throw UsageError("--all cannot be combined with an id");
      specs = experiments::paper_variants();
    } else if (!topo.topology_file.empty()) {
      if (!id.empty()) throw UsageError("give either an id or --topology-file");
      specs.push_back(topo.resolve());
    } else {
      if (id.empty()) throw UsageError("an experiment id or --all is required");
      TopologyOptions named = topo;
      named.topology = id;
      specs.push_back(named.resolve());
    }
    const montecarlo::SimConfig cfg = sim.build();
    const fs::path dir(out_dir);
    std::vector<std::string> outputs;
    json summary = json::array();
    for (const auto& spec : specs) {
      const auto report = experiments::run_experiment(spec, cfg);
      const std::string label = experiments::variant_label(spec);
      const fs::path report_path = dir / (label + "_report.json");
      const fs::path curves_path = dir / (label + "_curves.csv");
      write_file(report_path, experiments::to_json(report) + "\n");
      write_file(curves_path, experiments::curves_csv(report));
      outputs.push_back(report_path.filename().string());
      outputs.push_back(curves_path.filename().string());
      json row;
      row["label"] = label;
      row["rmse"] = report.rmse;
      summary.push_back(row);
      char line[128];
      std::snprintf(line, sizeof line, "%-14s model=%-9s rmse=%.4f\n", label.c_str(),
                    report.model.c_str(), report.rmse);
      out << line << std::flush;
    }
    if (all) {
      const fs::path summary_path = dir / "summary.json";
      write_file(summary_path, summary.dump(2) + "\n");
      outputs.push_back(summary_path.filename().string());
    }
    const std::string stem = all ? std::string("all") : experiments::variant_label(specs.front());
    write_file(dir / (stem + "_manifest.json"),
               manifest_json("experiment", args, &cfg, specs, seconds_since(start), outputs));
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// replay

std::vector<std::string> replay_args(const std::string& manifest_path, const std::string& out_dir) {
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw UsageError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    throw UsageError("manifest '" + manifest_path + "' has no argv array");
  }
  std::vector<std::string> args;
  for (const auto& a : m["argv"]) {
    if (!a.is_string()) throw UsageError("manifest argv entries must be strings");
    args.push_back(a.get<std::string>());
  }
  if (args.empty() || args.front() == "replay") {
    throw UsageError("manifest does not record a replayable command");
  }
  if (!out_dir.empty()) {
    for (auto it = args.begin(); it != args.end();) {
      if (*it == "--out-dir" && std::next(it) != args.end()) {
        it = args.erase(it, std::next(it, 2));
      } else if (it->rfind("--out-dir=", 0) == 0) {
        it = args.erase(it);
      } else {
        ++it;
      }
    }
    args.push_back("--out-dir");
    args.push_back(out_dir);
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffusion channel toolkit: closed-form responses and Monte Carlo validation",
               "mcvd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MCVD_VERSION);

  AnalyticCommand analytic_cmd;
  analytic_cmd.add_to(*app.add_subcommand("analytic", "evaluate a closed-form model on a grid"));
  SimulateCommand simulate_cmd;
  auto* simulate_app = app.add_subcommand("simulate", "run the particle simulator");
  simulate_cmd.add_to(*simulate_app);
  ExperimentCommand experiment_cmd;
  auto* experiment_app = app.add_subcommand("experiment", "compare a model against simulation");
  experiment_cmd.add_to(*experiment_app);
  std::string manifest_path;
  std::string replay_out_dir;
  auto* replay_app = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_app->add_option("manifest", manifest_path, "manifest JSON")->required();
  replay_app->add_option("--out-dir", replay_out_dir, "override the recorded output directory");
  auto* list_app = app.add_subcommand("topologies", "list builtin topology documents");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("analytic")) return analytic_cmd.run(out);
    if (app.got_subcommand(simulate_app)) return simulate_cmd.run(args, out);
    if (app.got_subcommand(experiment_app)) return experiment_cmd.run(args, out);
    if (app.got_subcommand(replay_app)) {
      return run(replay_args(manifest_path, replay_out_dir), out, err);
    }
    if (app.got_subcommand(list_app)) {
      for (const auto id : experiments::paper_topology_ids()) {
        out << experiments::to_json(experiments::paper_topology(id)) << "\n";
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mcvd::cli
