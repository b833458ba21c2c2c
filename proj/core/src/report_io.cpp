#include <cstdio>
#include <string>

#include <json.hpp>

#include "mcvd/experiments.hpp"

namespace mcvd::experiments {

using json = nlohmann::ordered_json;

namespace {

json config_object(const montecarlo::SimConfig& cfg) {
  json c;
  c["D_um2_per_s"] = cfg.D;
  c["dt_s"] = cfg.dt;
  c["t_total_s"] = cfg.t_total;
  c["n_molecules"] = cfg.n_molecules;
  c["n_reps"] = cfg.n_reps;
  c["seed"] = cfg.seed;
  c["bin_width_s"] = cfg.bin_width;
  c["jump_safety"] = cfg.jump_safety;
  return c;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out += buf;
}

}  // namespace

std::string config_json(const montecarlo::SimConfig& cfg) { return config_object(cfg).dump(2); }

std::string to_json(const ComparisonReport& report) {
  json out;
  out["topology"] = json::parse(to_json(report.topology));
  out["label"] = variant_label(report.topology);
  out["config"] = config_object(report.config);
  out["model"] = report.model;
  out["rmse"] = report.rmse;
  out["rmse_definition"] = "cumulative, uniform grid over (0, T]";
  out["grid_step_s"] = report.grid.size() > 0 ? report.grid.front() : 0.0;
  out["grid_points"] = report.grid.size();
  out["n_emitted"] = report.n_emitted;
  out["n_absorbed"] = report.n_absorbed;
  out["final_analytic_cdf"] = report.analytic.empty() ? 0.0 : report.analytic.back();
  out["final_simulated_cdf"] = report.simulated.empty() ? 0.0 : report.simulated.back();
  json diag;
  diag["segments"] = report.diagnostics.steps;
  diag["jumps"] = report.diagnostics.jumps;
  diag["folds"] = report.diagnostics.folds;
  diag["fold_limit_hits"] = report.diagnostics.fold_limit_hits;
  out["diagnostics"] = diag;
  return out.dump(2);
}

std::string curves_csv(const ComparisonReport& report) {
  std::string out = "t_seconds,analytic_cdf,simulated_cdf_mean,simulated_cdf_stderr\n";
  for (std::size_t k = 0; k < report.grid.size(); ++k) {
    append_number(out, report.grid[k]);
    out += ',';
    append_number(out, report.analytic[k]);
    out += ',';
    append_number(out, report.simulated[k]);
    out += ',';
    append_number(out, report.simulated_stderr[k]);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const montecarlo::HitHistogram& h) {
  std::string out = "bin,t_end_seconds";
  for (std::size_t i = 0; i < h.receivers; ++i) {
    out += ",rx" + std::to_string(i) + "_count,rx" + std::to_string(i) + "_cumulative_fraction";
  }
  out += '\n';
  std::vector<std::vector<std::uint64_t>> counts;
  for (std::size_t i = 0; i < h.receivers; ++i) counts.push_back(h.counts(i));
  std::vector<std::uint64_t> running(h.receivers, 0);
  const double emitted = static_cast<double>(h.n_emitted());
  for (std::int64_t b = 0; b < h.bins; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    out += std::to_string(b);
    out += ',';
    append_number(out, static_cast<double>(b + 1) * h.bin_width);
    for (std::size_t i = 0; i < h.receivers; ++i) {
      running[i] += counts[i][bi];
      out += ',' + std::to_string(counts[i][bi]) + ',';
      append_number(out, emitted > 0 ? static_cast<double>(running[i]) / emitted : 0.0);
    }
    out += '\n';
  }
  return out;
}

std::string analytic_csv(const analytic::ChannelModel& model, std::span<const double> grid) {
  std::string out = "t_seconds,rate,cdf\n";
  for (const double t : grid) {
    append_number(out, t);
    out += ',';
    append_number(out, model.rate_clamped(t));
    out += ',';
    append_number(out, model.cdf(t));
    out += '\n';
  }
  return out;
}

}  // namespace mcvd::experiments
