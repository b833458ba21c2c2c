#include "mcvd/experiments.hpp"

#include <cmath>

#include "mcvd/error.hpp"

namespace mcvd::experiments {

double rmse(std::span<const double> analytic, std::span<const double> simulated) {
  if (analytic.size() != simulated.size()) {
    throw Error(ErrorCode::LengthMismatch, "series lengths differ: " +
                                               std::to_string(analytic.size()) + " vs " +
                                               std::to_string(simulated.size()));
  }
  if (analytic.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double diff = analytic[k] - simulated[k];
    sum += diff * diff;
  }
  return std::sqrt(sum / static_cast<double>(analytic.size()));
}

std::vector<double> uniform_grid(double t_total, double step) {
  if (!(step > 0.0) || !(t_total > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "grid needs positive duration and step");
  }
  const auto n = static_cast<std::size_t>(std::llround(t_total / step));
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = static_cast<double>(k + 1) * step;
  }
  return grid;
}

ComparisonReport run_experiment(const TopologySpec& spec, const montecarlo::SimConfig& cfg,
                                double grid_step) {
  cfg.validate();
  const BuiltTopology built = build_topology(spec, cfg.D);
  if (!built.model) {
    throw Error(ErrorCode::SpecInvalid, "topology has no closed-form model to compare against");
  }
  const montecarlo::HitHistogram hist = montecarlo::simulate(built.environment, cfg);

  ComparisonReport report;
  report.topology = spec;
  report.config = cfg;
  report.model = built.model->name();
  report.grid = uniform_grid(cfg.t_total, grid_step);
  report.n_emitted = hist.n_emitted();
  report.n_absorbed = hist.n_absorbed(0);
  report.diagnostics = hist.diagnostics;

  const std::size_t reps = hist.replications.size();
  report.analytic.reserve(report.grid.size());
  report.simulated.reserve(report.grid.size());
  report.simulated_stderr.reserve(report.grid.size());
  std::vector<double> per_rep(reps);
  for (const double t : report.grid) {
    report.analytic.push_back(built.model->cdf(t));
    report.simulated.push_back(montecarlo::cumulative_fraction(hist, 0, t));
    double mean = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      per_rep[r] = montecarlo::cumulative_fraction(hist, 0, t, r);
      mean += per_rep[r];
    }
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (const double v : per_rep) var += (v - mean) * (v - mean);
    report.simulated_stderr.push_back(
        reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1) / static_cast<double>(reps))
                 : 0.0);
  }
  report.rmse = rmse(report.analytic, report.simulated);
  return report;
}

}  // namespace mcvd::experiments
