#pragma once

#include <span>
#include <string>
#include <vector>

#include "mcvd/montecarlo.hpp"
#include "mcvd/topology.hpp"

namespace mcvd::experiments {

/// Root-mean-square difference of two equal-length series. Throws
/// LengthMismatch.
double rmse(std::span<const double> analytic, std::span<const double> simulated);

struct ComparisonReport {
  TopologySpec topology;
  montecarlo::SimConfig config;
  std::string model;
  std::vector<double> grid;               ///< s
  std::vector<double> analytic;           ///< closed-form CDF on grid
  std::vector<double> simulated;          ///< pooled cumulative fraction
  std::vector<double> simulated_stderr;   ///< across replications
  double rmse{0.0};
  std::uint64_t n_emitted{0};
  std::uint64_t n_absorbed{0};
  montecarlo::Diagnostics diagnostics;
};

/// Uniform grid step*k, k = 1..round(t_total/step).
std::vector<double> uniform_grid(double t_total, double step);

/// Simulates the topology, evaluates its closed-form CDF on a 1 ms grid over
/// (0, T] and reports the RMSE between the two curves.
ComparisonReport run_experiment(const TopologySpec& spec, const montecarlo::SimConfig& cfg,
                                double grid_step = 1e-3);

/// Report as JSON. Thread count is deliberately absent so that reports are
/// byte-identical across degrees of parallelism.
std::string to_json(const ComparisonReport& report);
/// Columns: t_seconds,analytic_cdf,simulated_cdf_mean,simulated_cdf_stderr.
std::string curves_csv(const ComparisonReport& report);
/// Columns: bin,t_end_seconds, then rx<i>_count,rx<i>_cumulative_fraction per receiver.
std::string histogram_csv(const montecarlo::HitHistogram& h);
/// Columns: t_seconds,rate,cdf. Rates are clamped at zero.
std::string analytic_csv(const analytic::ChannelModel& model, std::span<const double> grid);

/// Config echo shared by reports and run manifests (threads excluded).
std::string config_json(const montecarlo::SimConfig& cfg);

}  // namespace mcvd::experiments
