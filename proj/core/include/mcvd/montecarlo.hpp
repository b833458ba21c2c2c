#pragma once

#include <cstdint>
#include <vector>

#include "mcvd/geometry.hpp"
#include "mcvd/rng.hpp"

namespace mcvd::montecarlo {

struct SimConfig {
  double D{79.4};               ///< um^2/s
  double dt{1e-4};              ///< s
  double t_total{2.0};          ///< s
  std::int64_t n_molecules{100000};  ///< per replication
  int n_reps{10};
  std::uint64_t seed{1};
  double bin_width{1e-3};       ///< s, an integer multiple of dt
  /// Worker threads; 0 reads MCVD_THREADS, falling back to the hardware count.
  int threads{0};
  /// Multi-step jumps are taken only while the walk stays inside the current
  /// clearance with probability >= 1 - 12 Phi(-jump_safety). 0 disables them
  /// and every dt step is simulated explicitly.
  double jump_safety{6.0};

  /// Throws ConfigInvalid.
  void validate() const;
  std::int64_t total_steps() const;
  std::int64_t steps_per_bin() const;
  std::int64_t bin_count() const;
  double sigma() const;  ///< per-axis step standard deviation sqrt(2 D dt)
};

/// Table I parameters: N = 1e6, dt = 1e-5 s, 100 replications.
SimConfig paper_scale_config(std::uint64_t seed = 1);
/// Reduced defaults: N = 1e5, dt = 1e-4 s, 10 replications.
SimConfig desk_scale_config(std::uint64_t seed = 1);

struct Environment {
  geometry::Vec3 tx;
  std::vector<geometry::Reflector> reflectors;
  std::vector<geometry::AbsorbingSphere> receivers;

  /// Throws ConfigInvalid when tx is inside a receiver or behind a plane.
  void validate() const;
};

struct Diagnostics {
  std::uint64_t steps{0};           ///< resolved segments (single steps and jumps)
  std::uint64_t jumps{0};           ///< multi-step jumps among `steps`
  std::uint64_t folds{0};
  std::uint64_t fold_limit_hits{0};

  Diagnostics& operator+=(const Diagnostics& o) noexcept;
  bool operator==(const Diagnostics&) const noexcept = default;
};

/// Counts for one replication.
struct ReplicationCounts {
  std::vector<std::vector<std::uint64_t>> counts;  ///< [receiver][bin]
  std::vector<std::uint64_t> absorbed;             ///< [receiver]
  std::uint64_t emitted{0};
  std::uint64_t survived{0};

  bool operator==(const ReplicationCounts&) const noexcept = default;
};

/// Binned first-absorption times. Bin b holds absorptions with time in
/// (b * bin_width, (b + 1) * bin_width].
struct HitHistogram {
  double bin_width{0.0};
  std::int64_t bins{0};
  std::size_t receivers{0};
  std::vector<ReplicationCounts> replications;
  Diagnostics diagnostics;

  std::uint64_t n_emitted() const noexcept;
  std::uint64_t n_survived() const noexcept;
  std::uint64_t n_absorbed(std::size_t receiver) const;
  /// Counts summed across replications.
  std::vector<std::uint64_t> counts(std::size_t receiver) const;

  bool operator==(const HitHistogram&) const noexcept = default;
};

/// Candidate position after one Wiener increment: pos + sigma * N(0, I3).
geometry::Vec3 brownian_step(const geometry::Vec3& pos, double sigma,
                             rng::MoleculeStream& stream) noexcept;

struct StepOutcome {
  bool absorbed{false};
  std::size_t receiver{0};  ///< valid when absorbed
  geometry::Vec3 position;  ///< entry point when absorbed, new position otherwise
  int folds{0};
  bool fold_limit_hit{false};
};

inline constexpr int kMaxFolds = 16;

/// Walks the segment prev -> candidate, taking the earliest event first:
/// entering a receiver absorbs, crossing a reflector folds the remainder of
/// the segment by mirroring it. After kMaxFolds folds the molecule stops at
/// the last fold point.
StepOutcome resolve_step(const geometry::Vec3& prev, const geometry::Vec3& candidate,
                         const Environment& env) noexcept;

/// Minimum distance from p to any receiver surface or reflector.
double clearance(const geometry::Vec3& p, const Environment& env) noexcept;

/// Releases n_molecules at tx per replication and bins first-absorption times.
/// Deterministic for a given seed regardless of the thread count.
HitHistogram simulate(const Environment& env, const SimConfig& cfg);

/// Fraction of emitted molecules (all replications) absorbed by `receiver`
/// no later than t. Throws ReceiverUnknown.
double cumulative_fraction(const HitHistogram& h, std::size_t receiver, double t);
/// Same for a single replication.
double cumulative_fraction(const HitHistogram& h, std::size_t receiver, double t,
                           std::size_t replication);

/// Thread count used when SimConfig::threads is 0.
int default_thread_count() noexcept;

}  // namespace mcvd::montecarlo
