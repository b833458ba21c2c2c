#include "mcvd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "mcvd/error.hpp"

namespace mcvd::montecarlo {

using geometry::Vec3;

namespace {

constexpr std::int64_t kChunkSize = 512;

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-6 * std::max(1.0, x); }

}  // namespace

void SimConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
  if (!(D >= 0.0) || !std::isfinite(D)) fail("D must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
  if (!(t_total >= dt) || !std::isfinite(t_total)) fail("t_total must be >= dt");
  if (!near_integer(t_total / dt)) fail("t_total must be an integer multiple of dt");
  if (n_molecules < 0 || n_molecules > std::numeric_limits<std::uint32_t>::max()) {
    fail("n_molecules must be in [0, 2^32)");
  }
  if (n_reps < 1) fail("n_reps must be >= 1");
  if (!(bin_width >= dt * (1.0 - 1e-9)) || !std::isfinite(bin_width)) {
    fail("bin_width must be >= dt");
  }
  if (!near_integer(bin_width / dt)) fail("bin_width must be an integer multiple of dt");
  if (threads < 0) fail("threads must be >= 0");
  if (!(jump_safety >= 0.0) || !std::isfinite(jump_safety)) fail("jump_safety must be >= 0");
}

std::int64_t SimConfig::total_steps() const { return std::llround(t_total / dt); }
std::int64_t SimConfig::steps_per_bin() const { return std::llround(bin_width / dt); }
std::int64_t SimConfig::bin_count() const {
  const std::int64_t spb = steps_per_bin();
  return (total_steps() + spb - 1) / spb;
}
double SimConfig::sigma() const { return std::sqrt(2.0 * D * dt); }

SimConfig paper_scale_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = 1e-5;
  cfg.n_molecules = 1'000'000;
  cfg.n_reps = 100;
  cfg.seed = seed;
  return cfg;
}

SimConfig desk_scale_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  return cfg;
}

void Environment::validate() const {
  if (!tx.is_finite()) {
    throw Error(ErrorCode::ConfigInvalid, "transmitter position must be finite");
  }
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    try {
      receivers[i].validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigInvalid, "receiver " + std::to_string(i) + ": " + e.what());
    }
    if (geometry::distance(tx, receivers[i].center) <= receivers[i].radius) {
      throw Error(ErrorCode::ConfigInvalid,
                  "transmitter lies inside receiver " + std::to_string(i));
    }
  }
  for (std::size_t k = 0; k < reflectors.size(); ++k) {
    if (const auto* plane = std::get_if<geometry::Plane>(&reflectors[k])) {
      if (plane->signed_distance(tx) < 0.0) {
        throw Error(ErrorCode::ConfigInvalid,
                    "transmitter lies behind reflecting plane " + std::to_string(k));
      }
    }
  }
}

Diagnostics& Diagnostics::operator+=(const Diagnostics& o) noexcept {
  steps += o.steps;
  jumps += o.jumps;
  folds += o.folds;
  fold_limit_hits += o.fold_limit_hits;
  return *this;
}

std::uint64_t HitHistogram::n_emitted() const noexcept {
  std::uint64_t n = 0;
  for (const auto& r : replications) n += r.emitted;
  return n;
}

std::uint64_t HitHistogram::n_survived() const noexcept {
  std::uint64_t n = 0;
  for (const auto& r : replications) n += r.survived;
  return n;
}

std::uint64_t HitHistogram::n_absorbed(std::size_t receiver) const {
  if (receiver >= receivers) {
    throw Error(ErrorCode::ReceiverUnknown, "no receiver with index " + std::to_string(receiver));
  }
  std::uint64_t n = 0;
  for (const auto& r : replications) n += r.absorbed[receiver];
  return n;
}

std::vector<std::uint64_t> HitHistogram::counts(std::size_t receiver) const {
  if (receiver >= receivers) {
    throw Error(ErrorCode::ReceiverUnknown, "no receiver with index " + std::to_string(receiver));
  }
  std::vector<std::uint64_t> out(static_cast<std::size_t>(bins), 0);
  for (const auto& r : replications) {
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += r.counts[receiver][b];
  }
  return out;
}

Vec3 brownian_step(const Vec3& pos, double sigma, rng::MoleculeStream& stream) noexcept {
  const double dx = stream.normal();
  const double dy = stream.normal();
  const double dz = stream.normal();
  return {pos.x + sigma * dx, pos.y + sigma * dy, pos.z + sigma * dz};
}

StepOutcome resolve_step(const Vec3& prev, const Vec3& candidate, const Environment& env) noexcept {
  StepOutcome out;
  Vec3 a = prev;
  Vec3 b = candidate;
  std::size_t skip = env.reflectors.size();  // reflector `a` currently lies on
  for (;;) {
    double best_s = std::numeric_limits<double>::infinity();
    bool absorb = false;
    std::size_t best_index = 0;
    Vec3 best_point;
    for (std::size_t i = 0; i < env.receivers.size(); ++i) {
      if (const auto hit = geometry::segment_sphere_entry(a, b, env.receivers[i])) {
        if (hit->s < best_s) {
          best_s = hit->s;
          best_index = i;
          best_point = hit->point;
          absorb = true;
        }
      }
    }
    for (std::size_t k = 0; k < env.reflectors.size(); ++k) {
      if (k == skip) continue;
      if (const auto hit = geometry::segment_boundary_hit(a, b, env.reflectors[k])) {
        if (hit->s < best_s) {
          best_s = hit->s;
          best_index = k;
          best_point = hit->point;
          absorb = false;
        }
      }
    }
    if (!std::isfinite(best_s)) {
      break;
    }
    if (absorb) {
      out.absorbed = true;
      out.receiver = best_index;
      out.position = best_point;
      return out;
    }
    if (out.folds == kMaxFolds) {
      out.fold_limit_hit = true;
      b = best_point;
      break;
    }
    a = best_point;
    b = geometry::mirror_point(b, env.reflectors[best_index]);
    skip = best_index;
    ++out.folds;
  }
  // Rounding in the fold can leave b a hair behind a plane; put it back on it.
  for (const auto& reflector : env.reflectors) {
    if (const auto* plane = std::get_if<geometry::Plane>(&reflector)) {
      const double sd = plane->signed_distance(b);
      if (sd < 0.0) {
        b = b - plane->normal() * sd;
      }
    }
  }
  out.position = b;
  return out;
}

double clearance(const Vec3& p, const Environment& env) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rx : env.receivers) {
    best = std::min(best, geometry::distance(p, rx.center) - rx.radius);
  }
  for (const auto& reflector : env.reflectors) {
    best = std::min(best, geometry::distance_to(p, reflector));
  }
  return best;
}

int default_thread_count() noexcept {
  if (const char* env = std::getenv("MCVD_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 && n <= 4096) {
      return static_cast<int>(n);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct WalkContext {
  const Environment* env;
  std::uint64_t seed;
  std::int64_t total_steps;
  std::int64_t steps_per_bin;
  double sigma;
  /// Jumps of k steps are allowed while k <= (clearance * jump_scale)^2.
  double jump_scale;
};

struct Accumulator {
  std::vector<ReplicationCounts> reps;
  Diagnostics diagnostics;
};

void walk_molecule(const WalkContext& ctx, std::uint32_t rep, std::uint32_t molecule,
                   ReplicationCounts& counts, Diagnostics& diag) {
  rng::MoleculeStream stream(ctx.seed, rep, molecule);
  Vec3 pos = ctx.env->tx;
  std::int64_t step = 0;
  if (ctx.sigma == 0.0) {
    ++counts.survived;
    return;
  }
  while (step < ctx.total_steps) {
    const double room = clearance(pos, *ctx.env);
    std::int64_t k = 1;
    if (ctx.jump_scale > 0.0) {
      const double ratio = room * ctx.jump_scale;
      const double allowed = ratio * ratio;
      if (allowed >= 2.0) {
        const auto remaining = ctx.total_steps - step;
        k = allowed >= static_cast<double>(remaining) ? remaining
                                                      : static_cast<std::int64_t>(allowed);
      }
    }
    const double scale = k == 1 ? ctx.sigma : ctx.sigma * std::sqrt(static_cast<double>(k));
    const Vec3 candidate = brownian_step(pos, scale, stream);
    step += k;
    ++diag.steps;
    if (k > 1) ++diag.jumps;
    // A segment shorter than the clearance cannot touch any surface.
    const Vec3 delta = candidate - pos;
    if (geometry::dot(delta, delta) < room * room) {
      pos = candidate;
      continue;
    }
    const StepOutcome outcome = resolve_step(pos, candidate, *ctx.env);
    diag.folds += static_cast<std::uint64_t>(outcome.folds);
    if (outcome.fold_limit_hit) ++diag.fold_limit_hits;
    if (outcome.absorbed) {
      const auto bin = static_cast<std::size_t>((step - 1) / ctx.steps_per_bin);
      ++counts.counts[outcome.receiver][bin];
      ++counts.absorbed[outcome.receiver];
      return;
    }
    pos = outcome.position;
  }
  ++counts.survived;
}

ReplicationCounts empty_counts(std::size_t receivers, std::int64_t bins) {
  ReplicationCounts r;
  r.counts.assign(receivers, std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
  r.absorbed.assign(receivers, 0);
  return r;
}

}  // namespace

HitHistogram simulate(const Environment& env, const SimConfig& cfg) {
  cfg.validate();
  env.validate();

  HitHistogram h;
  h.bin_width = cfg.bin_width;
  h.bins = cfg.bin_count();
  h.receivers = env.receivers.size();

  WalkContext ctx{&env,
                  cfg.seed,
                  cfg.total_steps(),
                  cfg.steps_per_bin(),
                  cfg.sigma(),
                  0.0};
  if (cfg.jump_safety > 0.0 && ctx.sigma > 0.0) {
    ctx.jump_scale = 1.0 / (std::sqrt(3.0) * ctx.sigma * cfg.jump_safety);
  }

  const auto reps = static_cast<std::size_t>(cfg.n_reps);
  const std::int64_t chunks_per_rep = (cfg.n_molecules + kChunkSize - 1) / kChunkSize;
  const std::int64_t total_chunks = chunks_per_rep * cfg.n_reps;
  const int threads = static_cast<int>(std::clamp<std::int64_t>(
      cfg.threads > 0 ? cfg.threads : default_thread_count(), 1, std::max<std::int64_t>(total_chunks, 1)));

  std::atomic<std::int64_t> next_chunk{0};
  std::vector<Accumulator> partial(static_cast<std::size_t>(threads));
  for (auto& acc : partial) {
    acc.reps.assign(reps, empty_counts(h.receivers, h.bins));
  }

  const auto worker = [&](Accumulator& acc) {
    for (;;) {
      const std::int64_t chunk = next_chunk.fetch_add(1, std::memory_order_relaxed);
      if (chunk >= total_chunks) return;
      const auto rep = static_cast<std::uint32_t>(chunk / chunks_per_rep);
      const std::int64_t first = (chunk % chunks_per_rep) * kChunkSize;
      const std::int64_t last = std::min(first + kChunkSize, cfg.n_molecules);
      for (std::int64_t m = first; m < last; ++m) {
        walk_molecule(ctx, rep, static_cast<std::uint32_t>(m), acc.reps[rep], acc.diagnostics);
      }
    }
  };

  if (threads == 1) {
    worker(partial.front());
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (auto& acc : partial) {
      pool.emplace_back([&worker, &acc] { worker(acc); });
    }
  }

  h.replications.assign(reps, empty_counts(h.receivers, h.bins));
  for (const auto& acc : partial) {
    for (std::size_t r = 0; r < reps; ++r) {
      auto& dst = h.replications[r];
      const auto& src = acc.reps[r];
      for (std::size_t i = 0; i < h.receivers; ++i) {
        for (std::size_t b = 0; b < dst.counts[i].size(); ++b) dst.counts[i][b] += src.counts[i][b];
        dst.absorbed[i] += src.absorbed[i];
      }
      dst.survived += src.survived;
    }
    h.diagnostics += acc.diagnostics;
  }
  for (auto& r : h.replications) {
    r.emitted = static_cast<std::uint64_t>(cfg.n_molecules);
  }
  return h;
}

namespace {

std::size_t bins_up_to(const HitHistogram& h, double t) {
  if (!(t > 0.0) || h.bin_width <= 0.0) return 0;
  const double n = std::floor(t / h.bin_width + 1e-9);
  return static_cast<std::size_t>(std::min<double>(n, static_cast<double>(h.bins)));
}

double fraction(const ReplicationCounts& r, std::size_t receiver, std::size_t nbins,
                std::uint64_t emitted) {
  if (emitted == 0) return 0.0;
  std::uint64_t sum = 0;
  for (std::size_t b = 0; b < nbins; ++b) sum += r.counts[receiver][b];
  return static_cast<double>(sum) / static_cast<double>(emitted);
}

void check_receiver(const HitHistogram& h, std::size_t receiver) {
  if (receiver >= h.receivers) {
    throw Error(ErrorCode::ReceiverUnknown, "no receiver with index " + std::to_string(receiver));
  }
}

}  // namespace

double cumulative_fraction(const HitHistogram& h, std::size_t receiver, double t) {
  check_receiver(h, receiver);
  const std::uint64_t emitted = h.n_emitted();
  if (emitted == 0) return 0.0;
  const std::size_t nbins = bins_up_to(h, t);
  std::uint64_t sum = 0;
  for (const auto& r : h.replications) {
    for (std::size_t b = 0; b < nbins; ++b) sum += r.counts[receiver][b];
  }
  return static_cast<double>(sum) / static_cast<double>(emitted);
}

double cumulative_fraction(const HitHistogram& h, std::size_t receiver, double t,
                           std::size_t replication) {
  check_receiver(h, receiver);
  if (replication >= h.replications.size()) {
    throw Error(ErrorCode::InvalidParameter, "no replication " + std::to_string(replication));
  }
  const auto& r = h.replications[replication];
  return fraction(r, receiver, bins_up_to(h, t), r.emitted);
}

}  // namespace mcvd::montecarlo
