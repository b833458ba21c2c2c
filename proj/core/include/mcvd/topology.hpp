#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/analytic.hpp"
#include "mcvd/geometry.hpp"
#include "mcvd/montecarlo.hpp"

namespace mcvd::experiments {

enum class TopologyId { T0, T1, T2, T3, T4, T2Finite, TwoPlane, Custom };

/// Closed-form model matched to a custom topology.
enum class ModelKind { None, Siso, HalfSpace, TwoPlane };

std::string_view to_string(TopologyId id) noexcept;
std::string_view to_string(ModelKind kind) noexcept;
/// Accepts the lower-case ids ("t0" .. "t4", "t2_finite", "twoplane",
/// "custom"). Throws SpecInvalid listing the available ids.
TopologyId parse_topology_id(std::string_view text);
ModelKind parse_model_kind(std::string_view text);

/// Ids of the seven paper topologies, in registry order.
std::vector<TopologyId> paper_topology_ids();

struct TopologySpec {
  TopologyId id{TopologyId::T0};
  geometry::Vec3 tx;
  geometry::Vec3 rx_center;
  double r_r{5.0};
  /// Gap between receiver surface and reflector (T2, T3, T2Finite, TwoPlane).
  std::optional<double> d;
  /// Images kept by the two-plane series (TwoPlane).
  std::optional<int> k_prime;
  /// Side of the square finite reflector (T4, T2Finite).
  double rect_side{40.0};

  /// Custom topologies only: explicit reflectors, extra receivers (indices
  /// 1.. in the simulated environment) and the model to compare against.
  std::vector<geometry::Reflector> reflectors;
  std::vector<geometry::AbsorbingSphere> extra_receivers;
  ModelKind model{ModelKind::None};

  /// Throws SpecInvalid.
  void validate() const;
};

/// Embedded JSON document of a paper topology (default variant).
std::string builtin_topology_json(TopologyId id);

/// Parses a topology document. Throws Error(ParseError) with line/column for
/// malformed JSON and Error(SpecInvalid) naming the offending field.
TopologySpec parse_topology_json(std::string_view text);
std::string to_json(const TopologySpec& spec);

/// Paper topology with optional variant overrides (receiver radius for T0/T1,
/// wall gap d, image count K').
TopologySpec paper_topology(TopologyId id, std::optional<double> r_r = std::nullopt,
                            std::optional<double> d = std::nullopt,
                            std::optional<int> k_prime = std::nullopt);

/// Every variant reported in the paper's tables: T0/T1 with r_r in {3,5,8},
/// T2/T3 with d in {1,3,5}, T4, T2Finite, TwoPlane with K' in {3,5,11}.
std::vector<TopologySpec> paper_variants();

/// Short label such as "t2_d1" or "twoplane_k3".
std::string variant_label(const TopologySpec& spec);

struct BuiltTopology {
  montecarlo::Environment environment;
  std::optional<analytic::ChannelModel> model;
};

/// Places reflectors per topology: T0/T1/T4 walls at x = 0, T2/T3/T2Finite
/// walls at x = rx.x - r_r - d, TwoPlane walls at rx.x -/+ (d + r_r).
BuiltTopology build_topology(const TopologySpec& spec, double diffusion_coefficient = 79.4);

}  // namespace mcvd::experiments
