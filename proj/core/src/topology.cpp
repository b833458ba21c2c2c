#include "mcvd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mcvd/error.hpp"

namespace mcvd::experiments {

using geometry::AbsorbingSphere;
using geometry::Plane;
using geometry::Rect;
using geometry::Reflector;
using geometry::Vec3;
using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kSchema = "mcvd-topology/1";

struct IdName {
  TopologyId id;
  std::string_view name;
};

constexpr IdName kIds[] = {
    {TopologyId::T0, "t0"},       {TopologyId::T1, "t1"},
    {TopologyId::T2, "t2"},       {TopologyId::T3, "t3"},
    {TopologyId::T4, "t4"},       {TopologyId::T2Finite, "t2_finite"},
    {TopologyId::TwoPlane, "twoplane"}, {TopologyId::Custom, "custom"},
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::SpecInvalid, msg); }

bool uses_gap(TopologyId id) {
  return id == TopologyId::T2 || id == TopologyId::T3 || id == TopologyId::T2Finite ||
         id == TopologyId::TwoPlane;
}

// Field readers report the JSON path of the offending value.
const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) invalid("missing field '" + path + key + "'");
  return *it;
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) invalid("field '" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid("field '" + path + "' must be finite");
  return x;
}

Vec3 read_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) invalid("field '" + path + "' must be an array of 3 numbers");
  return {read_number(v[0], path + "[0]"), read_number(v[1], path + "[1]"),
          read_number(v[2], path + "[2]")};
}

json write_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Reflector read_reflector(const json& v, const std::string& path) {
  if (!v.is_object()) invalid("field '" + path + "' must be an object");
  const json& type = require(v, "type", path + ".");
  if (!type.is_string()) invalid("field '" + path + ".type' must be a string");
  const auto t = type.get<std::string>();
  try {
    if (t == "plane") {
      return Plane(read_vec3(require(v, "point_um", path + "."), path + ".point_um"),
                   read_vec3(require(v, "normal", path + "."), path + ".normal"));
    }
    if (t == "rect") {
      return Rect(read_vec3(require(v, "center_um", path + "."), path + ".center_um"),
                  read_vec3(require(v, "normal", path + "."), path + ".normal"),
                  read_vec3(require(v, "u_axis", path + "."), path + ".u_axis"),
                  read_number(require(v, "half_u_um", path + "."), path + ".half_u_um"),
                  read_number(require(v, "half_v_um", path + "."), path + ".half_v_um"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SpecInvalid) throw;
    invalid("field '" + path + "': " + e.what());
  }
  invalid("field '" + path + ".type' must be \"plane\" or \"rect\", got \"" + t + "\"");
}

json write_reflector(const Reflector& r) {
  if (const auto* plane = std::get_if<Plane>(&r)) {
    json out;
    out["type"] = "plane";
    out["point_um"] = write_vec3(plane->point());
    out["normal"] = write_vec3(plane->normal());
    return out;
  }
  const auto& rect = std::get<Rect>(r);
  json out;
  out["type"] = "rect";
  out["center_um"] = write_vec3(rect.center());
  out["normal"] = write_vec3(rect.normal());
  out["u_axis"] = write_vec3(rect.u_axis());
  out["half_u_um"] = rect.half_u();
  out["half_v_um"] = rect.half_v();
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string_view to_string(TopologyId id) noexcept {
  for (const auto& entry : kIds) {
    if (entry.id == id) return entry.name;
  }
  return "unknown";
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::None: return "none";
    case ModelKind::Siso: return "siso";
    case ModelKind::HalfSpace: return "halfspace";
    case ModelKind::TwoPlane: return "twoplane";
  }
  return "none";
}

TopologyId parse_topology_id(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& entry : kIds) {
    if (entry.name == lower) return entry.id;
  }
  std::string available;
  for (const auto& entry : kIds) {
    if (!available.empty()) available += ", ";
    available += entry.name;
  }
  invalid("unknown topology '" + std::string(text) + "'; available: " + available);
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::None, ModelKind::Siso, ModelKind::HalfSpace, ModelKind::TwoPlane}) {
    if (to_string(k) == text) return k;
  }
  invalid("unknown model '" + std::string(text) + "'; available: none, siso, halfspace, twoplane");
}

std::vector<TopologyId> paper_topology_ids() {
  return {TopologyId::T0, TopologyId::T1,       TopologyId::T2,      TopologyId::T3,
          TopologyId::T4, TopologyId::T2Finite, TopologyId::TwoPlane};
}

void TopologySpec::validate() const {
  if (!tx.is_finite() || !rx_center.is_finite()) invalid("tx and rx_center must be finite");
  if (!(r_r > 0.0) || !std::isfinite(r_r)) invalid("r_r_um must be > 0");
  if (geometry::distance(tx, rx_center) <= r_r) invalid("tx lies inside the receiver");
  if (uses_gap(id)) {
    if (!d) invalid("topology '" + std::string(to_string(id)) + "' requires d_um");
    if (!(*d > 0.0) || !std::isfinite(*d)) invalid("d_um must be > 0");
  }
  if (id == TopologyId::TwoPlane || model == ModelKind::TwoPlane) {
    if (!k_prime) invalid("two-plane topologies require k_prime");
    if (*k_prime < 1) invalid("k_prime must be >= 1");
  }
  if (id == TopologyId::T4 || id == TopologyId::T2Finite) {
    if (!(rect_side > 0.0) || !std::isfinite(rect_side)) invalid("rect_side_um must be > 0");
  }
  if (id == TopologyId::Custom) {
    if (model == ModelKind::HalfSpace && reflectors.empty()) {
      invalid("model 'halfspace' needs at least one reflector");
    }
    if (model == ModelKind::TwoPlane &&
        (reflectors.size() < 2 || !std::holds_alternative<Plane>(reflectors[0]) ||
         !std::holds_alternative<Plane>(reflectors[1]))) {
      invalid("model 'twoplane' needs the first two reflectors to be planes");
    }
  }
}

std::string builtin_topology_json(TopologyId id) {
  switch (id) {
    case TopologyId::T0:
      return R"({"schema": "mcvd-topology/1", "id": "t0", "tx_um": [0, 0, 10],
                 "rx_center_um": [10, 0, 0], "r_r_um": 5})";
    case TopologyId::T1:
      return R"({"schema": "mcvd-topology/1", "id": "t1", "tx_um": [10, 0, 10],
                 "rx_center_um": [10, 0, 0], "r_r_um": 5})";
    case TopologyId::T2:
      return R"({"schema": "mcvd-topology/1", "id": "t2", "tx_um": [20, 0, 0],
                 "rx_center_um": [10, 0, 0], "r_r_um": 5, "d_um": 1})";
    case TopologyId::T3:
      return R"({"schema": "mcvd-topology/1", "id": "t3", "tx_um": [20, 0, 5],
                 "rx_center_um": [10, 0, 0], "r_r_um": 5, "d_um": 1})";
    case TopologyId::T4:
      return R"({"schema": "mcvd-topology/1", "id": "t4", "tx_um": [5, 0, 0],
                 "rx_center_um": [15, 0, 0], "r_r_um": 5, "rect_side_um": 40})";
    case TopologyId::T2Finite:
      return R"({"schema": "mcvd-topology/1", "id": "t2_finite", "tx_um": [20, 0, 0],
                 "rx_center_um": [10, 0, 0], "r_r_um": 5, "d_um": 1, "rect_side_um": 40})";
    case TopologyId::TwoPlane:
      return R"({"schema": "mcvd-topology/1", "id": "twoplane", "tx_um": [8, 0, 10],
                 "rx_center_um": [8, 0, 0], "r_r_um": 5, "d_um": 3, "k_prime": 11})";
    case TopologyId::Custom:
      break;
  }
  invalid("'custom' has no builtin document");
}

TopologySpec parse_topology_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  if (!doc.is_object()) invalid("topology document must be a JSON object");
  if (const auto it = doc.find("schema"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != kSchema) {
      invalid("field 'schema' must be \"" + std::string(kSchema) + "\"");
    }
  }

  TopologySpec spec;
  const json& id = require(doc, "id", "");
  if (!id.is_string()) invalid("field 'id' must be a string");
  spec.id = parse_topology_id(id.get<std::string>());
  spec.tx = read_vec3(require(doc, "tx_um", ""), "tx_um");
  spec.rx_center = read_vec3(require(doc, "rx_center_um", ""), "rx_center_um");
  spec.r_r = read_number(require(doc, "r_r_um", ""), "r_r_um");
  if (const auto it = doc.find("d_um"); it != doc.end()) spec.d = read_number(*it, "d_um");
  if (const auto it = doc.find("k_prime"); it != doc.end()) {
    if (!it->is_number_integer()) invalid("field 'k_prime' must be an integer");
    spec.k_prime = it->get<int>();
  }
  if (const auto it = doc.find("rect_side_um"); it != doc.end()) {
    spec.rect_side = read_number(*it, "rect_side_um");
  }
  if (const auto it = doc.find("model"); it != doc.end()) {
    if (!it->is_string()) invalid("field 'model' must be a string");
    spec.model = parse_model_kind(it->get<std::string>());
  }
  if (const auto it = doc.find("reflectors"); it != doc.end()) {
    if (!it->is_array()) invalid("field 'reflectors' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      spec.reflectors.push_back(read_reflector((*it)[i], "reflectors[" + std::to_string(i) + "]"));
    }
  }
  if (const auto it = doc.find("extra_receivers"); it != doc.end()) {
    if (!it->is_array()) invalid("field 'extra_receivers' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "extra_receivers[" + std::to_string(i) + "]";
      const json& rx = (*it)[i];
      if (!rx.is_object()) invalid("field '" + path + "' must be an object");
      AbsorbingSphere s{read_vec3(require(rx, "center_um", path + "."), path + ".center_um"),
                        read_number(require(rx, "r_r_um", path + "."), path + ".r_r_um")};
      if (!(s.radius > 0.0)) invalid("field '" + path + ".r_r_um' must be > 0");
      spec.extra_receivers.push_back(s);
    }
  }
  if (spec.id != TopologyId::Custom &&
      (!spec.reflectors.empty() || !spec.extra_receivers.empty() || doc.contains("model"))) {
    invalid("fields 'reflectors', 'extra_receivers' and 'model' are only valid for id \"custom\"");
  }
  spec.validate();
  return spec;
}

std::string to_json(const TopologySpec& spec) {
  json out;
  out["schema"] = kSchema;
  out["id"] = to_string(spec.id);
  out["tx_um"] = write_vec3(spec.tx);
  out["rx_center_um"] = write_vec3(spec.rx_center);
  out["r_r_um"] = spec.r_r;
  if (spec.d) out["d_um"] = *spec.d;
  if (spec.k_prime) out["k_prime"] = *spec.k_prime;
  if (spec.id == TopologyId::T4 || spec.id == TopologyId::T2Finite) {
    out["rect_side_um"] = spec.rect_side;
  }
  if (spec.id == TopologyId::Custom) {
    out["model"] = to_string(spec.model);
    json refl = json::array();
    for (const auto& r : spec.reflectors) refl.push_back(write_reflector(r));
    out["reflectors"] = refl;
    json extra = json::array();
    for (const auto& s : spec.extra_receivers) {
      json rx;
      rx["center_um"] = write_vec3(s.center);
      rx["r_r_um"] = s.radius;
      extra.push_back(rx);
    }
    out["extra_receivers"] = extra;
  }
  return out.dump(2);
}

TopologySpec paper_topology(TopologyId id, std::optional<double> r_r, std::optional<double> d,
                            std::optional<int> k_prime) {
  TopologySpec spec = parse_topology_json(builtin_topology_json(id));
  if (r_r) spec.r_r = *r_r;
  if (d) {
    if (!uses_gap(id)) invalid("topology '" + std::string(to_string(id)) + "' has no d variant");
    spec.d = *d;
  }
  if (k_prime) {
    if (id != TopologyId::TwoPlane) invalid("only 'twoplane' has a k_prime variant");
    spec.k_prime = *k_prime;
  }
  spec.validate();
  return spec;
}

std::vector<TopologySpec> paper_variants() {
  std::vector<TopologySpec> out;
  for (TopologyId id : {TopologyId::T0, TopologyId::T1}) {
    for (double r : {3.0, 5.0, 8.0}) out.push_back(paper_topology(id, r));
  }
  for (TopologyId id : {TopologyId::T2, TopologyId::T3}) {
    for (double gap : {1.0, 3.0, 5.0}) out.push_back(paper_topology(id, std::nullopt, gap));
  }
  out.push_back(paper_topology(TopologyId::T4));
  out.push_back(paper_topology(TopologyId::T2Finite));
  for (int k : {3, 5, 11}) {
    out.push_back(paper_topology(TopologyId::TwoPlane, std::nullopt, std::nullopt, k));
  }
  return out;
}

std::string variant_label(const TopologySpec& spec) {
  std::ostringstream os;
  os << to_string(spec.id);
  const auto num = [&os](double v) {
    if (v == std::floor(v)) {
      os << static_cast<long long>(v);
    } else {
      os << v;
    }
  };
  switch (spec.id) {
    case TopologyId::T0:
    case TopologyId::T1:
      os << "_rr";
      num(spec.r_r);
      break;
    case TopologyId::T2:
    case TopologyId::T3:
    case TopologyId::T2Finite:
      os << "_d";
      num(spec.d.value_or(0.0));
      break;
    case TopologyId::TwoPlane:
      os << "_k" << spec.k_prime.value_or(0);
      break;
    case TopologyId::T4:
    case TopologyId::Custom:
      break;
  }
  return os.str();
}

BuiltTopology build_topology(const TopologySpec& spec, double diffusion_coefficient) {
  spec.validate();
  const analytic::DiffusionParams diffusion{diffusion_coefficient};
  const AbsorbingSphere rx{spec.rx_center, spec.r_r};
  const Vec3 ex{1.0, 0.0, 0.0};
  const Vec3 ey{0.0, 1.0, 0.0};

  BuiltTopology out;
  out.environment.tx = spec.tx;
  out.environment.receivers.push_back(rx);

  const auto halfspace = [&](const Plane& plane) {
    return analytic::ChannelModel(analytic::HalfSpaceModel({spec.tx, rx, plane, diffusion}));
  };

  try {
    switch (spec.id) {
      case TopologyId::T0:
      case TopologyId::T1: {
        const Plane wall({0.0, 0.0, 0.0}, ex);
        out.environment.reflectors.emplace_back(wall);
        out.model = halfspace(wall);
        break;
      }
      case TopologyId::T2:
      case TopologyId::T3: {
        const Plane wall({spec.rx_center.x - spec.r_r - *spec.d, 0.0, 0.0}, ex);
        out.environment.reflectors.emplace_back(wall);
        out.model = halfspace(wall);
        break;
      }
      case TopologyId::T2Finite: {
        const Vec3 center{spec.rx_center.x - spec.r_r - *spec.d, 0.0, 0.0};
        const double half = spec.rect_side / 2.0;
        out.environment.reflectors.emplace_back(Rect(center, ex, ey, half, half));
        out.model = halfspace(Plane(center, ex));
        break;
      }
      case TopologyId::T4: {
        const Vec3 center{0.0, 0.0, 0.0};
        const double half = spec.rect_side / 2.0;
        out.environment.reflectors.emplace_back(Rect(center, ex, ey, half, half));
        out.model = halfspace(Plane(center, ex));
        break;
      }
      case TopologyId::TwoPlane: {
        const double offset = *spec.d + spec.r_r;
        const Plane low({spec.rx_center.x - offset, 0.0, 0.0}, ex);
        const Plane high({spec.rx_center.x + offset, 0.0, 0.0}, -ex);
        out.environment.reflectors.emplace_back(low);
        out.environment.reflectors.emplace_back(high);
        out.model = analytic::ChannelModel(
            analytic::TwoPlaneModel({spec.tx, rx, low, high, *spec.k_prime, diffusion}));
        break;
      }
      case TopologyId::Custom: {
        out.environment.reflectors = spec.reflectors;
        for (const auto& extra : spec.extra_receivers) out.environment.receivers.push_back(extra);
        switch (spec.model) {
          case ModelKind::None:
            break;
          case ModelKind::Siso:
            out.model = analytic::ChannelModel(analytic::SisoModel(
                {geometry::distance(spec.tx, spec.rx_center), spec.r_r, diffusion}));
            break;
          case ModelKind::HalfSpace: {
            const auto& first = spec.reflectors.front();
            Plane wall = std::holds_alternative<Plane>(first)
                             ? std::get<Plane>(first)
                             : std::get<Rect>(first).supporting_plane();
            if (wall.signed_distance(spec.tx) < 0.0) wall = Plane(wall.point(), -wall.normal());
            out.model = halfspace(wall);
            break;
          }
          case ModelKind::TwoPlane:
            out.model = analytic::ChannelModel(analytic::TwoPlaneModel(
                {spec.tx, rx, std::get<Plane>(spec.reflectors[0]),
                 std::get<Plane>(spec.reflectors[1]), *spec.k_prime, diffusion}));
            break;
        }
        break;
      }
    }
    out.environment.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SpecInvalid) throw;
    invalid(std::string("topology '") + std::string(to_string(spec.id)) + "': " + e.what());
  }
  return out;
}

}  // namespace mcvd::experiments
