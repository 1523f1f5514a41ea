#pragma once

// JSON documents for domains and maps. Complex numbers are [re, im]; doubles are
// written in shortest round-trip form so save + load is lossless.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "iml/domain.hpp"
#include "iml/map.hpp"
#include "iml/riemann.hpp"

namespace iml {

using json = nlohmann::json;

namespace detail {

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx json_cplx(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SerializationError(std::string("expected [re, im] for ") + what);
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SerializationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw SerializationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline cplx cnum(const json& j, const char* key) { return json_cplx(field(j, key), key); }

inline std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw SerializationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline json to_json(const DomainSpec& d);
inline DomainSpec domain_from_json(const json& j);

inline json to_json(const MapSpec& m) {
  using detail::cplx_json;
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Moebius>) {
          return {{"variant", "Moebius"}, {"a", cplx_json(k.a)}, {"b", cplx_json(k.b)},
                  {"c", cplx_json(k.c)}, {"d", cplx_json(k.d)}};
        } else if constexpr (std::is_same_v<K, CayleySquare>) {
          return {{"variant", "CayleySquare"}};
        } else if constexpr (std::is_same_v<K, PowerPerturb>) {
          return {{"variant", "PowerPerturb"}, {"eps", k.eps}};
        } else if constexpr (std::is_same_v<K, Affine>) {
          return {{"variant", "Affine"}, {"a", cplx_json(k.a)}, {"b", cplx_json(k.b)}};
        } else if constexpr (std::is_same_v<K, Exp>) {
          return {{"variant", "Exp"}};
        } else if constexpr (std::is_same_v<K, Polynomial>) {
          json c = json::array();
          for (const auto& a : k.coeffs) c.push_back(cplx_json(a));
          return {{"variant", "Polynomial"}, {"coeffs", c}};
        } else if constexpr (std::is_same_v<K, Composition>) {
          json c = json::array();
          for (const auto& m : k.maps) c.push_back(to_json(m));
          return {{"variant", "Composition"}, {"maps", c}};
        } else {
          return {{"variant", "NumericalRiemann"}, {"domain", to_json(*k.domain)},
                  {"base_point", cplx_json(k.base_point)}, {"n_nodes", k.n_nodes}};
        }
      },
      m.variant());
}

inline MapSpec map_from_json(const json& j) {
  using namespace detail;
  const std::string v = str(j, "variant");
  if (v == "Moebius") return Moebius{cnum(j, "a"), cnum(j, "b"), cnum(j, "c"), cnum(j, "d")};
  if (v == "CayleySquare") return CayleySquare{};
  if (v == "PowerPerturb") return PowerPerturb{num(j, "eps")};
  if (v == "Affine") return Affine{cnum(j, "a"), cnum(j, "b")};
  if (v == "Exp") return Exp{};
  if (v == "Polynomial") {
    Polynomial p;
    const json& c = field(j, "coeffs");
    if (!c.is_array() || c.empty()) throw SerializationError("Polynomial coeffs must be a non-empty array");
    for (const auto& a : c) p.coeffs.push_back(json_cplx(a, "coeffs"));
    return p;
  }
  if (v == "Composition") {
    Composition c;
    const json& maps = field(j, "maps");
    if (!maps.is_array()) throw SerializationError("Composition maps must be an array");
    for (const auto& m : maps) c.maps.push_back(map_from_json(m));
    return c;
  }
  if (v == "NumericalRiemann") {
    auto dom = std::make_shared<const DomainSpec>(domain_from_json(field(j, "domain")));
    const cplx base = cnum(j, "base_point");
    const int n = static_cast<int>(num(j, "n_nodes"));
    RiemannOptions opts;
    opts.n_nodes = n;
    auto solved = RiemannSolve::solve(*dom, base, opts);
    return NumericalRiemann{dom, base, n, solved};
  }
  throw SerializationError("unknown map variant '" + v + "'");
}

inline json to_json(const CurvePiece& p) {
  using detail::cplx_json;
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Segment>) {
          return {{"kind", "segment"}, {"from", cplx_json(k.from)}, {"to", cplx_json(k.to)}};
        } else if constexpr (std::is_same_v<K, Arc>) {
          return {{"kind", "arc"},
                  {"center", cplx_json(k.center)},
                  {"radius", k.radius},
                  {"theta0", k.theta0},
                  {"theta1", k.theta1}};
        } else if constexpr (std::is_same_v<K, Line>) {
          return {{"kind", "line"}, {"point", cplx_json(k.point)}, {"direction", cplx_json(k.direction)}};
        } else if constexpr (std::is_same_v<K, Mapped>) {
          return {{"kind", "mapped"}, {"map", to_json(k.map)}, {"base", to_json(*k.base)}};
        } else {
          throw SerializationError("analytic curve pieces carry code and cannot be serialized");
          return json{};
        }
      },
      p.variant());
}

inline CurvePiece piece_from_json(const json& j) {
  using namespace detail;
  const std::string k = str(j, "kind");
  if (k == "segment") return Segment{cnum(j, "from"), cnum(j, "to")};
  if (k == "arc") return Arc{cnum(j, "center"), num(j, "radius"), num(j, "theta0"), num(j, "theta1")};
  if (k == "line") return Line{cnum(j, "point"), cnum(j, "direction")};
  if (k == "mapped")
    return Mapped{map_from_json(field(j, "map")), std::make_shared<const CurvePiece>(piece_from_json(field(j, "base")))};
  throw SerializationError("unknown curve piece kind '" + k + "'");
}

inline json to_json(const DomainSpec& d) {
  using detail::cplx_json;
  json j = std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disc>) {
          return {{"variant", "Disc"}, {"center", cplx_json(k.center)}, {"radius", k.radius}};
        } else if constexpr (std::is_same_v<K, HalfPlane>) {
          return {{"variant", "HalfPlane"},
                  {"boundary_point", cplx_json(k.boundary_point)},
                  {"inner_normal", cplx_json(k.inner_normal)}};
        } else if constexpr (std::is_same_v<K, DiscComplement>) {
          return {{"variant", "DiscComplement"}, {"center", cplx_json(k.center)}, {"radius", k.radius}};
        } else if constexpr (std::is_same_v<K, Annulus>) {
          return {{"variant", "Annulus"},
                  {"center", cplx_json(k.center)},
                  {"r_inner", k.r_inner},
                  {"r_outer", k.r_outer}};
        } else if constexpr (std::is_same_v<K, HalfDisc>) {
          return {{"variant", "HalfDisc"}};
        } else if constexpr (std::is_same_v<K, ConformalImage>) {
          return {{"variant", "ConformalImage"}, {"base", to_json(*k.base)}, {"map", to_json(k.map)}};
        } else {
          json b = json::array();
          for (const auto& p : k.pieces) b.push_back(to_json(p));
          json out = {{"variant", "JordanDomain"}, {"regularity_tag", k.regularity_tag}, {"boundary", b}};
          if (k.interior_point) out["interior_point"] = cplx_json(*k.interior_point);
          return out;
        }
      },
      d.variant);
  j["name"] = d.name;
  return j;
}

inline DomainSpec domain_from_json(const json& j) {
  using namespace detail;
  const std::string v = str(j, "variant");
  const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : v;
  try {
    if (v == "Disc") return make_disc(cnum(j, "center"), num(j, "radius"), name);
    if (v == "HalfPlane") return make_half_plane(cnum(j, "boundary_point"), cnum(j, "inner_normal"), name);
    if (v == "DiscComplement") return make_disc_complement(cnum(j, "center"), num(j, "radius"), name);
    if (v == "Annulus") return make_annulus(cnum(j, "center"), num(j, "r_inner"), num(j, "r_outer"), name);
    if (v == "HalfDisc") return make_half_disc(name);
    if (v == "ConformalImage")
      return make_conformal_image(domain_from_json(field(j, "base")), map_from_json(field(j, "map")), name);
    if (v == "JordanDomain") {
      std::vector<CurvePiece> pieces;
      const json& b = field(j, "boundary");
      if (!b.is_array()) throw SerializationError("JordanDomain boundary must be an array");
      for (const auto& p : b) pieces.push_back(piece_from_json(p));
      std::optional<cplx> ip;
      if (j.contains("interior_point")) ip = cnum(j, "interior_point");
      return make_jordan(std::move(pieces), str(j, "regularity_tag"), name, ip);
    }
  } catch (const PreconditionError& e) {
    throw SerializationError(std::string("invalid ") + v + ": " + e.what());
  }
  throw SerializationError("unknown domain variant '" + v + "'");
}

inline std::string dump_domain(const DomainSpec& d, int indent = -1) { return to_json(d).dump(indent); }

inline DomainSpec parse_domain(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SerializationError(std::string("malformed JSON: ") + e.what());
  }
  return domain_from_json(j);
}

inline DomainSpec load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SerializationError("cannot read domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_domain(ss.str());
}

}  // namespace iml
