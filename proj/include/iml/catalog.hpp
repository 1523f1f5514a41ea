#pragma once

// Built-in domains, addressed by name.

#include <string>
#include <vector>

#include "iml/domain.hpp"
#include "iml/map.hpp"

namespace iml {

struct CatalogEntry {
  std::string name;  // may contain a <parameter> placeholder
  std::string description;
};

inline std::vector<CatalogEntry> catalog_entries() {
  return {
      {"unit-disc", "Disc{0, 1}"},
      {"disc-<r>", "Disc{0, r}, e.g. disc-0.6666666666666666"},
      {"disc-1", "Disc{1, 1}, the base of the example-a family"},
      {"half-plane", "upper half-plane Im z > 0"},
      {"half-disc", "upper half-disc {|z| < 1, Im z > 0}"},
      {"disc-complement", "DiscComplement{0, 1}"},
      {"example-a-<eps>", "image of Disc{1, 1} under z - z^(1+eps)/4, eps in (0, 1)"},
      {"example-b-H<H>", "lower unit half-disc glued to the strip |x| < 1, 0 <= y < H (C^{1,1} joins)"},
      {"annulus-<q>", "Annulus{0, q, 1}"},
      {"model-chi-<chi>", "model domain {2 Re z > chi |z|^2}"},
      {"blob", "image of the unit disc under z + 0.1 z^2"},
      {"blob-jordan", "the same blob as a JordanDomain (numerical Riemann map)"},
      {"ellipse", "image of the unit disc under z + 0.1 z^3"},
  };
}

namespace detail {

inline double catalog_param(const std::string& name, const std::string& prefix) {
  const std::string rest = name.substr(prefix.size());
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(rest, &used);
  } catch (const std::logic_error&) {
    throw PreconditionError("catalog: malformed parameter in '" + name + "'");
  }
  if (used != rest.size()) throw PreconditionError("catalog: malformed parameter in '" + name + "'");
  return v;
}

inline bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace detail

inline DomainSpec example_b_domain(double H) {
  if (!(H > 0.0)) throw PreconditionError("example-b: strip height must be positive");
  std::vector<CurvePiece> p{CurvePiece(Arc{0.0, 1.0, pi, 2.0 * pi}), CurvePiece(Segment{1.0, cplx(1.0, H)}),
                            CurvePiece(Segment{cplx(1.0, H), cplx(-1.0, H)}),
                            CurvePiece(Segment{cplx(-1.0, H), -1.0})};
  char name[64];
  std::snprintf(name, sizeof name, "example-b-H%g", H);
  return make_jordan(std::move(p), "C11", name, cplx(0.0, 0.5));
}

inline DomainSpec blob_domain() {
  return make_conformal_image(make_disc(0.0, 1.0), Polynomial{{0.0, 1.0, 0.1}}, "blob");
}

inline DomainSpec blob_jordan_domain() {
  const MapSpec f = Polynomial{{0.0, 1.0, 0.1}};
  std::vector<CurvePiece> p{CurvePiece(Mapped{f, std::make_shared<const CurvePiece>(Arc{0.0, 1.0, 0.0, 2.0 * pi})})};
  return make_jordan(std::move(p), "Cinf", "blob-jordan", cplx(0.0));
}

inline DomainSpec catalog_domain(const std::string& name) {
  using detail::catalog_param;
  using detail::starts_with;
  if (name == "unit-disc") return make_disc(0.0, 1.0, name);
  if (name == "disc-1") return make_disc(1.0, 1.0, name);
  if (name == "half-plane") return make_half_plane(0.0, I, name);
  if (name == "half-disc") return make_half_disc(name);
  if (name == "disc-complement") return make_disc_complement(0.0, 1.0, name);
  if (name == "blob") return blob_domain();
  if (name == "blob-jordan") return blob_jordan_domain();
  if (name == "ellipse")
    return make_conformal_image(make_disc(0.0, 1.0), Polynomial{{0.0, 1.0, 0.0, 0.1}}, name);
  if (starts_with(name, "example-a-")) {
    const double eps = catalog_param(name, "example-a-");
    return make_conformal_image(make_disc(1.0, 1.0, "disc-1"), PowerPerturb{eps}, name);
  }
  if (starts_with(name, "example-b-H")) return example_b_domain(catalog_param(name, "example-b-H"));
  if (starts_with(name, "annulus-")) return make_annulus(0.0, catalog_param(name, "annulus-"), 1.0, name);
  if (starts_with(name, "model-chi-")) {
    DomainSpec d = classify_model(catalog_param(name, "model-chi-"));
    d.name = name;
    return d;
  }
  if (starts_with(name, "disc-")) return make_disc(0.0, catalog_param(name, "disc-"), name);
  throw PreconditionError("unknown catalog domain '" + name + "'");
}

}  // namespace iml
