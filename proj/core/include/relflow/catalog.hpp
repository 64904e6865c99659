#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relflow/surface.hpp"

namespace relflow {

// Flat torus from a positively oriented lattice basis, one marked point.
FlatSurfaceQ torus(const Vec2<Rational>& u, const Vec2<Rational>& w);

// Flat torus with a second marked point at p (strictly inside the
// fundamental parallelogram, as coefficients of the basis).
FlatSurfaceQ torus_with_point(const Vec2<Rational>& u, const Vec2<Rational>& w,
                              const Rational& alpha, const Rational& beta);

FlatSurfaceQ square_torus();

// Two unit square tori cross-glued along a slit; genus 2, stratum (1,1).
FlatSurfaceQ slit_tori(const Vec2<Rational>& slit);

// Genus-2 surface in the principal stratum with incommensurable sides: a
// unit torus glued to a (3/2, 0), (1/4, 1) torus along a horizontal slit of
// length 2/3. Has a single shortest horizontal connection between its two
// zeros, so the (1,-1) flow collapses to a finite face.
FlatSurfaceQ genus2_surface();

// Genus-3 surface with four simple zeros: a chain of three tori joined by
// two slits.
FlatSurfaceQ genus3_surface();

// The regular decagon with opposite sides identified; genus 2, two simple
// zeros. Irrational coordinates: float backend only.
FlatSurfaceD decagon_surface();

// A surface of either backend, as loaded from a file or the catalog.
struct AnySurface {
  std::string backend;  // "exact" or "float"
  std::string name;
  std::optional<FlatSurfaceQ> exact;
  std::optional<FlatSurfaceD> floating;
};

// Resolves "torus", "slit-tori(1/2)", "slit-tori(1/2,1/3)", "genus2",
// "genus3", "decagon".
AnySurface catalog_surface(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace relflow
