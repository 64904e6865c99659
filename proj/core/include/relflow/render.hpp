#pragma once

#include <optional>
#include <string>

#include "relflow/catalog.hpp"

namespace relflow {

struct RenderOptions {
  // Overlay saddle connections up to this length (squared) from each zero.
  std::optional<double> connections_length2;
};

// SVG 1.1 drawing of a developed fundamental domain: triangles, edges,
// labeled zeros; edges belonging to a homologous pair are highlighted with
// class "bigon".
std::string render_svg(const AnySurface& s, const RenderOptions& opt = {});

}  // namespace relflow
