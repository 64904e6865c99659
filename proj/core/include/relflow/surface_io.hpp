#pragma once

#include <string>

#include "relflow/catalog.hpp"
#include "relflow/surface.hpp"

namespace relflow {

// Versioned UTF-8 JSON surface files. Exact holonomies are written as
// canonical "p/q" strings so that parse(serialize(s)) round-trips
// bit-exactly; float holonomies use round-trip decimal precision.
std::string serialize_surface(const FlatSurfaceQ& s, const std::string& name = "");
std::string serialize_surface(const FlatSurfaceD& s, const std::string& name = "");

AnySurface parse_surface(const std::string& json_text);

// Reads a file path, or resolves "catalog:NAME".
AnySurface load_surface(const std::string& spec);
void save_surface(const AnySurface& s, const std::string& path);

}  // namespace relflow
