#include "relflow/surface_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relflow {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "relflow-surface";
constexpr int kVersion = 1;

template <class R>
json surface_json(const FlatSurface<R>& s, const std::string& backend, const std::string& name) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["backend"] = backend;
  if (!name.empty()) j["name"] = name;
  json nx = json::array(), tw = json::array(), hol = json::array();
  for (int h = 0; h < s.n_half_edges(); ++h) {
    nx.push_back(s.tri().next(h));
    tw.push_back(s.tri().twin(h));
    if constexpr (is_exact_v<R>)
      hol.push_back(json::array({to_string(s.hol(h).x), to_string(s.hol(h).y)}));
    else
      hol.push_back(json::array({s.hol(h).x, s.hol(h).y}));
  }
  j["next"] = std::move(nx);
  j["twin"] = std::move(tw);
  j["hol"] = std::move(hol);
  json labels = json::array();
  for (int v = 0; v < s.n_vertices(); ++v) labels.push_back(s.label(v));
  j["labels"] = std::move(labels);
  return j;
}

std::string line_position(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string serialize_surface(const FlatSurfaceQ& s, const std::string& name) {
  return surface_json(s, "exact", name).dump(1) + "\n";
}

std::string serialize_surface(const FlatSurfaceD& s, const std::string& name) {
  return surface_json(s, "float", name).dump(1) + "\n";
}

AnySurface parse_surface(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("surface file is not valid JSON at " + line_position(text, e.byte) +
                          ": " + e.what());
  }
  try {
    if (j.value("format", "") != kFormat)
      throw ValidationError("not a surface file (missing format tag)");
    if (j.value("version", 0) != kVersion)
      throw ValidationError("unsupported surface file version");
    std::string backend = j.at("backend").get<std::string>();
    if (backend != "exact" && backend != "float")
      throw ValidationError("unknown backend '" + backend + "'");
    std::vector<int32_t> nx, tw;
    for (const auto& x : j.at("next")) nx.push_back(x.get<int32_t>());
    for (const auto& x : j.at("twin")) tw.push_back(x.get<int32_t>());
    if (nx.size() != tw.size()) throw ValidationError("next/twin length mismatch");
    std::vector<int> labels;
    for (const auto& x : j.at("labels")) labels.push_back(x.get<int>());

    AnySurface out;
    out.backend = backend;
    out.name = j.value("name", "");
    const auto& hol = j.at("hol");
    if (hol.size() != nx.size()) throw ValidationError("hol length mismatch");
    if (backend == "exact") {
      std::vector<Vec2<Rational>> hq;
      for (const auto& pair : hol) {
        if (!pair.is_array() || pair.size() != 2)
          throw ValidationError("each holonomy must be a pair");
        hq.push_back({rational_from_string(pair[0].get<std::string>()),
                      rational_from_string(pair[1].get<std::string>())});
      }
      FlatSurfaceQ s(Triangulation(std::move(nx), std::move(tw)), std::move(hq),
                     std::move(labels));
      require_valid(s);
      out.exact = std::move(s);
    } else {
      std::vector<Vec2<double>> hd;
      for (const auto& pair : hol)
        hd.push_back({pair[0].get<double>(), pair[1].get<double>()});
      FlatSurfaceD s(Triangulation(std::move(nx), std::move(tw)), std::move(hd),
                     std::move(labels));
      require_valid(s);
      out.floating = std::move(s);
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed surface file: ") + e.what());
  }
}

AnySurface load_surface(const std::string& spec) {
  const std::string prefix = "catalog:";
  if (spec.rfind(prefix, 0) == 0) return catalog_surface(spec.substr(prefix.size()));
  std::ifstream in(spec);
  if (!in) throw UsageError("cannot open '" + spec + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_surface(ss.str());
}

void save_surface(const AnySurface& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  if (s.backend == "exact")
    out << serialize_surface(*s.exact, s.name);
  else
    out << serialize_surface(*s.floating, s.name);
}

}  // namespace relflow
