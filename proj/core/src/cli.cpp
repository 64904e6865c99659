#include "relflow/cli.hpp"

#include <algorithm>
#include <sstream>

#include <CLI11.hpp>

#include "relflow/catalog.hpp"
#include "relflow/explore.hpp"
#include "relflow/flex.hpp"
#include "relflow/flow.hpp"
#include "relflow/render.hpp"
#include "relflow/surface_io.hpp"
#include "relflow/surgery.hpp"

namespace relflow {

namespace {

RelVector parse_rel_vector(const std::string& text, int k) {
  std::vector<Rational> weights;
  std::string t = text;
  if (!t.empty() && t.front() == '(') t = t.substr(1, t.size() - 2);
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) weights.push_back(rational_from_string(item));
  if (static_cast<int>(weights.size()) != k)
    throw UsageError("expected " + std::to_string(k) + " weights, got " +
                     std::to_string(weights.size()));
  Rational sum(0);
  for (const auto& wgt : weights) sum += wgt;
  if (sum != 0) throw UsageError("NoAdmissibleRelVector: weights must sum to zero");
  return RelVector(std::move(weights));
}

Vec2<Rational> parse_vec(const std::string& text) {
  std::string t = text;
  if (!t.empty() && t.front() == '(') t = t.substr(1, t.size() - 2);
  auto comma = t.find(',');
  if (comma == std::string::npos) throw UsageError("expected 'x,y'");
  return {rational_from_string(t.substr(0, comma)), rational_from_string(t.substr(comma + 1))};
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

struct InfoData {
  std::string backend, name;
  StratumSignature sig;
  std::string area;
  int k = 0, rel_rank = 0, chart_size = 0, abs_rank = 0;
};

template <class R>
InfoData collect_info(const FlatSurface<R>& s) {
  InfoData d;
  d.sig = stratum(s);
  d.area = to_string(area(s));
  d.k = s.n_vertices();
  d.rel_rank = rel_rank(s);
  PeriodChart chart = period_chart(s);
  d.chart_size = static_cast<int>(chart.generators.size());
  d.abs_rank = static_cast<int>(chart.abs_coeffs.size());
  return d;
}

void print_info(const AnySurface& s, bool as_json, std::ostream& out) {
  InfoData d = s.backend == "exact" ? collect_info(*s.exact) : collect_info(*s.floating);
  d.backend = s.backend;
  d.name = s.name;
  if (as_json) {
    out << "{\"backend\":\"" << d.backend << "\",\"name\":\"" << json_escape(d.name)
        << "\",\"genus\":" << d.sig.genus << ",\"orders\":[";
    for (size_t i = 0; i < d.sig.orders.size(); ++i)
      out << (i ? "," : "") << d.sig.orders[i];
    out << "],\"area\":\"" << d.area << "\",\"zeros\":" << d.k << ",\"rel_rank\":" << d.rel_rank
        << ",\"chart_generators\":" << d.chart_size << ",\"abs_rank\":" << d.abs_rank << "}\n";
  } else {
    out << "backend:     " << d.backend << "\n";
    if (!d.name.empty()) out << "name:        " << d.name << "\n";
    out << "genus:       " << d.sig.genus << "\n";
    out << "stratum:     (";
    for (size_t i = 0; i < d.sig.orders.size(); ++i) out << (i ? "," : "") << d.sig.orders[i];
    out << ")\n";
    out << "area:        " << d.area << "\n";
    out << "points:      " << d.k << "\n";
    out << "rel rank:    " << d.rel_rank << "\n";
    out << "chart size:  " << d.chart_size << " (absolute rank " << d.abs_rank << ")\n";
  }
}

int require_exact_backend(const AnySurface& s) {
  if (s.backend != "exact")
    throw ValidationError("FloatBackendUnsupported: this operation needs the exact backend");
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"relflow: exact computations on translation surfaces"};
  app.require_subcommand(1);

  std::string surface_arg, surface2_arg, rel_arg, vec_arg, out_arg, t_arg;
  bool json_flag = false, to_boundary = false;
  long event_budget = 1'000'000;
  double length_bound = 2;
  int p1 = 1, p2 = 1;
  int trials = 100;
  uint64_t seed = 0;
  double connections = -1;

  auto* info = app.add_subcommand("info", "stratum, genus, area, REL rank, chart dimensions");
  info->add_option("surface", surface_arg)->required();
  info->add_flag("--json", json_flag);

  auto* flow = app.add_subcommand("flow", "run the REL flow");
  flow->add_option("surface", surface_arg)->required();
  flow->add_option("--a", rel_arg, "zero-sum weights, e.g. -1,1")->required();
  flow->add_option("--t", t_arg, "flow time (rational)");
  flow->add_flag("--to-boundary", to_boundary, "flow until the principal boundary");
  flow->add_option("-o,--output", out_arg, "output surface file");
  flow->add_option("--event-budget", event_budget);
  flow->add_flag("--json", json_flag);

  auto* scan = app.add_subcommand("scan-flex", "flexible/rigid scan over direction classes");
  scan->add_option("surface", surface_arg)->required();
  scan->add_option("--a", rel_arg)->required();
  scan->add_option("--length-bound", length_bound, "direction classes up to this length");
  scan->add_flag("--json", json_flag);

  auto* glue = app.add_subcommand("glue", "slit-glue two surfaces");
  glue->add_option("surface1", surface_arg)->required();
  glue->add_option("surface2", surface2_arg)->required();
  glue->add_option("--p1", p1, "marked point label in surface1");
  glue->add_option("--p2", p2, "marked point label in surface2");
  glue->add_option("--v", vec_arg, "slit vector x,y")->required();
  glue->add_option("-o,--output", out_arg)->required();

  auto* render = app.add_subcommand("render", "SVG of a developed fundamental domain");
  render->add_option("surface", surface_arg)->required();
  render->add_option("-o,--output", out_arg)->required();
  render->add_option("--connections", connections, "overlay saddle connections up to length");

  auto* explore_cmd = app.add_subcommand("explore", "randomized principal-boundary statistics");
  explore_cmd->add_option("surface", surface_arg)->required();
  explore_cmd->add_option("--trials", trials);
  explore_cmd->add_option("--seed", seed);
  explore_cmd->add_option("--length-bound", length_bound);
  explore_cmd->add_flag("--json", json_flag);

  auto* catalog_cmd = app.add_subcommand("catalog", "list built-in surfaces");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 3;
  }

  try {
    if (*info) {
      print_info(load_surface(surface_arg), json_flag, out);
    } else if (*flow) {
      AnySurface s = load_surface(surface_arg);
      require_exact_backend(s);
      RelVector a = parse_rel_vector(rel_arg, s.exact->n_vertices());
      FlowOptions opt;
      opt.event_budget = event_budget;
      Rational t_target;
      if (to_boundary) {
        // An a-priori bound: flow far enough to hit any boundary that the
        // shortest shrinking connection predicts; fall back to a fixed
        // horizon when nothing shrinks.
        auto tc = collapse_time(*s.exact, a, Rational(1024));
        if (!tc) {
          out << "no horizontal saddle connection shrinks (searched up to length 32); "
                 "the flow line is complete there\n";
          return 0;
        }
        t_target = *tc + 1;
      } else {
        if (t_arg.empty()) throw UsageError("flow needs --t or --to-boundary");
        t_target = rational_from_string(t_arg);
      }
      FlowOutcome fo = rel_flow(*s.exact, a, t_target, opt);
      if (!fo.boundary) {
        AnySurface result;
        result.backend = "exact";
        result.name = s.name.empty() ? "" : s.name + " (flowed)";
        result.exact = fo.surface;
        if (!out_arg.empty()) {
          save_surface(result, out_arg);
          out << "finished at t = " << to_string(fo.elapsed) << "; wrote " << out_arg << "\n";
        } else {
          out << serialize_surface(*fo.surface, result.name);
        }
      } else {
        const Degeneration& d = fo.degeneration;
        std::string kind = d.kind == Degeneration::Kind::FiniteFace     ? "FiniteFace"
                           : d.kind == Degeneration::Kind::InfiniteFace ? "InfiniteFace"
                                                                        : "Unclassified";
        if (json_flag) {
          out << "{\"t_star\":\"" << to_string(fo.elapsed) << "\",\"classification\":\"" << kind
              << "\"";
          if (d.kind == Degeneration::Kind::InfiniteFace)
            out << ",\"type\":[" << d.genus1 << "," << d.genus2 << "]";
          out << "}\n";
        } else {
          out << "boundary hit at t* = " << to_string(fo.elapsed) << "\n";
          out << "classification: " << kind;
          if (d.kind == Degeneration::Kind::InfiniteFace)
            out << " of type (" << d.genus1 << "," << d.genus2 << ")";
          if (d.kind == Degeneration::Kind::Unclassified) out << " (" << d.reason << ")";
          out << "\n";
        }
        if (d.kind == Degeneration::Kind::InfiniteFace && !out_arg.empty()) {
          for (size_t i = 0; i < d.components.size(); ++i) {
            AnySurface comp;
            comp.backend = "exact";
            comp.name = "component " + std::to_string(i + 1);
            comp.exact = d.components[i];
            std::string path = out_arg + ".comp" + std::to_string(i + 1) + ".json";
            save_surface(comp, path);
            out << "wrote " << path << "\n";
          }
        }
      }
    } else if (*scan) {
      AnySurface s = load_surface(surface_arg);
      Rational bound2 = Rational(length_bound) * Rational(length_bound);
      if (s.backend == "exact") {
        RelVector a = parse_rel_vector(rel_arg, s.exact->n_vertices());
        FlexibilityWitness w = flexibility_witness(*s.exact, a, bound2);
        if (json_flag) {
          out << "{\"flexible\":" << (w.flexible ? "true" : "false");
          if (w.flexible)
            out << ",\"direction\":[\"" << to_string(w.direction_q.x) << "\",\""
                << to_string(w.direction_q.y) << "\"],\"graph_edges\":" << w.graph.edges.size();
          out << ",\"length_bound\":" << length_bound << "}\n";
        } else if (w.flexible) {
          out << "flexible: witness direction (" << to_string(w.direction_q.x) << ","
              << to_string(w.direction_q.y) << "), minimal graph with " << w.graph.edges.size()
              << " edge(s)\n";
        } else {
          out << "rigid up to length " << length_bound << "\n";
        }
      } else {
        RelVector a = parse_rel_vector(rel_arg, s.floating->n_vertices());
        FlexibilityWitness w = flexibility_witness(*s.floating, a, to_double(bound2));
        if (json_flag) {
          out << "{\"flexible\":" << (w.flexible ? "true" : "false") << ",\"length_bound\":"
              << length_bound << "}\n";
        } else if (w.flexible) {
          out << "flexible: witness direction (" << w.direction_d.x << "," << w.direction_d.y
              << ")\n";
        } else {
          out << "rigid up to length " << length_bound << "\n";
        }
      }
    } else if (*glue) {
      AnySurface s1 = load_surface(surface_arg), s2 = load_surface(surface2_arg);
      require_exact_backend(s1);
      require_exact_backend(s2);
      FlatSurfaceQ glued = slit_glue(*s1.exact, p1, *s2.exact, p2, parse_vec(vec_arg));
      AnySurface result;
      result.backend = "exact";
      result.name = "glued";
      result.exact = std::move(glued);
      save_surface(result, out_arg);
      out << "wrote " << out_arg << "\n";
    } else if (*render) {
      AnySurface s = load_surface(surface_arg);
      RenderOptions opt;
      if (connections >= 0) opt.connections_length2 = connections * connections;
      std::ofstream f(out_arg);
      if (!f) throw UsageError("cannot write '" + out_arg + "'");
      f << render_svg(s, opt);
      out << "wrote " << out_arg << "\n";
    } else if (*explore_cmd) {
      AnySurface s = load_surface(surface_arg);
      require_exact_backend(s);
      ExploreOptions opt;
      opt.trials = trials;
      opt.seed = seed;
      opt.length2 = Rational(length_bound) * Rational(length_bound);
      ExploreReport rep = explore(*s.exact, opt);
      out << (json_flag ? rep.to_json() + "\n" : rep.table());
    } else if (*catalog_cmd) {
      for (const std::string& name : catalog_names()) out << "catalog:" << name << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code) {
      case ErrorCode::Validation:
        return 1;
      case ErrorCode::Budget:
        return 2;
      case ErrorCode::Usage:
        return 3;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace relflow
