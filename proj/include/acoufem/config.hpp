#pragma once

// JSON run configuration: geometry, problem data, and per-subcommand
// options. Parsing is strict: unknown keys are rejected so typos in
// scenario files fail loudly instead of silently using defaults.

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "acoufem/impedance.hpp"
#include "acoufem/mesh.hpp"
#include "acoufem/problem.hpp"

namespace acoufem {

using Json = nlohmann::json;

struct GeometryConfig {
  RectDomain domain1;
  RectDomain domain2;
  int nx1 = 0, ny1 = 0;
  int nx2 = 0, ny2 = 0;
  std::map<Edge, FacetTag> tags1;
  std::map<Edge, FacetTag> tags2;
};

struct ZetaConfig {
  std::string type = "constant";  // "constant" or "mass_spring_damper"
  Complex value{0.0, 0.0};
  double mass = 0.0, damping = 0.0, spring = 0.0;
  double rho = 1.0, sound_speed = 1.0, omega = 0.0;

  ImpedanceField build() const {
    if (type == "constant") return ImpedanceField::constant(value);
    return ImpedanceField::mass_spring_damper(mass, damping, spring, rho, sound_speed, omega);
  }
};

struct ConvergenceConfig {
  int levels = 4;
  std::vector<int> orders{1};
  std::vector<double> kappas;
};

struct SurfaceWaveRun {
  double kappa = 0.0;
  Complex zeta{0.0, 0.0};
  int nx1 = 0, ny1 = 0, nx2 = 0, ny2 = 0;
};

struct SolveConfig {
  int samples_x = 200;
  int samples_y = 20;
  bool exact_waveguide = false;  // compare against the two-media waveguide solution
  bool write_vtk = true;
};

struct RunConfig {
  std::string scenario;
  GeometryConfig geometry;
  double kappa = 0.0;
  int order = 1;
  Method method = Method::nitsche;
  double gamma = 0.0;  // 0 = calibrate from the inverse-constant estimate
  ZetaConfig zeta;
  std::map<std::pair<int, Edge>, Complex> inflow;
  std::string output_dir = "out";
  SolveConfig solve;
  std::optional<ConvergenceConfig> convergence;
  std::vector<SurfaceWaveRun> surface_wave;

  ProblemSpec problem() const {
    ProblemSpec spec;
    spec.kappa = kappa;
    spec.order = order;
    spec.method = method;
    spec.gamma = gamma;
    spec.zeta = zeta.build();
    spec.inflow = inflow;
    return spec;
  }
};

namespace detail {

inline void check_keys(const Json& j, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw std::invalid_argument("config: expected an object at '" + where + "'");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in '" + where + "'");
}

inline double get_num(const Json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key))
    throw std::invalid_argument("config: missing key '" + key + "' in '" + where + "'");
  if (!j.at(key).is_number())
    throw std::invalid_argument("config: '" + where + "." + key + "' must be a number");
  return j.at(key).get<double>();
}

inline int get_int(const Json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw std::invalid_argument("config: '" + where + "." + key + "' must be an integer");
  return j.at(key).get<int>();
}

inline Complex parse_complex(const Json& j, const std::string& where) {
  check_keys(j, where, {"re", "im"});
  Complex z(0.0, 0.0);
  if (j.contains("re")) z.real(get_num(j, where, "re"));
  if (j.contains("im")) z.imag(get_num(j, where, "im"));
  return z;
}

inline RectDomain parse_domain(const Json& j, const std::string& where) {
  check_keys(j, where, {"x_min", "x_max", "y_min", "y_max"});
  RectDomain d;
  d.x_min = get_num(j, where, "x_min");
  d.x_max = get_num(j, where, "x_max");
  d.y_min = get_num(j, where, "y_min");
  d.y_max = get_num(j, where, "y_max");
  return d;
}

inline Edge parse_edge(const std::string& s, const std::string& where) {
  if (s == "left") return Edge::left;
  if (s == "right") return Edge::right;
  if (s == "bottom") return Edge::bottom;
  if (s == "top") return Edge::top;
  throw std::invalid_argument("config: bad edge name '" + s + "' in '" + where + "'");
}

inline FacetTag parse_tag(const std::string& s, const std::string& where) {
  if (s == "io") return FacetTag::io;
  if (s == "s") return FacetTag::sound_hard;
  if (s == "interface") return FacetTag::interface_tag;
  throw std::invalid_argument("config: bad facet tag '" + s + "' in '" + where + "'");
}

inline std::map<Edge, FacetTag> parse_tags(const Json& j, const std::string& where) {
  check_keys(j, where, {"left", "right", "bottom", "top"});
  std::map<Edge, FacetTag> tags;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string())
      throw std::invalid_argument("config: '" + where + "." + it.key() + "' must be a string");
    tags[parse_edge(it.key(), where)] = parse_tag(it.value().get<std::string>(), where);
  }
  return tags;
}

inline GeometryConfig parse_geometry(const Json& j) {
  check_keys(j, "geometry",
             {"domain1", "domain2", "nx1", "ny1", "nx2", "ny2", "tags1", "tags2"});
  GeometryConfig g;
  for (const char* key : {"domain1", "domain2", "nx1", "ny1", "nx2", "ny2", "tags1", "tags2"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("config: missing key 'geometry.") + key + "'");
  g.domain1 = parse_domain(j.at("domain1"), "geometry.domain1");
  g.domain2 = parse_domain(j.at("domain2"), "geometry.domain2");
  g.nx1 = get_int(j, "geometry", "nx1");
  g.ny1 = get_int(j, "geometry", "ny1");
  g.nx2 = get_int(j, "geometry", "nx2");
  g.ny2 = get_int(j, "geometry", "ny2");
  g.tags1 = parse_tags(j.at("tags1"), "geometry.tags1");
  g.tags2 = parse_tags(j.at("tags2"), "geometry.tags2");
  return g;
}

inline ZetaConfig parse_zeta(const Json& j) {
  ZetaConfig z;
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw std::invalid_argument("config: 'problem.zeta' needs a string 'type'");
  z.type = j.at("type").get<std::string>();
  if (z.type == "constant") {
    check_keys(j, "problem.zeta", {"type", "re", "im"});
    if (j.contains("re")) z.value.real(get_num(j, "problem.zeta", "re"));
    if (j.contains("im")) z.value.imag(get_num(j, "problem.zeta", "im"));
  } else if (z.type == "mass_spring_damper") {
    check_keys(j, "problem.zeta",
               {"type", "mass", "damping", "spring", "rho", "sound_speed", "omega"});
    z.mass = get_num(j, "problem.zeta", "mass");
    z.damping = get_num(j, "problem.zeta", "damping");
    z.spring = get_num(j, "problem.zeta", "spring");
    z.rho = get_num(j, "problem.zeta", "rho");
    z.sound_speed = get_num(j, "problem.zeta", "sound_speed");
    z.omega = get_num(j, "problem.zeta", "omega");
  } else {
    throw std::invalid_argument("config: unknown zeta type '" + z.type + "'");
  }
  return z;
}

inline Method parse_method(const std::string& s) {
  if (s == "nitsche") return Method::nitsche;
  if (s == "standard") return Method::standard;
  throw std::invalid_argument("config: method must be 'nitsche' or 'standard', got '" + s + "'");
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  detail::check_keys(j, "<root>",
                     {"scenario", "geometry", "problem", "output_dir", "solve",
                      "convergence", "surface_wave"});
  RunConfig cfg;
  if (j.contains("scenario")) {
    if (!j.at("scenario").is_string())
      throw std::invalid_argument("config: 'scenario' must be a string");
    cfg.scenario = j.at("scenario").get<std::string>();
  }
  if (!j.contains("geometry")) throw std::invalid_argument("config: missing 'geometry'");
  cfg.geometry = detail::parse_geometry(j.at("geometry"));

  if (!j.contains("problem")) throw std::invalid_argument("config: missing 'problem'");
  const Json& p = j.at("problem");
  detail::check_keys(p, "problem", {"kappa", "order", "method", "gamma", "zeta", "inflow"});
  cfg.kappa = detail::get_num(p, "problem", "kappa");
  if (cfg.kappa <= 0.0) throw std::invalid_argument("config: 'problem.kappa' must be positive");
  if (p.contains("order")) cfg.order = detail::get_int(p, "problem", "order");
  if (cfg.order < 1 || cfg.order > 3)
    throw std::invalid_argument("config: 'problem.order' must be 1, 2 or 3");
  if (p.contains("method")) {
    if (!p.at("method").is_string())
      throw std::invalid_argument("config: 'problem.method' must be a string");
    cfg.method = detail::parse_method(p.at("method").get<std::string>());
  }
  if (p.contains("gamma")) {
    cfg.gamma = detail::get_num(p, "problem", "gamma");
    if (cfg.gamma < 0.0) throw std::invalid_argument("config: 'problem.gamma' must be >= 0");
  }
  if (!p.contains("zeta")) throw std::invalid_argument("config: missing 'problem.zeta'");
  cfg.zeta = detail::parse_zeta(p.at("zeta"));
  if (p.contains("inflow")) {
    const Json& in = p.at("inflow");
    if (!in.is_object()) throw std::invalid_argument("config: 'problem.inflow' must be an object");
    for (auto it = in.begin(); it != in.end(); ++it) {
      const std::string key = it.key();  // "<side>:<edge>", e.g. "1:left"
      const auto colon = key.find(':');
      if (colon == std::string::npos || (key.substr(0, colon) != "1" && key.substr(0, colon) != "2"))
        throw std::invalid_argument("config: inflow key '" + key + "' must look like '1:left'");
      const int side = key[0] == '1' ? 1 : 2;
      const Edge edge = detail::parse_edge(key.substr(colon + 1), "problem.inflow");
      cfg.inflow[{side, edge}] = detail::parse_complex(it.value(), "problem.inflow." + key);
    }
  }

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw std::invalid_argument("config: 'output_dir' must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }

  if (j.contains("solve")) {
    const Json& s = j.at("solve");
    detail::check_keys(s, "solve", {"samples_x", "samples_y", "exact_waveguide", "write_vtk"});
    if (s.contains("samples_x")) cfg.solve.samples_x = detail::get_int(s, "solve", "samples_x");
    if (s.contains("samples_y")) cfg.solve.samples_y = detail::get_int(s, "solve", "samples_y");
    if (cfg.solve.samples_x < 2 || cfg.solve.samples_y < 2)
      throw std::invalid_argument("config: solve sample counts must be >= 2");
    if (s.contains("exact_waveguide")) {
      if (!s.at("exact_waveguide").is_boolean())
        throw std::invalid_argument("config: 'solve.exact_waveguide' must be a boolean");
      cfg.solve.exact_waveguide = s.at("exact_waveguide").get<bool>();
    }
    if (s.contains("write_vtk")) {
      if (!s.at("write_vtk").is_boolean())
        throw std::invalid_argument("config: 'solve.write_vtk' must be a boolean");
      cfg.solve.write_vtk = s.at("write_vtk").get<bool>();
    }
  }

  if (j.contains("convergence")) {
    const Json& c = j.at("convergence");
    detail::check_keys(c, "convergence", {"levels", "orders", "kappas"});
    ConvergenceConfig cc;
    cc.levels = detail::get_int(c, "convergence", "levels");
    if (cc.levels < 4) throw std::invalid_argument("config: 'convergence.levels' must be >= 4");
    if (!c.contains("orders") || !c.at("orders").is_array())
      throw std::invalid_argument("config: 'convergence.orders' must be an array");
    cc.orders.clear();
    for (const auto& v : c.at("orders")) {
      if (!v.is_number_integer())
        throw std::invalid_argument("config: 'convergence.orders' entries must be integers");
      const int k = v.get<int>();
      if (k < 1 || k > 3) throw std::invalid_argument("config: orders must be in {1, 2, 3}");
      cc.orders.push_back(k);
    }
    if (!c.contains("kappas") || !c.at("kappas").is_array())
      throw std::invalid_argument("config: 'convergence.kappas' must be an array");
    for (const auto& v : c.at("kappas")) {
      if (!v.is_number() || v.get<double>() <= 0.0)
        throw std::invalid_argument("config: 'convergence.kappas' entries must be positive");
      cc.kappas.push_back(v.get<double>());
    }
    if (cc.orders.empty() || cc.kappas.empty())
      throw std::invalid_argument("config: convergence orders/kappas must be nonempty");
    cfg.convergence = cc;
  }

  if (j.contains("surface_wave")) {
    const Json& s = j.at("surface_wave");
    detail::check_keys(s, "surface_wave", {"runs"});
    if (!s.contains("runs") || !s.at("runs").is_array() || s.at("runs").empty())
      throw std::invalid_argument("config: 'surface_wave.runs' must be a nonempty array");
    int idx = 0;
    for (const auto& r : s.at("runs")) {
      const std::string where = "surface_wave.runs[" + std::to_string(idx++) + "]";
      detail::check_keys(r, where, {"kappa", "zeta", "nx1", "ny1", "nx2", "ny2"});
      SurfaceWaveRun run;
      run.kappa = detail::get_num(r, where, "kappa");
      if (run.kappa <= 0.0) throw std::invalid_argument("config: '" + where + ".kappa' must be positive");
      if (!r.contains("zeta")) throw std::invalid_argument("config: missing '" + where + ".zeta'");
      run.zeta = detail::parse_complex(r.at("zeta"), where + ".zeta");
      run.nx1 = detail::get_int(r, where, "nx1");
      run.ny1 = detail::get_int(r, where, "ny1");
      run.nx2 = detail::get_int(r, where, "nx2");
      run.ny2 = detail::get_int(r, where, "ny2");
      if (run.nx1 < 1 || run.ny1 < 1 || run.nx2 < 1 || run.ny2 < 1)
        throw std::invalid_argument("config: '" + where + "' resolutions must be >= 1");
      cfg.surface_wave.push_back(run);
    }
  }
  return cfg;
}

inline RunConfig parse_config(std::istream& is) {
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

// Serialization back to JSON; parse(serialize(parse(x))) == parse(x).
inline Json to_json(const RunConfig& cfg) {
  auto cplx = [](Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; };
  auto dom = [](const RectDomain& d) {
    return Json{{"x_min", d.x_min}, {"x_max", d.x_max}, {"y_min", d.y_min}, {"y_max", d.y_max}};
  };
  auto tags = [](const std::map<Edge, FacetTag>& ts) {
    Json out = Json::object();
    for (const auto& [edge, tag] : ts) out[to_string(edge)] = to_string(tag);
    return out;
  };
  Json j;
  j["scenario"] = cfg.scenario;
  j["geometry"] = {{"domain1", dom(cfg.geometry.domain1)}, {"domain2", dom(cfg.geometry.domain2)},
                   {"nx1", cfg.geometry.nx1},              {"ny1", cfg.geometry.ny1},
                   {"nx2", cfg.geometry.nx2},              {"ny2", cfg.geometry.ny2},
                   {"tags1", tags(cfg.geometry.tags1)},    {"tags2", tags(cfg.geometry.tags2)}};
  Json zeta;
  if (cfg.zeta.type == "constant") {
    zeta = {{"type", "constant"}, {"re", cfg.zeta.value.real()}, {"im", cfg.zeta.value.imag()}};
  } else {
    zeta = {{"type", "mass_spring_damper"}, {"mass", cfg.zeta.mass},
            {"damping", cfg.zeta.damping},  {"spring", cfg.zeta.spring},
            {"rho", cfg.zeta.rho},          {"sound_speed", cfg.zeta.sound_speed},
            {"omega", cfg.zeta.omega}};
  }
  Json inflow = Json::object();
  for (const auto& [key, g] : cfg.inflow)
    inflow[std::to_string(key.first) + ":" + to_string(key.second)] = cplx(g);
  j["problem"] = {{"kappa", cfg.kappa}, {"order", cfg.order},
                  {"method", to_string(cfg.method)}, {"gamma", cfg.gamma},
                  {"zeta", zeta}, {"inflow", inflow}};
  j["output_dir"] = cfg.output_dir;
  j["solve"] = {{"samples_x", cfg.solve.samples_x},
                {"samples_y", cfg.solve.samples_y},
                {"exact_waveguide", cfg.solve.exact_waveguide},
                {"write_vtk", cfg.solve.write_vtk}};
  if (cfg.convergence) {
    j["convergence"] = {{"levels", cfg.convergence->levels},
                        {"orders", cfg.convergence->orders},
                        {"kappas", cfg.convergence->kappas}};
  }
  if (!cfg.surface_wave.empty()) {
    Json runs = Json::array();
    for (const auto& r : cfg.surface_wave)
      runs.push_back({{"kappa", r.kappa}, {"zeta", cplx(r.zeta)},
                      {"nx1", r.nx1}, {"ny1", r.ny1}, {"nx2", r.nx2}, {"ny2", r.ny2}});
    j["surface_wave"] = {{"runs", runs}};
  }
  return j;
}

}  // namespace acoufem
