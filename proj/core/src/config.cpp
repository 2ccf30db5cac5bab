#include "ufep/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ufep {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering consumed keys so leftovers can be
// reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail(ptr_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& ptr, const std::string& msg) {
    throw ConfigError((ptr.empty() ? std::string("/") : ptr) + ": " + msg);
  }

  [[nodiscard]] std::string at(const std::string& key) const { return ptr_ + "/" + key; }

  const json* find(const std::string& key, bool required) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) {
      if (required) fail(at(key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  double number(const std::string& key, double fallback, bool required = false) {
    const json* v = find(key, required);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(at(key), "expected a number");
    return v->get<double>();
  }

  long integer(const std::string& key, long fallback) {
    const json* v = find(key, false);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key, false);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback, bool required = false) {
    const json* v = find(key, required);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  Vec2 vec2(const std::string& key, const Vec2& fallback, bool required = false) {
    const json* v = find(key, required);
    if (v == nullptr) return fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      fail(at(key), "expected an array of two numbers");
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) fail(at(key), "unknown key");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& ptr, const std::string& msg) {
  if (!ok) Obj::fail(ptr, msg);
}

LevelSetExpr parse_level_set(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  LevelSetExpr e;
  e.type = o.string("type", "", true);
  if (e.type == "circle") {
    e.center = o.vec2("center", Vec2::Zero(), true);
    e.radius = o.number("radius", 0.0, true);
    require(e.radius > 0.0, o.at("radius"), "radius must be positive");
    e.tag = o.string("tag", "");
  } else if (e.type == "half_plane") {
    e.normal = o.vec2("normal", Vec2::Zero(), true);
    require(e.normal.norm() > 0.0, o.at("normal"), "normal must be nonzero");
    e.offset = o.number("offset", 0.0, true);
    e.tag = o.string("tag", "");
  } else if (e.type == "box") {
    e.lo = o.vec2("lo", Vec2::Zero(), true);
    e.hi = o.vec2("hi", Vec2::Zero(), true);
    require((e.hi.array() > e.lo.array()).all(), o.at("hi"), "hi must exceed lo componentwise");
    e.tag = o.string("tag", "");
  } else if (e.type == "union" || e.type == "intersection") {
    const json* ops = o.find("operands", true);
    require(ops->is_array() && ops->size() >= 2, o.at("operands"), "expected an array of at least two expressions");
    for (std::size_t i = 0; i < ops->size(); ++i)
      e.operands.push_back(parse_level_set((*ops)[i], o.at("operands") + "/" + std::to_string(i)));
  } else if (e.type == "complement") {
    e.operands.push_back(parse_level_set(*o.find("operand", true), o.at("operand")));
  } else {
    Obj::fail(o.at("type"), "unknown level-set type '" + e.type + "'");
  }
  o.finish();
  return e;
}

json write_level_set(const LevelSetExpr& e) {
  json j;
  j["type"] = e.type;
  if (e.type == "circle") {
    j["center"] = {e.center.x(), e.center.y()};
    j["radius"] = e.radius;
    j["tag"] = e.tag;
  } else if (e.type == "half_plane") {
    j["normal"] = {e.normal.x(), e.normal.y()};
    j["offset"] = e.offset;
    j["tag"] = e.tag;
  } else if (e.type == "box") {
    j["lo"] = {e.lo.x(), e.lo.y()};
    j["hi"] = {e.hi.x(), e.hi.y()};
    j["tag"] = e.tag;
  } else if (e.type == "complement") {
    j["operand"] = write_level_set(e.operands.at(0));
  } else {
    j["operands"] = json::array();
    for (const auto& op : e.operands) j["operands"].push_back(write_level_set(op));
  }
  return j;
}

BcKind parse_kind(const std::string& s, const std::string& ptr) {
  if (s == "dirichlet_strong") return BcKind::dirichlet_strong;
  if (s == "dirichlet_nitsche") return BcKind::dirichlet_nitsche;
  if (s == "neumann") return BcKind::neumann;
  Obj::fail(ptr, "unknown boundary-condition kind '" + s + "'");
}

BcValueSpec parse_bc_value(const json& j, const std::string& ptr) {
  Obj o(j, ptr);
  BcValueSpec v;
  v.type = o.string("type", "", true);
  if (v.type == "constant") {
    v.value = o.vec2("value", Vec2::Zero(), true);
  } else if (v.type == "pressure") {
    v.pressure = o.number("pressure", 0.0, true);
  } else if (v.type == "affine") {
    v.value = o.vec2("value", Vec2::Zero());
    const json* g = o.find("gradient", true);
    const bool ok = g->is_array() && g->size() == 2 && (*g)[0].is_array() && (*g)[1].is_array() &&
                    (*g)[0].size() == 2 && (*g)[1].size() == 2;
    require(ok, o.at("gradient"), "expected a 2x2 array of numbers");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        require((*g)[r][c].is_number(), o.at("gradient"), "expected a 2x2 array of numbers");
        v.gradient(r, c) = (*g)[r][c].get<double>();
      }
  } else {
    Obj::fail(o.at("type"), "unknown value type '" + v.type + "'");
  }
  o.finish();
  return v;
}

json write_bc_value(const BcValueSpec& v) {
  json j;
  j["type"] = v.type;
  if (v.type == "constant") {
    j["value"] = {v.value.x(), v.value.y()};
  } else if (v.type == "pressure") {
    j["pressure"] = v.pressure;
  } else {
    j["value"] = {v.value.x(), v.value.y()};
    j["gradient"] = {{v.gradient(0, 0), v.gradient(0, 1)}, {v.gradient(1, 0), v.gradient(1, 1)}};
  }
  return j;
}

HistoryFlavor parse_flavor(const std::string& s, const std::string& ptr) {
  if (s == "aggregated") return HistoryFlavor::aggregated;
  if (s == "standard") return HistoryFlavor::standard;
  Obj::fail(ptr, "history must be 'aggregated' or 'standard'");
}

template <class F>
void guard(const std::string& ptr, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    Obj::fail(ptr, e.what());
  }
}

void collect_tags(const LevelSetExpr& e, std::set<std::string>& out) {
  if (!e.tag.empty()) out.insert(e.tag);
  for (const auto& op : e.operands) collect_tags(op, out);
}

ProblemConfig parse_json(const json& root) {
  ProblemConfig cfg;
  Obj top(root, "");

  {
    Obj g(*top.find("geometry", true), "/geometry");
    cfg.length = g.number("length", 0.0, true);
    require(cfg.length > 0.0, "/geometry/length", "length must be positive");
    cfg.geometry = parse_level_set(*g.find("level_set", true), "/geometry/level_set");
    g.finish();
  }
  {
    Obj m(*top.find("material", true), "/material");
    MaterialParams& p = cfg.material;
    p.E = m.number("E", p.E, true);
    p.nu = m.number("nu", p.nu, true);
    p.sigma_y = m.number("sigma_y", p.sigma_y, true);
    p.H = m.number("H", 0.0);
    p.theta = m.number("theta", 1.0);
    p.K_inf = m.number("K_inf", 0.0);
    p.K_0 = m.number("K_0", 0.0);
    p.delta = m.number("delta", 0.0);
    cfg.yield_normalization = m.string("yield_normalization", "deviatoric_norm");
    require(cfg.yield_normalization == "deviatoric_norm" || cfg.yield_normalization == "von_mises",
            "/material/yield_normalization", "expected 'deviatoric_norm' or 'von_mises'");
    m.finish();
    guard("/material", [&] { p.validate(); });
  }
  {
    const json* bcs = top.find("boundary_conditions", true);
    require(bcs->is_array(), "/boundary_conditions", "expected an array");
    for (std::size_t i = 0; i < bcs->size(); ++i) {
      const std::string ptr = "/boundary_conditions/" + std::to_string(i);
      Obj b((*bcs)[i], ptr);
      BcSpec s;
      s.region = b.string("region", "", true);
      s.kind = parse_kind(b.string("kind", "", true), b.at("kind"));
      if (const json* c = b.find("components", false)) {
        require(c->is_array() && c->size() == 2 && (*c)[0].is_boolean() && (*c)[1].is_boolean(), b.at("components"),
                "expected an array of two booleans");
        s.components = {(*c)[0].get<bool>(), (*c)[1].get<bool>()};
      }
      s.value = parse_bc_value(*b.find("value", true), b.at("value"));
      b.finish();
      require(s.kind != BcKind::dirichlet_strong || box_side(s.region).has_value(), ptr + "/region",
              "strong Dirichlet conditions need a box face (xmin, xmax, ymin, ymax)");
      std::set<std::string> tags;
      collect_tags(cfg.geometry, tags);
      require(box_side(s.region).has_value() || tags.contains(s.region), ptr + "/region",
              "'" + s.region + "' is neither a box face nor a level-set tag");
      cfg.boundary_conditions.push_back(std::move(s));
    }
  }
  cfg.body_force = top.vec2("body_force", Vec2::Zero());
  cfg.beta0 = top.number("nitsche_beta0", 25.0);
  require(cfg.beta0 > 0.0, "/nitsche_beta0", "must be positive");
  {
    Obj l(*top.find("load", true), "/load");
    cfg.amr.num_load_steps = static_cast<int>(l.integer("steps", 1));
    cfg.load_scale = l.number("scale", 1.0);
    l.finish();
  }
  if (const json* a = top.find("amr", false)) {
    Obj o(*a, "/amr");
    AmrConfig& c = cfg.amr;
    c.amr_step_freq = static_cast<int>(o.integer("amr_step_freq", c.amr_step_freq));
    c.num_amr_steps = static_cast<int>(o.integer("num_amr_steps", c.num_amr_steps));
    if (const json* e = o.find("eta_g_max", false)) {
      // null stands for "never adapt".
      if (e->is_null())
        c.eta_g_max = std::numeric_limits<double>::infinity();
      else
        c.eta_g_max = o.number("eta_g_max", 0.0);
    }
    c.theta_r = o.number("theta_r", c.theta_r);
    c.theta_c = o.number("theta_c", c.theta_c);
    const long ml = o.integer("max_level", c.max_level);
    const long il = o.integer("initial_uniform_level", c.initial_uniform_level);
    require(ml >= 0 && il >= 0, "/amr", "levels must be non-negative");
    c.max_level = static_cast<unsigned>(ml);
    c.initial_uniform_level = static_cast<unsigned>(il);
    o.finish();
  }
  guard("/amr", [&] { cfg.amr.validate(); });
  if (const json* d = top.find("discretization", false)) {
    Obj o(*d, "/discretization");
    DiscretizationOptions& opt = cfg.discretization;
    opt.history = parse_flavor(o.string("history", "aggregated"), o.at("history"));
    opt.space.aggregate = o.boolean("aggregation", true);
    opt.interior_points = static_cast<int>(o.integer("interior_points", opt.interior_points));
    opt.cut.volume_degree = static_cast<int>(o.integer("volume_degree", opt.cut.volume_degree));
    opt.cut.boundary_points = static_cast<int>(o.integer("boundary_points", opt.cut.boundary_points));
    opt.cut.bisection_iterations = static_cast<int>(o.integer("bisection_iterations", opt.cut.bisection_iterations));
    opt.cut.edge_samples = static_cast<int>(o.integer("edge_samples", opt.cut.edge_samples));
    require(opt.interior_points >= 1 && opt.cut.volume_degree >= 1 && opt.cut.boundary_points >= 1 &&
                opt.cut.bisection_iterations >= 1 && opt.cut.edge_samples >= 0,
            "/discretization", "quadrature and classification parameters must be positive");
    o.finish();
  }
  if (const json* n = top.find("newton", false)) {
    Obj o(*n, "/newton");
    NewtonConfig& c = cfg.newton;
    c.abs_tol = o.number("abs_tol", c.abs_tol);
    c.rel_tol = o.number("rel_tol", c.rel_tol);
    c.max_iters = static_cast<int>(o.integer("max_iters", c.max_iters));
    c.armijo = o.number("armijo", c.armijo);
    c.min_step = o.number("min_step", c.min_step);
    c.stagnation_tol = o.number("stagnation_tol", c.stagnation_tol);
    c.cg.rel_tol = o.number("cg_rel_tol", c.cg.rel_tol);
    c.cg.max_iters = o.integer("cg_max_iters", c.cg.max_iters);
    c.cg.jacobi = o.boolean("cg_jacobi", c.cg.jacobi);
    require(c.abs_tol >= 0.0 && c.rel_tol >= 0.0 && c.max_iters >= 1 && c.armijo > 0.0 && c.armijo < 0.5 &&
                c.min_step > 0.0 && c.min_step <= 1.0 && c.stagnation_tol >= 0.0 && c.cg.rel_tol > 0.0 &&
                c.cg.max_iters >= 0,
            "/newton", "solver parameters out of range");
    o.finish();
  }
  if (const json* o = top.find("output", false)) {
    Obj out(*o, "/output");
    cfg.output_dir = out.string("directory", "");
    out.finish();
  }
  if (const json* r = top.find("reference", false)) {
    Obj o(*r, "/reference");
    const std::string type = o.string("type", "", true);
    require(type == "thick_cylinder", o.at("type"), "only 'thick_cylinder' is supported");
    ThickCylinderReference ref;
    ref.inner_radius = o.number("inner_radius", 0.0, true);
    ref.outer_radius = o.number("outer_radius", 0.0, true);
    ref.pressure = o.number("pressure", 0.0, true);
    require(ref.inner_radius > 0.0 && ref.outer_radius > ref.inner_radius, "/reference",
            "need 0 < inner_radius < outer_radius");
    o.finish();
    cfg.reference = ref;
  }
  top.finish();
  guard("/boundary_conditions", [&] { (void)cfg.setup(); });
  return cfg;
}

}  // namespace

LevelSet LevelSetExpr::build() const {
  if (type == "circle") return LevelSet::circle(center, radius, tag);
  if (type == "half_plane") return LevelSet::half_plane(normal, offset, tag);
  if (type == "box") return LevelSet::box(lo, hi, tag);
  if (type == "complement") return LevelSet::complement(operands.at(0).build());
  if (type == "union" || type == "intersection") {
    if (operands.size() < 2) throw ConfigError(type + " needs at least two operands");
    LevelSet acc = operands[0].build();
    for (std::size_t i = 1; i < operands.size(); ++i)
      acc = type == "union" ? LevelSet::unite(acc, operands[i].build()) : LevelSet::intersect(acc, operands[i].build());
    return acc;
  }
  throw ConfigError("unknown level-set type '" + type + "'");
}

BcValue BcValueSpec::build() const {
  if (type == "constant") {
    const Vec2 v = value;
    return [v](const Vec2&, const Vec2&, double lambda) -> Vec2 { return lambda * v; };
  }
  if (type == "pressure") {
    const double p = pressure;
    return [p](const Vec2&, const Vec2& n, double lambda) -> Vec2 { return -lambda * p * n; };
  }
  if (type == "affine") {
    const Vec2 v = value;
    const Eigen::Matrix2d g = gradient;
    return [v, g](const Vec2& x, const Vec2&, double lambda) -> Vec2 { return lambda * (v + g * x); };
  }
  throw ConfigError("unknown value type '" + type + "'");
}

MaterialParams ProblemConfig::effective_material() const {
  return yield_normalization == "von_mises" ? material.from_von_mises() : material;
}

Problem ProblemConfig::problem() const {
  Problem p;
  p.material = effective_material();
  for (const auto& s : boundary_conditions) p.bcs.push_back({s.region, s.kind, s.components, s.value.build()});
  const Vec2 f = body_force;
  p.body_force = [f](const Vec2&, double lambda) -> Vec2 { return lambda * f; };
  p.beta0 = beta0;
  return p;
}

SimulationSetup ProblemConfig::setup() const {
  SimulationSetup s;
  s.length = length;
  s.level_set = geometry.build();
  s.problem = problem();
  s.discretization = discretization;
  s.discretization.space.dirichlet = strong_dirichlet_faces(s.problem);
  s.amr = amr;
  s.newton = newton;
  s.load_scale = load_scale;
  s.output_dir = output_dir;
  return s;
}

ProblemConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_json(root);
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ProblemConfig& cfg) {
  json j;
  j["geometry"] = {{"length", cfg.length}, {"level_set", write_level_set(cfg.geometry)}};
  const MaterialParams& m = cfg.material;
  j["material"] = {{"E", m.E},         {"nu", m.nu},   {"sigma_y", m.sigma_y}, {"H", m.H},
                   {"theta", m.theta}, {"K_inf", m.K_inf}, {"K_0", m.K_0},     {"delta", m.delta},
                   {"yield_normalization", cfg.yield_normalization}};
  j["boundary_conditions"] = json::array();
  for (const auto& b : cfg.boundary_conditions) {
    j["boundary_conditions"].push_back({{"region", b.region},
                                        {"kind", to_string(b.kind)},
                                        {"components", {b.components[0], b.components[1]}},
                                        {"value", write_bc_value(b.value)}});
  }
  j["body_force"] = {cfg.body_force.x(), cfg.body_force.y()};
  j["nitsche_beta0"] = cfg.beta0;
  j["load"] = {{"steps", cfg.amr.num_load_steps}, {"scale", cfg.load_scale}};
  const AmrConfig& a = cfg.amr;
  j["amr"] = {{"amr_step_freq", a.amr_step_freq},
              {"num_amr_steps", a.num_amr_steps},
              {"theta_r", a.theta_r},
              {"theta_c", a.theta_c},
              {"max_level", a.max_level},
              {"initial_uniform_level", a.initial_uniform_level}};
  j["amr"]["eta_g_max"] = std::isfinite(a.eta_g_max) ? json(a.eta_g_max) : json(nullptr);
  const DiscretizationOptions& d = cfg.discretization;
  j["discretization"] = {{"history", to_string(d.history)},
                         {"aggregation", d.space.aggregate},
                         {"interior_points", d.interior_points},
                         {"volume_degree", d.cut.volume_degree},
                         {"boundary_points", d.cut.boundary_points},
                         {"bisection_iterations", d.cut.bisection_iterations},
                         {"edge_samples", d.cut.edge_samples}};
  const NewtonConfig& n = cfg.newton;
  j["newton"] = {{"abs_tol", n.abs_tol},       {"rel_tol", n.rel_tol},     {"max_iters", n.max_iters},
                 {"armijo", n.armijo},         {"min_step", n.min_step},   {"stagnation_tol", n.stagnation_tol},
                 {"cg_rel_tol", n.cg.rel_tol}, {"cg_max_iters", n.cg.max_iters}, {"cg_jacobi", n.cg.jacobi}};
  j["output"] = {{"directory", cfg.output_dir}};
  if (cfg.reference) {
    j["reference"] = {{"type", "thick_cylinder"},
                      {"inner_radius", cfg.reference->inner_radius},
                      {"outer_radius", cfg.reference->outer_radius},
                      {"pressure", cfg.reference->pressure}};
  }
  return j.dump(2) + "\n";
}

}  // namespace ufep
