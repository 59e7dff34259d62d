#include "lipc/config.hpp"

#include "lipc/grid_io.hpp"
#include "lipc/io_util.hpp"
#include "lipc/network_io.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace lipc {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void allow_keys(const toml::table& t, const std::string& path, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : t) {
    const std::string key(k.str());
    if (!ok.count(key)) throw ParseError("unknown key \"" + join(path, key) + "\"");
  }
}

const toml::table* sub_table(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) throw ParseError("field \"" + join(path, key) + "\": expected a table");
  return n->as_table();
}

std::optional<double> opt_double(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
  throw ParseError("field \"" + join(path, key) + "\": expected a number");
}

double get_double(const toml::table& t, const std::string& key, const std::string& path, double fallback) {
  return opt_double(t, key, path).value_or(fallback);
}

double get_positive(const toml::table& t, const std::string& key, const std::string& path, double fallback) {
  const double v = get_double(t, key, path, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw ParseError("field \"" + join(path, key) + "\": must be positive");
  return v;
}

std::optional<std::int64_t> opt_int(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_integer()) throw ParseError("field \"" + join(path, key) + "\": expected an integer");
  return n->as_integer()->get();
}

int get_int(const toml::table& t, const std::string& key, const std::string& path, int fallback, int min_value) {
  const std::int64_t v = opt_int(t, key, path).value_or(fallback);
  if (v < min_value || v > 1'000'000'000)
    throw ParseError("field \"" + join(path, key) + "\": must be >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

bool get_bool(const toml::table& t, const std::string& key, const std::string& path, bool fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if (!n->is_boolean()) throw ParseError("field \"" + join(path, key) + "\": expected a boolean");
  return n->as_boolean()->get();
}

std::optional<std::string> opt_string(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_string()) throw ParseError("field \"" + join(path, key) + "\": expected a string");
  return n->as_string()->get();
}

std::optional<std::vector<double>> opt_doubles(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  std::vector<double> out;
  if (n->is_integer() || n->is_floating_point()) {
    out.push_back(*n->value<double>());
    return out;
  }
  if (!n->is_array()) throw ParseError("field \"" + join(path, key) + "\": expected a number or array of numbers");
  for (const auto& e : *n->as_array()) {
    if (!(e.is_integer() || e.is_floating_point()))
      throw ParseError("field \"" + join(path, key) + "\": expected an array of numbers");
    out.push_back(*e.value<double>());
  }
  return out;
}

std::vector<std::string> get_strings(const toml::table& t, const std::string& key, const std::string& path,
                                     std::vector<std::string> fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if (!n->is_array()) throw ParseError("field \"" + join(path, key) + "\": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : *n->as_array()) {
    if (!e.is_string()) throw ParseError("field \"" + join(path, key) + "\": expected an array of strings");
    out.push_back(e.as_string()->get());
  }
  return out;
}

void require_strictly_monotone(const std::vector<double>& v, bool decreasing, const std::string& path) {
  if (v.empty()) throw ParseError("field \"" + path + "\": must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw ParseError("field \"" + path + "\": entries must be positive");
    if (i > 0 && (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1])))
      throw ParseError("field \"" + path + "\": must be strictly " + (decreasing ? "decreasing" : "increasing"));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file, const std::string& path) {
  std::filesystem::path p(file);
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::exists(p)) throw ParseError("field \"" + path + "\": file not found: " + p.string());
  return p;
}

FieldSpec parse_field(const toml::node& n, const std::string& path, const std::filesystem::path& base) {
  FieldSpec f;
  if (n.is_integer() || n.is_floating_point()) {
    f.preset = "constant";
    f.value = *n.value<double>();
    return f;
  }
  if (n.is_string()) {
    f.preset = n.as_string()->get();
  } else if (n.is_table()) {
    const auto& t = *n.as_table();
    allow_keys(t, path, {"preset", "amplitude", "value", "mode", "center", "width", "offset", "slope", "file"});
    f.preset = opt_string(t, "preset", path).value_or("zero");
    f.amplitude = get_double(t, "amplitude", path, f.amplitude);
    f.value = get_double(t, "value", path, f.value);
    if (const toml::node* m = t.get("mode")) {
      f.mode.clear();
      if (m->is_integer()) {
        f.mode = {static_cast<int>(m->as_integer()->get()), static_cast<int>(m->as_integer()->get())};
      } else if (m->is_array()) {
        for (const auto& e : *m->as_array()) {
          if (!e.is_integer()) throw ParseError("field \"" + path + ".mode\": expected integers");
          f.mode.push_back(static_cast<int>(e.as_integer()->get()));
        }
      } else {
        throw ParseError("field \"" + path + ".mode\": expected an integer or array of integers");
      }
      if (f.mode.empty()) throw ParseError("field \"" + path + ".mode\": must not be empty");
      if (f.mode.size() == 1) f.mode.push_back(f.mode.front());
    }
    if (auto c = opt_doubles(t, "center", path)) f.center = *c;
    f.width = get_positive(t, "width", path, f.width);
    f.offset = get_double(t, "offset", path, f.offset);
    if (auto s = opt_doubles(t, "slope", path)) f.slope = *s;
    if (auto file = opt_string(t, "file", path)) f.file = resolve(base, *file, path + ".file");
  } else {
    throw ParseError("field \"" + path + "\": expected a number, preset name or table");
  }
  static const std::set<std::string> presets{"zero", "constant", "eigenmode", "bump", "tilted-plane", "csv"};
  if (!presets.count(f.preset)) throw ParseError("field \"" + path + ".preset\": unknown preset \"" + f.preset + "\"");
  if (f.preset == "csv" && f.file.empty()) throw ParseError("field \"" + path + ".file\": required for preset csv");
  return f;
}

Grid parse_grid(const toml::table& root) {
  const toml::table* t = sub_table(root, "grid", "");
  if (!t) throw ParseError("missing table \"grid\"");
  allow_keys(*t, "grid", {"dim", "cells", "lower", "upper"});
  const int dim = get_int(*t, "dim", "grid", 2, 1);
  if (dim > 2) throw ParseError("field \"grid.dim\": must be 1 or 2");
  auto expand = [&](const std::vector<double>& v, const char* key) {
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(dim), v[0]);
    if (static_cast<int>(v.size()) != dim)
      throw ParseError(std::string("field \"grid.") + key + "\": expected " + std::to_string(dim) + " entries");
    return v;
  };
  const auto cells = expand(opt_doubles(*t, "cells", "grid").value_or(std::vector<double>{32.0}), "cells");
  const auto lower = expand(opt_doubles(*t, "lower", "grid").value_or(std::vector<double>{0.0}), "lower");
  const auto upper = expand(opt_doubles(*t, "upper", "grid").value_or(std::vector<double>{1.0}), "upper");
  std::array<double, 2> lo{0.0, 0.0}, hi{0.0, 0.0};
  std::array<int, 2> nodes{1, 1};
  for (int a = 0; a < dim; ++a) {
    if (cells[a] != std::floor(cells[a]) || cells[a] < 2)
      throw ParseError("field \"grid.cells\": entries must be integers >= 2");
    if (!(lower[a] < upper[a])) throw ParseError("field \"grid.lower\": must be below grid.upper");
    nodes[a] = static_cast<int>(cells[a]) - 1;
    lo[a] = lower[a];
    hi[a] = upper[a];
  }
  return Grid(dim, lo, hi, nodes);
}

Nonlinearity parse_nonlinearity(const toml::table& root, const Grid& grid, const std::filesystem::path& base,
                                double& certify_window, int& certify_samples) {
  const toml::table* t = sub_table(root, "nonlinearity", "");
  if (!t) throw ParseError("missing table \"nonlinearity\"");
  const std::string p = "nonlinearity";
  allow_keys(*t, p,
             {"kind", "t0", "t1", "s0", "s1", "s2", "knots", "values", "left_slope", "right_slope", "file",
              "certify_window", "certify_samples"});
  const std::string kind = opt_string(*t, "kind", p).value_or("");
  certify_window = get_positive(*t, "certify_window", p, 10.0);
  certify_samples = get_int(*t, "certify_samples", p, 2001, 2);
  if (kind == "zero") return Nonlinearity::zero();
  if (kind == "identity") return Nonlinearity::identity();
  if (kind == "relu" || kind == "max") return Nonlinearity::relu();
  if (kind == "shifted_relu") return Nonlinearity::shifted_relu(get_double(*t, "t0", p, 0.0));
  if (kind == "double_kink") {
    const double t0 = get_double(*t, "t0", p, 0.0), t1 = get_double(*t, "t1", p, 1.0);
    if (!(t0 < t1)) throw ParseError("field \"nonlinearity.t1\": must exceed t0");
    return Nonlinearity::double_kink(t0, t1, get_double(*t, "s0", p, 0.5), get_double(*t, "s1", p, 1.0),
                                     get_double(*t, "s2", p, 2.0));
  }
  if (kind == "knots") {
    auto knots = opt_doubles(*t, "knots", p);
    auto values = opt_doubles(*t, "values", p);
    if (!knots || !values) throw ParseError("field \"nonlinearity.knots\": knots and values are required");
    if (knots->size() != values->size())
      throw ParseError("field \"nonlinearity.values\": must have as many entries as knots");
    for (std::size_t i = 0; i + 1 < knots->size(); ++i)
      if (!((*knots)[i] < (*knots)[i + 1])) throw ParseError("field \"nonlinearity.knots\": must be strictly increasing");
    return Nonlinearity::knot_table(*knots, *values, get_double(*t, "left_slope", p, 0.0),
                                    get_double(*t, "right_slope", p, 0.0));
  }
  if (kind == "network") {
    const auto file = opt_string(*t, "file", p);
    if (!file) throw ParseError("field \"nonlinearity.file\": required for kind network");
    Nonlinearity nl = Nonlinearity::network(load_network(resolve(base, *file, "nonlinearity.file")));
    if (nl.as_network()->spatial_dim() != grid.dim())
      throw DimensionError("nonlinearity.file: network input_dim must be grid dim + 1", grid.dim() + 1,
                           nl.as_network()->input_dim());
    return nl;
  }
  throw ParseError("field \"nonlinearity.kind\": unknown kind \"" + kind + "\"");
}

}  // namespace

GridFunction realize(const FieldSpec& f, const Grid& grid) {
  const int d = grid.dim();
  if (f.preset == "zero") return GridFunction::Zero(grid.size());
  if (f.preset == "constant") return GridFunction::Constant(grid.size(), f.value);
  if (f.preset == "csv") return grid_function_from_csv(grid, read_text_file(f.file.string()));
  if (f.preset == "eigenmode") {
    return sample(grid, [&](const Vector& x) {
      double v = f.amplitude;
      for (int a = 0; a < d; ++a)
        v *= std::sin(f.mode[a] * std::numbers::pi * (x(a) - grid.lower(a)) / (grid.upper(a) - grid.lower(a)));
      return v;
    });
  }
  if (f.preset == "bump") {
    Vector c(d);
    for (int a = 0; a < d; ++a)
      c(a) = f.center.empty() ? 0.5 * (grid.lower(a) + grid.upper(a)) : f.center.at(f.center.size() == 1 ? 0 : a);
    return sample(grid, [&](const Vector& x) {
      return f.amplitude * std::exp(-(x - c).squaredNorm() / (2.0 * f.width * f.width));
    });
  }
  if (f.preset == "tilted-plane") {
    return sample(grid, [&](const Vector& x) {
      double v = f.offset;
      for (int a = 0; a < d; ++a) v += (f.slope.empty() ? 1.0 : f.slope.at(f.slope.size() == 1 ? 0 : a)) * x(a);
      return f.amplitude * v;
    });
  }
  throw ParameterError("unknown field preset \"" + f.preset + "\"");
}

Nonlinearity builtin_by_name(const std::string& name) {
  if (name == "zero") return Nonlinearity::zero();
  if (name == "identity") return Nonlinearity::identity();
  if (name == "relu" || name == "max") return Nonlinearity::relu();
  if (name == "shifted_relu") return Nonlinearity::shifted_relu(0.5);
  if (name == "double_kink") return Nonlinearity::double_kink(0.0, 1.0, 0.5, 1.0, 2.0);
  throw ParameterError("unknown builtin nonlinearity \"" + name + "\"");
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ParseError("config file not found: " + path.string());
  return parse_config_text(read_text_file(path.string()), path.parent_path(), path.string());
}

ParsedConfig parse_config_text(const std::string& text, const std::filesystem::path& base,
                               const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
  }
  allow_keys(root, "",
             {"seed", "out", "grid", "nonlinearity", "problem", "solver", "solve", "optimize", "check", "approx_study",
              "mollifier_study"});

  ExperimentConfig cfg;
  cfg.source = source;
  cfg.config_hash = hex64(fnv1a64(text));
  if (auto s = opt_int(root, "seed", "")) {
    if (*s < 0) throw ParseError("field \"seed\": must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto o = opt_string(root, "out", "")) cfg.out_dir = *o;

  const Grid grid = parse_grid(root);
  double certify_window = 10.0;
  int certify_samples = 2001;
  Nonlinearity nl = parse_nonlinearity(root, grid, base, certify_window, certify_samples);

  // solver
  SolverOptions solver;
  if (const toml::table* t = sub_table(root, "solver", "")) {
    allow_keys(*t, "solver",
               {"newton_tol", "newton_max", "cg_tol", "cg_max", "truncation_level", "acknowledge_nonmonotone"});
    solver.newton_tol = get_positive(*t, "newton_tol", "solver", solver.newton_tol);
    solver.newton_max = get_int(*t, "newton_max", "solver", solver.newton_max, 1);
    solver.cg_tol = get_positive(*t, "cg_tol", "solver", solver.cg_tol);
    solver.cg_max = get_int(*t, "cg_max", "solver", solver.cg_max, 1);
    if (t->get("truncation_level")) solver.truncation_level = get_positive(*t, "truncation_level", "solver", 1.0);
    solver.acknowledge_nonmonotone = get_bool(*t, "acknowledge_nonmonotone", "solver", false);
  }

  if (nl.is_network()) {
    // Certify on a node subsample: the network may depend on x.
    const Eigen::Index stride = std::max<Eigen::Index>(1, grid.size() / 256);
    std::vector<Eigen::Index> picks;
    for (Eigen::Index k = 0; k < grid.size(); k += stride) picks.push_back(k);
    Matrix xs(grid.dim(), static_cast<Eigen::Index>(picks.size()));
    for (std::size_t j = 0; j < picks.size(); ++j) xs.col(static_cast<Eigen::Index>(j)) = grid.point(picks[j]);
    certify(nl, xs, certify_window, certify_samples);
  }

  // problem
  const toml::table* pt = sub_table(root, "problem", "");
  if (!pt) throw ParseError("missing table \"problem\"");
  allow_keys(*pt, "problem", {"alpha", "target", "bounds"});
  const auto alpha = opt_double(*pt, "alpha", "problem");
  if (!alpha) throw ParseError("field \"problem.alpha\": required");
  if (!(*alpha > 0.0)) throw ParseError("field \"problem.alpha\": must be positive");
  GridFunction target = GridFunction::Zero(grid.size());
  if (const toml::node* g = pt->get("target")) target = realize(parse_field(*g, "problem.target", base), grid);
  std::optional<Bounds> bounds;
  if (const toml::table* bt = sub_table(*pt, "bounds", "problem")) {
    allow_keys(*bt, "problem.bounds", {"lower", "upper"});
    const toml::node* lo = bt->get("lower");
    const toml::node* hi = bt->get("upper");
    if (!lo || !hi) throw ParseError("field \"problem.bounds\": lower and upper are both required");
    Bounds b{realize(parse_field(*lo, "problem.bounds.lower", base), grid),
             realize(parse_field(*hi, "problem.bounds.upper", base), grid)};
    for (Eigen::Index k = 0; k < grid.size(); ++k)
      if (!(b.lower(k) < b.upper(k)))
        throw ParseError("field \"problem.bounds\": lower < upper violated at node " + std::to_string(k));
    bounds = std::move(b);
  }

  // solve
  if (const toml::table* t = sub_table(root, "solve", "")) {
    allow_keys(*t, "solve", {"control"});
    if (const toml::node* c = t->get("control")) cfg.solve.control = parse_field(*c, "solve.control", base);
  }

  // optimize
  {
    auto& o = cfg.optimize;
    double eps_max = 1e-1, eps_min = 1e-4;
    int levels = 6;
    std::optional<std::vector<double>> schedule;
    std::string kind = "mollified";
    int panels = 64, nodes = 8;
    if (const toml::table* t = sub_table(root, "optimize", "")) {
      const std::string p = "optimize";
      allow_keys(*t, p,
                 {"smoothing", "eps_schedule", "eps_max", "eps_min", "levels", "panels", "nodes_per_panel",
                  "stop_tol", "max_iter", "sufficient_decrease", "backtrack", "initial_step", "barzilai_borwein",
                  "initial_control"});
      kind = opt_string(*t, "smoothing", p).value_or(kind);
      if (kind != "mollified" && kind != "canonical")
        throw ParseError("field \"optimize.smoothing\": expected \"mollified\" or \"canonical\"");
      schedule = opt_doubles(*t, "eps_schedule", p);
      eps_max = get_positive(*t, "eps_max", p, eps_max);
      eps_min = get_positive(*t, "eps_min", p, eps_min);
      levels = get_int(*t, "levels", p, levels, 1);
      panels = get_int(*t, "panels", p, panels, 1);
      nodes = get_int(*t, "nodes_per_panel", p, nodes, 1);
      o.options.stop_tol = get_positive(*t, "stop_tol", p, o.options.stop_tol);
      o.options.max_iter = get_int(*t, "max_iter", p, o.options.max_iter, 1);
      o.options.step.sufficient_decrease = get_positive(*t, "sufficient_decrease", p, 1e-4);
      o.options.step.backtrack = get_positive(*t, "backtrack", p, 0.5);
      if (o.options.step.backtrack >= 1.0) throw ParseError("field \"optimize.backtrack\": must be below 1");
      o.options.step.initial_step = get_positive(*t, "initial_step", p, 1.0);
      o.options.step.barzilai_borwein = get_bool(*t, "barzilai_borwein", p, true);
      if (const toml::node* c = t->get("initial_control"))
        o.initial_control = parse_field(*c, "optimize.initial_control", base);
    }
    if (schedule) {
      require_strictly_monotone(*schedule, true, "optimize.eps_schedule");
      o.eps_schedule = *schedule;
    } else {
      if (levels > 1 && !(eps_min < eps_max)) throw ParseError("field \"optimize.eps_min\": must be below eps_max");
      o.eps_schedule = geometric_schedule(eps_max, eps_min, levels);
    }
    o.smoothing = kind == "canonical" ? Smoothing::canonical(o.eps_schedule.front())
                                      : Smoothing::mollified(o.eps_schedule.front(), panels, nodes);
  }

  // check
  if (const toml::table* t = sub_table(root, "check", "")) {
    const std::string p = "check";
    auto& c = cfg.check;
    allow_keys(*t, p,
               {"conditions", "directions", "tol_B", "tol_weak", "tol_C", "tol_strong", "tol_act", "kink_tol",
                "control"});
    c.conditions = get_strings(*t, "conditions", p, c.conditions);
    for (const auto& name : c.conditions)
      if (name != "B" && name != "weak" && name != "C" && name != "strong")
        throw ParseError("field \"check.conditions\": unknown condition \"" + name + "\"");
    c.tol.directions = get_int(*t, "directions", p, c.tol.directions, 1);
    c.tol.tol_B = get_positive(*t, "tol_B", p, c.tol.tol_B);
    c.tol.tol_weak = get_positive(*t, "tol_weak", p, c.tol.tol_weak);
    c.tol.tol_C = get_positive(*t, "tol_C", p, c.tol.tol_C);
    c.tol.tol_strong = get_positive(*t, "tol_strong", p, c.tol.tol_strong);
    c.tol.tol_act = get_double(*t, "tol_act", p, c.tol.tol_act);
    if (c.tol.tol_act < 0.0) throw ParseError("field \"check.tol_act\": must be nonnegative");
    if (auto kt = opt_double(*t, "kink_tol", p)) {
      if (*kt < 0.0) throw ParseError("field \"check.kink_tol\": must be nonnegative");
      c.tol.kink_tol = *kt;
      c.auto_kink_tol = false;
    }
    if (const toml::node* u = t->get("control")) c.control = parse_field(*u, "check.control", base);
  }

  // approx_study
  if (const toml::table* t = sub_table(root, "approx_study", "")) {
    const std::string p = "approx_study";
    auto& a = cfg.approx;
    allow_keys(*t, p,
               {"target", "t0", "t1", "s0", "s1", "s2", "spacings", "window", "dense_points", "holder_exponent",
                "optimize", "control"});
    a.target = opt_string(*t, "target", p).value_or(a.target);
    if (a.target != "cubic" && a.target != "relu" && a.target != "shifted_relu" && a.target != "double_kink")
      throw ParseError("field \"approx_study.target\": unknown target \"" + a.target + "\"");
    a.t0 = get_double(*t, "t0", p, a.t0);
    a.t1 = get_double(*t, "t1", p, a.t1);
    a.s0 = get_double(*t, "s0", p, a.s0);
    a.s1 = get_double(*t, "s1", p, a.s1);
    a.s2 = get_double(*t, "s2", p, a.s2);
    if (a.target == "double_kink" && !(a.t0 < a.t1)) throw ParseError("field \"approx_study.t1\": must exceed t0");
    if (auto s = opt_doubles(*t, "spacings", p)) a.spacings = *s;
    require_strictly_monotone(a.spacings, true, "approx_study.spacings");
    a.window = get_positive(*t, "window", p, a.window);
    a.dense_points = get_int(*t, "dense_points", p, a.dense_points, 2);
    a.holder_exponent = get_positive(*t, "holder_exponent", p, a.holder_exponent);
    if (a.holder_exponent > 1.0) throw ParseError("field \"approx_study.holder_exponent\": must be <= 1");
    a.optimize = get_bool(*t, "optimize", p, a.optimize);
    if (const toml::node* c = t->get("control")) a.control = parse_field(*c, "approx_study.control", base);
  }

  // mollifier_study
  if (const toml::table* t = sub_table(root, "mollifier_study", "")) {
    const std::string p = "mollifier_study";
    auto& m = cfg.mollifier;
    allow_keys(*t, p, {"sequences", "terms", "eps_power", "radius"});
    m.sequences = get_int(*t, "sequences", p, m.sequences, 1);
    m.terms = get_int(*t, "terms", p, m.terms, 2);
    m.eps_power = get_positive(*t, "eps_power", p, m.eps_power);
    if (t->get("radius")) m.radius = get_positive(*t, "radius", p, 1.0);
  }
  cfg.check.tol.seed = cfg.seed;

  try {
    ControlProblem problem(grid, std::move(nl), std::move(target), *alpha, std::move(bounds), solver);
    return {std::move(problem), std::move(cfg)};
  } catch (const DimensionError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid problem: ") + e.what());
  }
}

}  // namespace lipc
