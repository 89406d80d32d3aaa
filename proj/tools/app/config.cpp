#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "ovi/errors.hpp"
#include "ovi/field_io.hpp"

namespace ovi::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(context + ": '" + text + "' is not a number");
  }
  if (used != text.size()) fail(context + ": '" + text + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
    out.push_back(s.substr(start, pos - start));
  out.push_back(s.substr(start));
  return out;
}

// Catalog profiles vanish on the boundary of the box.
double bubble(const StructuredGrid& g, Point p, bool sine) {
  const Box& b = g.extents();
  const double sx = (p.x - b.x0) / (b.x1 - b.x0);
  double v = sine ? std::sin(std::numbers::pi * sx) : 4.0 * sx * (1.0 - sx);
  if (g.dim() == 2) {
    const double sy = (p.y - b.y0) / (b.y1 - b.y0);
    v *= sine ? std::sin(std::numbers::pi * sy) : 4.0 * sy * (1.0 - sy);
  }
  return v;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

Coefficient parse_coefficient(const json& spec, const GridPtr& grid, const fs::path& base) {
  if (spec.is_number()) return Coefficient(spec.get<double>());
  return Coefficient(std::make_shared<const Field>(parse_field(spec, grid, base)));
}

std::vector<std::vector<double>> parse_constants(const json& spec, std::size_t N, bool& relative,
                                                 const char* name) {
  relative = false;
  double fill = 0.0;
  if (spec.is_number()) {
    fill = spec.get<double>();
  } else if (spec.is_object() && spec.contains("times_lambda0")) {
    fill = spec.at("times_lambda0").get<double>();
    relative = true;
  } else if (spec.is_array()) {
    auto m = spec.get<std::vector<std::vector<double>>>();
    if (m.size() != N) fail(std::string("qvi.") + name + " must be " + std::to_string(N) + " x " + std::to_string(N));
    for (const auto& row : m)
      if (row.size() != N) fail(std::string("qvi.") + name + " must be " + std::to_string(N) + " x " + std::to_string(N));
    return m;
  } else {
    fail(std::string("qvi.") + name + ": expected a number, an N x N array or {\"times_lambda0\": c}");
  }
  return std::vector<std::vector<double>>(N, std::vector<double>(N, fill));
}

std::vector<Field> parse_field_list(const json& spec, const GridPtr& grid, const fs::path& base, const char* ctx) {
  if (!spec.is_array() || spec.empty()) fail(std::string(ctx) + ".fs must be a non-empty array");
  std::vector<Field> out;
  for (const auto& item : spec) out.push_back(parse_field(item, grid, base));
  return out;
}

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::obstacle: return "obstacle";
    case ProblemKind::membranes: return "membranes";
    case ProblemKind::qvi: return "qvi";
    default: return "none";
  }
}

Field parse_field(const json& spec, const GridPtr& grid, const fs::path& base) {
  if (spec.is_number()) return Field(grid, spec.get<double>());
  if (!spec.is_string()) fail("field source must be a number or a string");
  const std::string s = spec.get<std::string>();
  if (s == "zero") return Field(grid, 0.0);
  if (s == "inf" || s == "+inf") return Field(grid, kInf);
  if (s == "-inf") return Field(grid, -kInf);

  const auto parts = split(s, ':');
  const std::string& head = parts.front();
  if (head == "const" && parts.size() == 2) return Field(grid, parse_number(parts[1], s));
  if ((head == "parabola" || head == "sine") && parts.size() <= 2) {
    const double amp = parts.size() == 2 ? parse_number(parts[1], s) : 1.0;
    const bool sine = head == "sine";
    return Field::sample(grid, [&](Point p) { return amp * bubble(*grid, p, sine); });
  }
  if (head == "linear" && parts.size() == 3) {
    const double a = parse_number(parts[1], s), b = parse_number(parts[2], s);
    const Box& box = grid->extents();
    return Field::sample(grid, [&](Point p) { return a + (b - a) * (p.x - box.x0) / (box.x1 - box.x0); });
  }

  const fs::path file = base / s;
  if (!fs::exists(file)) fail("field source '" + s + "' is neither a catalog entry nor an existing file");
  return read_field_csv(file, grid);
}

GridPtr parse_grid(const json& spec) {
  const int dim = get_or(spec, "dim", 1);
  const int n = spec.at("n").get<int>();
  const auto ext = get_or(spec, "extents", std::vector<double>{});
  if (dim == 1) {
    const double x0 = ext.empty() ? 0.0 : ext.at(0), x1 = ext.empty() ? 1.0 : ext.at(1);
    if (!ext.empty() && ext.size() != 2) fail("grid.extents must be [x0, x1] in 1D");
    return StructuredGrid::line(x0, x1, n);
  }
  if (dim == 2) {
    if (!ext.empty() && ext.size() != 4) fail("grid.extents must be [x0, x1, y0, y1] in 2D");
    const Box box = ext.empty() ? Box{0.0, 1.0, 0.0, 1.0} : Box{ext[0], ext[1], ext[2], ext[3]};
    return StructuredGrid::rect(box, n);
  }
  fail("grid.dim must be 1 or 2");
}

StructuralPtr parse_function(const json& spec, const GridPtr& grid, const fs::path& base) {
  const std::string id = spec.at("id").get<std::string>();
  std::shared_ptr<StructuralFunction> fn;
  if (id == "power") {
    fn = std::make_shared<PowerLaw>(parse_coefficient(spec.at("p"), grid, base));
  } else if (id == "log_power") {
    fn = std::make_shared<LogPowerLaw>(parse_coefficient(get_or(spec, "alpha", json(1.0)), grid, base),
                                       parse_coefficient(spec.at("p"), grid, base),
                                       parse_coefficient(get_or(spec, "beta", json(1.0)), grid, base),
                                       parse_coefficient(spec.at("gamma"), grid, base));
  } else if (id == "combination") {
    std::vector<Combination::Term> terms;
    for (const auto& t : spec.at("terms"))
      terms.push_back({t.at("weight").get<double>(), parse_function(t.at("function"), grid, base)});
    fn = std::make_shared<Combination>(std::move(terms));
  } else {
    fail("unknown structural function id '" + id + "' (expected power|log_power|combination)");
  }
  if (spec.contains("declared_bounds")) {
    const auto b = spec.at("declared_bounds").get<std::vector<double>>();
    if (b.size() != 2) fail("declared_bounds must be [lower, upper]");
    fn->declare_bounds({b[0], b[1]});
  }
  return fn;
}

DiscreteOperator RunConfig::make_operator() const { return DiscreteOperator(grid, YoungFunction(function), scheme); }

double RunConfig::ls_tolerance() const {
  if (verify_tol) return *verify_tol;
  return scheme == Scheme::edge ? 1e3 * solver.tol : 1e-2;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  RunConfig cfg;
  cfg.path = path;
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  try {
    std::ifstream in(path);
    if (!in) fail("cannot open config file");
    const json doc = json::parse(in);

    cfg.grid = parse_grid(doc.at("grid"));
    const json& op = doc.at("operator");
    cfg.function = parse_function(op.at("function"), cfg.grid, base);
    cfg.scheme = parse_scheme(get_or(op, "scheme", std::string("edge")));

    if (doc.contains("solver")) {
      const json& s = doc.at("solver");
      cfg.solver.tol = get_or(s, "tol", cfg.solver.tol);
      cfg.solver.max_iter = get_or(s, "max_iter", cfg.solver.max_iter);
      cfg.solver.method = parse_method(get_or(s, "method", std::string("newton")));
    }
    if (doc.contains("outputs")) {
      const json& o = doc.at("outputs");
      cfg.out_dir = base / get_or(o, "dir", std::string("out"));
      cfg.emit_energy_trace = get_or(o, "emit_energy_trace", false);
    } else {
      cfg.out_dir = base / "out";
    }
    cfg.verify = get_or(doc, "verify", std::vector<std::string>{});
    if (doc.contains("verify_tol")) {
      cfg.verify_tol = doc.at("verify_tol").get<double>();
      if (!(*cfg.verify_tol >= 0.0)) throw std::invalid_argument("verify_tol must be >= 0");
    }

    if (doc.contains("problem")) {
      const json& p = doc.at("problem");
      if (p.size() != 1) fail("problem must contain exactly one of obstacle|membranes|qvi");
      if (p.contains("obstacle")) {
        const json& o = p.at("obstacle");
        cfg.kind = ProblemKind::obstacle;
        cfg.obstacle.f = parse_field(o.at("f"), cfg.grid, base);
        cfg.obstacle.psi = parse_field(get_or(o, "psi", json("-inf")), cfg.grid, base);
        cfg.obstacle.phi = parse_field(get_or(o, "phi", json("inf")), cfg.grid, base);
      } else if (p.contains("membranes")) {
        const json& m = p.at("membranes");
        cfg.kind = ProblemKind::membranes;
        cfg.membranes.fs = parse_field_list(m.at("fs"), cfg.grid, base, "membranes");
        if (m.contains("epsilon")) cfg.epsilon = m.at("epsilon").get<double>();
      } else if (p.contains("qvi")) {
        const json& q = p.at("qvi");
        cfg.kind = ProblemKind::qvi;
        cfg.qvi_fs = parse_field_list(q.at("fs"), cfg.grid, base, "qvi");
        const std::size_t N = cfg.qvi_fs.size();
        cfg.qvi_constants.phi = parse_constants(q.at("phi"), N, cfg.qvi_constants.phi_relative, "phi");
        cfg.qvi_constants.psi = parse_constants(q.at("psi"), N, cfg.qvi_constants.psi_relative, "psi");
        cfg.qvi_options.tol = get_or(q, "tol", cfg.qvi_options.tol);
        cfg.qvi_options.max_outer = get_or(q, "max_outer", cfg.qvi_options.max_outer);
      } else {
        fail("problem must contain exactly one of obstacle|membranes|qvi");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }

  if (overrides.scheme) cfg.scheme = *overrides.scheme;
  if (overrides.tol) {
    if (cfg.kind == ProblemKind::qvi) cfg.qvi_options.tol = *overrides.tol;
    else cfg.solver.tol = *overrides.tol;
  }
  if (overrides.out) cfg.out_dir = *overrides.out;
  if (overrides.epsilon) cfg.epsilon = overrides.epsilon;
  cfg.qvi_options.method = cfg.solver.method;
  cfg.qvi_options.max_inner_iter = cfg.solver.max_iter;
  if (cfg.solver.tol <= 0.0 || cfg.qvi_options.tol <= 0.0) throw ConfigError(path.string() + ": tol must be positive");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ConfigError(path.string() + ": epsilon must be positive");
  return cfg;
}

}  // namespace ovi::app
