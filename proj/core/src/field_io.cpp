#include "ovi/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ovi/errors.hpp"

namespace ovi {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& out, const Field& u) {
  const auto& grid = *u.grid();
  out << (grid.dim() == 2 ? "x,y,value\n" : "x,value\n");
  for (int k = 0; k < grid.node_count(); ++k) {
    const Point p = grid.position(k);
    out << format_g17(p.x) << ',';
    if (grid.dim() == 2) out << format_g17(p.y) << ',';
    out << format_g17(u[k]) << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const Field& u) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_field_csv(out, u);
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

double parse_number(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
  if (end == begin || (end && *end != '\0')) throw Error(where + ": not a number: '" + token + "'");
  return v;
}

}  // namespace

Field read_field_csv(std::istream& in, const GridPtr& grid, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(source + ": empty field file");
  const std::size_t columns = grid->dim() == 2 ? 3 : 2;
  std::vector<double> values;
  values.reserve(grid->node_count());
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> tokens;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(tok);
    const std::string where = source + ":" + std::to_string(row);
    if (tokens.size() != columns) throw Error(where + ": expected " + std::to_string(columns) + " columns");
    const int node = static_cast<int>(values.size());
    if (node >= grid->node_count()) throw Error(source + ": more rows than grid nodes");
    const Point p = grid->position(node);
    const double x = parse_number(tokens[0], where);
    const double scale = std::max(1.0, std::abs(p.x));
    if (std::abs(x - p.x) > 1e-9 * scale) throw Error(where + ": x coordinate does not match grid node");
    if (columns == 3) {
      const double y = parse_number(tokens[1], where);
      if (std::abs(y - p.y) > 1e-9 * std::max(1.0, std::abs(p.y)))
        throw Error(where + ": y coordinate does not match grid node");
    }
    values.push_back(parse_number(tokens.back(), where));
  }
  if (static_cast<int>(values.size()) != grid->node_count())
    throw Error(source + ": " + std::to_string(values.size()) + " rows, grid has " +
                std::to_string(grid->node_count()) + " nodes");
  return Field(grid, std::move(values));
}

Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field file " + path.string());
  return read_field_csv(in, grid, path.string());
}

}  // namespace ovi
