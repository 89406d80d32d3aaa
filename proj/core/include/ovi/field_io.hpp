#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ovi/mesh.hpp"

namespace ovi {

// Field CSV: header `x,value` (1D) or `x,y,value` (2D), one row per node in
// row-major order, every number printed with 17 significant digits so that a
// write/read cycle reproduces the values bit for bit.
void write_field_csv(std::ostream& out, const Field& u);
void write_field_csv(const std::filesystem::path& path, const Field& u);

// Reads a field and checks that row count and node coordinates match `grid`.
Field read_field_csv(std::istream& in, const GridPtr& grid, const std::string& source = "<stream>");
Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid);

std::string format_g17(double v);

}  // namespace ovi
