#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l1subdiv/refine1d.hpp"
#include "l1subdiv/refine2d.hpp"

namespace l1subdiv {

/// Parsed comma-separated table: one header row, then numeric rows. Numbers
/// are written with 17 significant digits, so read/write is lossless.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

/// Curve table: `param,value` for scalar data, `param,x,y[,z]` for points.
CsvTable curve_table(const ControlPolygon& polygon);
/// Inverse of curve_table. The parameter column must be uniformly spaced.
ControlPolygon polygon_from_table(const CsvTable& table);

/// Grid table: `u,v,<components>` rows in row-major order.
CsvTable grid_table(const GridMesh& mesh);
GridMesh mesh_from_table(const CsvTable& table);

/// Polygon mesh text: `v x y z` per grid node in row-major order followed by
/// `f a b c d` quads (1-based). Closed axes get the wrap-around faces. Scalar
/// grids use (u, v, value) as vertex coordinates.
void write_mesh(std::ostream& out, const GridMesh& mesh);
void write_mesh_file(const std::string& path, const GridMesh& mesh);

/// Shortest-exact text for a double (17 significant digits).
std::string format_double(double v);

}  // namespace l1subdiv
