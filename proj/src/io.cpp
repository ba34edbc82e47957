#include "l1subdiv/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "l1subdiv/errors.hpp"

namespace l1subdiv {

std::string format_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) {
    throw InputError("line " + std::to_string(line_no) + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> component_names(std::size_t dim) {
  if (dim == 1) return {"value"};
  if (dim <= 3) {
    std::vector<std::string> xyz{"x", "y", "z"};
    xyz.resize(dim);
    return xyz;
  }
  std::vector<std::string> out;
  for (std::size_t c = 0; c < dim; ++c) out.push_back("c" + std::to_string(c));
  return out;
}

/// Uniform step of an increasing sequence; throws if it is not uniform.
double uniform_step(const std::vector<double>& p, const char* what) {
  if (p.size() < 2) return 1.0;
  const double step = (p.back() - p.front()) / static_cast<double>(p.size() - 1);
  if (!(step > 0.0)) throw InputError(std::string(what) + " must be strictly increasing");
  const double tol = 1e-9 * std::max(std::abs(p.front()), std::abs(p.back())) + 1e-9 * step;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p[i] - (p.front() + static_cast<double>(i) * step)) > tol) {
      throw InputError(std::string(what) + " is not uniformly spaced");
    }
  }
  return step;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.columns.empty()) {
      table.columns = split(line);
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != table.columns.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.columns.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw InputError("empty CSV input");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  write_csv(out, table);
}

CsvTable curve_table(const ControlPolygon& polygon) {
  CsvTable t;
  t.columns.push_back("param");
  for (auto& name : component_names(polygon.dim)) t.columns.push_back(name);
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    std::vector<double> row{polygon.param(i)};
    for (std::size_t c = 0; c < polygon.dim; ++c) row.push_back(polygon.at(i, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ControlPolygon polygon_from_table(const CsvTable& table) {
  if (table.columns.size() < 2) throw InputError("curve table needs a parameter and a value column");
  if (table.rows.size() < 2) throw InputError("curve table needs at least two rows");
  ControlPolygon p;
  p.dim = table.columns.size() - 1;
  std::vector<double> params;
  for (const auto& row : table.rows) {
    params.push_back(row[0]);
    p.values.insert(p.values.end(), row.begin() + 1, row.end());
  }
  p.origin = params.front();
  p.spacing = uniform_step(params, "parameter column");
  return p;
}

CsvTable grid_table(const GridMesh& mesh) {
  CsvTable t;
  t.columns = {"u", "v"};
  for (auto& name : component_names(mesh.dim)) t.columns.push_back(name);
  for (std::size_t i = 0; i < mesh.rows; ++i) {
    for (std::size_t j = 0; j < mesh.cols; ++j) {
      std::vector<double> row{mesh.param(0, i), mesh.param(1, j)};
      for (std::size_t c = 0; c < mesh.dim; ++c) row.push_back(mesh.at(i, j, c));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

GridMesh mesh_from_table(const CsvTable& table) {
  if (table.columns.size() < 3) throw InputError("grid table needs u, v and at least one value column");
  if (table.rows.empty()) throw InputError("grid table has no rows");
  GridMesh m;
  m.dim = table.columns.size() - 2;
  std::size_t cols = 0;
  while (cols < table.rows.size() && table.rows[cols][0] == table.rows[0][0]) ++cols;
  if (cols == 0 || table.rows.size() % cols != 0) throw InputError("grid table is not rectangular");
  m.cols = cols;
  m.rows = table.rows.size() / cols;
  std::vector<double> us, vs;
  for (std::size_t i = 0; i < m.rows; ++i) us.push_back(table.rows[i * cols][0]);
  for (std::size_t j = 0; j < cols; ++j) vs.push_back(table.rows[j][1]);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& row = table.rows[i * cols + j];
      if (row[0] != us[i] || row[1] != vs[j]) throw InputError("grid table rows are not in row-major order");
      m.values.insert(m.values.end(), row.begin() + 2, row.end());
    }
  }
  m.origin = {us.front(), vs.front()};
  m.spacing = {uniform_step(us, "u column"), uniform_step(vs, "v column")};
  return m;
}

void write_mesh(std::ostream& out, const GridMesh& mesh) {
  for (std::size_t i = 0; i < mesh.rows; ++i) {
    for (std::size_t j = 0; j < mesh.cols; ++j) {
      double xyz[3] = {0.0, 0.0, 0.0};
      if (mesh.dim == 1) {
        xyz[0] = mesh.param(0, i);
        xyz[1] = mesh.param(1, j);
        xyz[2] = mesh.at(i, j);
      } else {
        for (std::size_t c = 0; c < std::min<std::size_t>(3, mesh.dim); ++c) xyz[c] = mesh.at(i, j, c);
      }
      out << "v " << format_double(xyz[0]) << ' ' << format_double(xyz[1]) << ' ' << format_double(xyz[2])
          << '\n';
    }
  }
  const bool wrap_i = mesh.topology[0] == Topology::closed;
  const bool wrap_j = mesh.topology[1] == Topology::closed;
  const std::size_t fi = wrap_i ? mesh.rows : (mesh.rows > 0 ? mesh.rows - 1 : 0);
  const std::size_t fj = wrap_j ? mesh.cols : (mesh.cols > 0 ? mesh.cols - 1 : 0);
  auto id = [&](std::size_t i, std::size_t j) { return (i % mesh.rows) * mesh.cols + (j % mesh.cols) + 1; };
  for (std::size_t i = 0; i < fi; ++i) {
    for (std::size_t j = 0; j < fj; ++j) {
      out << "f " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
    }
  }
}

void write_mesh_file(const std::string& path, const GridMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  write_mesh(out, mesh);
}

}  // namespace l1subdiv
