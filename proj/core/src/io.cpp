// SPDX-License-Identifier: Apache-2.0

#include "liner/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "liner/error.hpp"

namespace liner
{

std::string format_double(double value)
{
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace
{

void write_grid(const CylinderMesh &mesh, std::ostream &out, const std::string &title)
{
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Vec3 &p : mesh.nodes())
  {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
        << '\n';
  }
  out << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
  for (const auto &t : mesh.tets())
  {
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_tets() << '\n';
  for (std::size_t i = 0; i < mesh.num_tets(); ++i)
  {
    out << "10\n";
  }
}

}  // namespace

void write_mesh_vtk(const CylinderMesh &mesh, std::ostream &out)
{
  write_grid(mesh, out, "linersolve mesh");
}

void write_solution_vtk(const CylinderMesh &mesh, const Eigen::VectorXcd &values,
                        std::ostream &out)
{
  require(static_cast<std::size_t>(values.size()) == mesh.num_nodes(),
          "solution size does not match the mesh node count");
  write_grid(mesh, out, "linersolve solution");
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  const auto field = [&](const char *name, auto &&f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < values.size(); ++i)
    {
      out << format_double(f(values[i])) << '\n';
    }
  };
  field("real", [](std::complex<double> v) { return v.real(); });
  field("imag", [](std::complex<double> v) { return v.imag(); });
  field("abs", [](std::complex<double> v) { return std::abs(v); });
}

void write_solution_csv(const Eigen::VectorXcd &values, std::ostream &out)
{
  out << "node,re,im\n";
  for (Eigen::Index i = 0; i < values.size(); ++i)
  {
    out << i << ',' << format_double(values[i].real()) << ','
        << format_double(values[i].imag()) << '\n';
  }
}

void write_matrix_market(const Eigen::SparseMatrix<std::complex<double>> &matrix,
                         std::ostream &out)
{
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  for (int col = 0; col < matrix.outerSize(); ++col)
  {
    for (Eigen::SparseMatrix<std::complex<double>>::InnerIterator it(matrix, col); it; ++it)
    {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value().real())
          << ' ' << format_double(it.value().imag()) << '\n';
    }
  }
}

void write_chi_csv(const CylinderMesh &mesh, const std::vector<double> &chi, std::ostream &out)
{
  const auto &lateral = mesh.boundary_of(FacetTag::Lateral);
  require(chi.size() == lateral.size(), "chi size does not match the lateral facet count");
  out << "facet,value\n";
  for (std::size_t i = 0; i < chi.size(); ++i)
  {
    out << lateral[i] << ',' << format_double(chi[i]) << '\n';
  }
}

std::vector<double> read_chi_csv(const CylinderMesh &mesh, std::istream &in)
{
  const auto &lateral = mesh.boundary_of(FacetTag::Lateral);
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < lateral.size(); ++i)
  {
    slot.emplace(lateral[i], i);
  }

  std::vector<double> chi(lateral.size(), 0.0);
  std::vector<bool> seen(lateral.size(), false);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (line.empty() || (line_no == 1 && line.rfind("facet", 0) == 0))
    {
      continue;
    }
    std::istringstream row(line);
    int facet = -1;
    char comma = 0;
    double value = 0.0;
    if (!(row >> facet >> comma >> value) || comma != ',')
    {
      throw ValidationError("chi csv line " + std::to_string(line_no) + ": expected facet,value");
    }
    auto it = slot.find(facet);
    require(it != slot.end(), "chi csv line " + std::to_string(line_no) + ": facet " +
                                  std::to_string(facet) + " is not a lateral facet");
    require(!seen[it->second], "chi csv: facet " + std::to_string(facet) + " listed twice");
    seen[it->second] = true;
    chi[it->second] = value;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
  {
    require(seen[i], "chi csv: lateral facet " + std::to_string(lateral[i]) + " missing");
  }
  return chi;
}

}  // namespace liner
