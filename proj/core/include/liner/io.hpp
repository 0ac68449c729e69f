// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_IO_HPP
#define LINER_IO_HPP

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "liner/mesh.hpp"

namespace liner
{

// Round-trip formatting (%.17g) used by every text artifact.
std::string format_double(double value);

// VTK legacy ASCII unstructured grid. The solution writer adds real, imag and abs point
// fields.
void write_mesh_vtk(const CylinderMesh &mesh, std::ostream &out);
void write_solution_vtk(const CylinderMesh &mesh, const Eigen::VectorXcd &values,
                        std::ostream &out);

// Header "node,re,im".
void write_solution_csv(const Eigen::VectorXcd &values, std::ostream &out);

// Matrix Market "coordinate complex general", 1-based.
void write_matrix_market(const Eigen::SparseMatrix<std::complex<double>> &matrix,
                         std::ostream &out);

// Liner density as "facet,value" rows keyed by global facet id, one per lateral facet in
// the order of mesh.boundary_of(FacetTag::Lateral).
void write_chi_csv(const CylinderMesh &mesh, const std::vector<double> &chi, std::ostream &out);

// Inverse of write_chi_csv. Every lateral facet must appear exactly once.
std::vector<double> read_chi_csv(const CylinderMesh &mesh, std::istream &in);

}  // namespace liner

#endif  // LINER_IO_HPP
