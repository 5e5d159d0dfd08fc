// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_MESHGEN_HPP
#define SUBWAVE_MESHGEN_HPP

#include "subwave/geometry.hpp"
#include "subwave/mesh.hpp"

namespace subwave
{

// Periodic mesh of the unit cell conforming to the inclusion boundary.
Mesh MeshUnitCell(const InclusionShape &shape, double h);

struct SceneMeshOptions
{
  double h = 0.05;         // edge length inside and near Omega
  double h_far = 0.0;      // cap in the exterior; 0 selects 4 h
  double grading = 0.25;   // growth of the size with distance from Omega
};

// Mesh of the disk B_r conforming to the boundary of Omega, the truncation
// circle and every inclusion eps (D + m). Lattice cells are copies of the
// supplied cell mesh scaled by eps, so cell-level fields transfer nodewise.
Mesh MeshScene(const MacroDomain &omega, const Lattice &lattice, const Mesh &cell_mesh,
               const InclusionShape &shape, double r, const SceneMeshOptions &options);

// Convenience form that builds the cell mesh with h / eps.
Mesh MeshScene(const MacroDomain &omega, const Lattice &lattice, const InclusionShape &shape,
               double r, double h);

}  // namespace subwave

#endif  // SUBWAVE_MESHGEN_HPP
