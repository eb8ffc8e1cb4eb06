#pragma once

#include <strainfem/mesh.hpp>
#include <strainfem/sym_tensor.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace strainfem {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// One real per global mesh edge: the line integrals d_sigma of the
/// tangential-tangential strain component. The global unknown vector.
using EdgeDofVector = Eigen::VectorXd;

/// Edge degree of freedom of a constant symmetric tensor: the line integral
/// of tau . (e tau) over the segment p0 -> p1, i.e. |p1-p0| * tau.(e tau).
double edge_dof(const Vec3& p0, const Vec3& p1, const SymTensor3& e);

/// Per-tet map between the six tensor components (11,22,33,12,13,23) and the
/// six edge dofs in local edge order. Row i is |s_i| * (tau x tau) flattened
/// with doubled off-diagonal weights.
struct LocalDofMap {
    Matrix6d rows;     // dofs = rows * components
    Matrix6d inverse;  // components = inverse * dofs
    double cond;       // spectral condition number of rows
};

LocalDofMap local_dof_map(const std::array<Vec3, 4>& tet);

/// Unique constant symmetric tensor with the prescribed edge dofs.
SymTensor3 tensor_from_dofs(const std::array<Vec3, 4>& tet, const Vec6& dofs);

/// Edge-dof interpolant of an analytic tensor field: per-edge Gauss
/// quadrature of tau . (e(x) tau), exact for fields affine along each edge.
EdgeDofVector interpolate(const TetMesh& mesh,
                          const std::function<SymTensor3(const Vec3&)>& e_fn,
                          int gauss_points = 2);

/// 6x12 matrix taking stacked vertex displacements (ux0,uy0,uz0, ux1, ...)
/// of the P1 interpolant on a tet to the components of its constant strain.
Eigen::Matrix<double, 6, 12> p1_strain_operator(const std::array<Vec3, 4>& tet);

struct P1Strain {
    EdgeDofVector edge_dofs;             // single-valued by construction
    std::vector<SymTensor3> tet_strains;
};

/// Strain of the continuous P1 displacement field with the given nodal
/// values (3 per vertex, stacked).
P1Strain strain_of_p1(const TetMesh& mesh, const Eigen::VectorXd& nodal);

/// Nodal coefficient vectors of the six canonical rigid modes: three
/// translations and three infinitesimal rotations about the domain centroid.
Eigen::MatrixXd nodal_rigid_modes(const TetMesh& mesh);

}  // namespace strainfem
