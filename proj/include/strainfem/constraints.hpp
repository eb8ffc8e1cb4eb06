#pragma once

#include <strainfem/mesh.hpp>
#include <strainfem/strain_space.hpp>

#include <Eigen/Sparse>

#include <vector>

namespace strainfem {

/// Compatibility forms of one vertex patch: an orthonormal basis of the left
/// null space of the patch map from nodal displacements to patch edge dofs.
/// Their joint kernel over all patches is the discrete compatible space.
struct PatchConstraintSet {
    int center = -1;
    int m = 0;                    // expected and computed constraint count
    Eigen::MatrixXd rows;         // m x A_patch, orthonormal
    std::vector<int> patch_edges; // global edge id per local column
};

/// Map from stacked patch nodal displacements (3 per patch vertex, in patch
/// vertex order) to patch edge dofs; the restriction of strain_of_p1.
Eigen::MatrixXd patch_p1_dof_map(const TetMesh& mesh, const VertexPatch& patch);

/// Left-null-space construction by SVD with a hard cross-check of the null
/// dimension against the Euler-count prediction (N_ib or N_b - 3).
PatchConstraintSet patch_constraints(const TetMesh& mesh, const VertexPatch& patch);

struct ConstraintMatrix {
    Eigen::SparseMatrix<double> C;                // rows x num_edges
    std::vector<std::pair<int, int>> vertex_rows; // per vertex: [begin, end)
};

/// Stacks the patch constraint rows of every vertex in vertex order.
/// Rows may be redundant across overlapping patches.
ConstraintMatrix assemble_constraints(const TetMesh& mesh);

/// ||C d||_2 / max(1, ||d||_2).
double membership_residual(const ConstraintMatrix& cm, const EdgeDofVector& d);

struct RankCheck {
    int kernel_dim;
    int expected;  // 3 * #vertices - 6
    bool pass;
};

/// Dense rank-revealing check that dim ker C = 3 * #vertices - 6
/// (simply-connected meshes; the caller asserts topology).
RankCheck global_rank_check(const TetMesh& mesh, const ConstraintMatrix& cm);

}  // namespace strainfem
