#include <strainfem/constraints.hpp>

#include <strainfem/parallel.hpp>

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>

namespace strainfem {

Eigen::MatrixXd patch_p1_dof_map(const TetMesh& mesh, const VertexPatch& patch) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(patch.A, 3 * patch.N);
    for (int le = 0; le < patch.A; ++le) {
        const int e = patch.edges[le];
        const int p = mesh.edges[e][0], q = mesh.edges[e][1];
        const Vec3 t = mesh.edge_tangent(e);
        const int lp = patch.local_vertex(p), lq = patch.local_vertex(q);
        G.block<1, 3>(le, 3 * lq) = t.transpose();
        G.block<1, 3>(le, 3 * lp) = -t.transpose();
    }
    return G;
}

PatchConstraintSet patch_constraints(const TetMesh& mesh, const VertexPatch& patch) {
    const int expected = patch.boundary_center ? patch.N_ib : patch.N_b - 3;
    if (patch.A < 3 * patch.N - 6)
        throw std::runtime_error("patch_constraints: vertex " + std::to_string(patch.center) +
                                 " has fewer edges than 3N-6");

    const Eigen::MatrixXd G = patch_p1_dof_map(mesh, patch);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double tol = std::max(G.rows(), G.cols()) *
                       std::numeric_limits<double>::epsilon() * (sv.size() ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    const int null_dim = patch.A - rank;
    if (null_dim != expected)
        throw std::runtime_error(
            "patch_constraints: rank deficiency mismatch at vertex " +
            std::to_string(patch.center) + " (computed null dimension " +
            std::to_string(null_dim) + ", Euler count " + std::to_string(expected) + ")");

    PatchConstraintSet set;
    set.center = patch.center;
    set.m = expected;
    set.patch_edges = patch.edges;
    set.rows = svd.matrixU().rightCols(null_dim).transpose();
    return set;
}

ConstraintMatrix assemble_constraints(const TetMesh& mesh) {
    const int nv = mesh.num_vertices();
    std::vector<PatchConstraintSet> sets(nv);
    parallel_for(nv, [&](std::size_t v) {
        sets[v] = patch_constraints(mesh, vertex_patch(mesh, static_cast<int>(v)));
    });

    ConstraintMatrix cm;
    cm.vertex_rows.resize(nv);
    int total_rows = 0;
    for (int v = 0; v < nv; ++v) {
        cm.vertex_rows[v] = {total_rows, total_rows + sets[v].m};
        total_rows += sets[v].m;
    }

    std::vector<Eigen::Triplet<double>> trips;
    for (int v = 0; v < nv; ++v) {
        const auto& set = sets[v];
        for (int r = 0; r < set.m; ++r)
            for (int c = 0; c < static_cast<int>(set.patch_edges.size()); ++c)
                trips.emplace_back(cm.vertex_rows[v].first + r, set.patch_edges[c],
                                   set.rows(r, c));
    }
    cm.C.resize(total_rows, mesh.num_edges());
    cm.C.setFromTriplets(trips.begin(), trips.end());
    return cm;
}

double membership_residual(const ConstraintMatrix& cm, const EdgeDofVector& d) {
    if (d.size() != cm.C.cols())
        throw std::invalid_argument("membership_residual: dof vector size mismatch");
    if (cm.C.rows() == 0) return 0.0;
    return (cm.C * d).norm() / std::max(1.0, d.norm());
}

RankCheck global_rank_check(const TetMesh& mesh, const ConstraintMatrix& cm) {
    const int expected = 3 * mesh.num_vertices() - 6;
    int rank = 0;
    if (cm.C.rows() > 0) {
        const Eigen::MatrixXd dense(cm.C);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
        const auto& sv = svd.singularValues();
        const double tol = std::max(dense.rows(), dense.cols()) *
                           std::numeric_limits<double>::epsilon() * (sv.size() ? sv(0) : 0.0);
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol) ++rank;
    }
    const int kernel = mesh.num_edges() - rank;
    return {kernel, expected, kernel == expected};
}

}  // namespace strainfem
