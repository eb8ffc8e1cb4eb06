#include <strainfem/strain_space.hpp>

#include <strainfem/quadrature.hpp>

#include <stdexcept>

namespace strainfem {

double edge_dof(const Vec3& p0, const Vec3& p1, const SymTensor3& e) {
    const Vec3 d = p1 - p0;
    const double len = d.norm();
    if (len <= 0.0) throw std::invalid_argument("edge_dof: zero-length edge");
    const Vec3 tau = d / len;
    return len * e.quad(tau);
}

LocalDofMap local_dof_map(const std::array<Vec3, 4>& tet) {
    LocalDofMap map;
    for (int i = 0; i < 6; ++i) {
        const Vec3 d = tet[kLocalEdges[i][1]] - tet[kLocalEdges[i][0]];
        const double len = d.norm();
        if (len <= 0.0) throw std::invalid_argument("local_dof_map: zero-length edge");
        const Vec3 t = d / len;
        map.rows(i, 0) = len * t[0] * t[0];
        map.rows(i, 1) = len * t[1] * t[1];
        map.rows(i, 2) = len * t[2] * t[2];
        map.rows(i, 3) = 2.0 * len * t[0] * t[1];
        map.rows(i, 4) = 2.0 * len * t[0] * t[2];
        map.rows(i, 5) = 2.0 * len * t[1] * t[2];
    }
    Eigen::JacobiSVD<Matrix6d> svd(map.rows, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(5) <= 6.0 * std::numeric_limits<double>::epsilon() * sv(0))
        throw std::runtime_error("local_dof_map: singular local map (degenerate tet)");
    map.cond = sv(0) / sv(5);
    map.inverse = svd.solve(Matrix6d::Identity());
    return map;
}

SymTensor3 tensor_from_dofs(const std::array<Vec3, 4>& tet, const Vec6& dofs) {
    const LocalDofMap map = local_dof_map(tet);
    return SymTensor3::FromComponents(map.inverse * dofs);
}

EdgeDofVector interpolate(const TetMesh& mesh,
                          const std::function<SymTensor3(const Vec3&)>& e_fn,
                          int gauss_points) {
    const auto& gl = gauss_legendre_01(gauss_points);
    EdgeDofVector d(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Vec3 p0 = mesh.vertices[mesh.edges[e][0]];
        const Vec3 p1 = mesh.vertices[mesh.edges[e][1]];
        const double len = (p1 - p0).norm();
        const Vec3 tau = (p1 - p0) / len;
        double acc = 0.0;
        for (const auto& [t, w] : gl) acc += w * e_fn(p0 + t * (p1 - p0)).quad(tau);
        d[e] = len * acc;
    }
    return d;
}

Eigen::Matrix<double, 6, 12> p1_strain_operator(const std::array<Vec3, 4>& tet) {
    Eigen::Matrix3d X;
    X.col(0) = tet[1] - tet[0];
    X.col(1) = tet[2] - tet[0];
    X.col(2) = tet[3] - tet[0];
    const Eigen::Matrix3d Xinv = X.inverse();
    // Barycentric gradients: rows of Xinv are grad(lambda_1..3); lambda_0 = -sum.
    std::array<Vec3, 4> g;
    g[1] = Xinv.row(0);
    g[2] = Xinv.row(1);
    g[3] = Xinv.row(2);
    g[0] = -(g[1] + g[2] + g[3]);

    Eigen::Matrix<double, 6, 12> S = Eigen::Matrix<double, 6, 12>::Zero();
    for (int i = 0; i < 4; ++i) {
        const int c = 3 * i;
        // e_kk = d_k u_k ; e_kl = (d_k u_l + d_l u_k)/2
        S(0, c + 0) += g[i][0];
        S(1, c + 1) += g[i][1];
        S(2, c + 2) += g[i][2];
        S(3, c + 1) += 0.5 * g[i][0];
        S(3, c + 0) += 0.5 * g[i][1];
        S(4, c + 2) += 0.5 * g[i][0];
        S(4, c + 0) += 0.5 * g[i][2];
        S(5, c + 2) += 0.5 * g[i][1];
        S(5, c + 1) += 0.5 * g[i][2];
    }
    return S;
}

P1Strain strain_of_p1(const TetMesh& mesh, const Eigen::VectorXd& nodal) {
    if (nodal.size() != 3 * mesh.num_vertices())
        throw std::invalid_argument("strain_of_p1: nodal vector size mismatch");

    P1Strain out;
    // For a P1 field the dof on edge (p,q) collapses to the single-valued
    // expression (u_q - u_p) . (x_q - x_p) / |x_q - x_p|.
    out.edge_dofs.resize(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const int p = mesh.edges[e][0], q = mesh.edges[e][1];
        const Vec3 d = mesh.vertices[q] - mesh.vertices[p];
        const Vec3 du = nodal.segment<3>(3 * q) - nodal.segment<3>(3 * p);
        out.edge_dofs[e] = du.dot(d) / d.norm();
    }

    out.tet_strains.resize(mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto S = p1_strain_operator(mesh.tet_points(t));
        Eigen::Matrix<double, 12, 1> u;
        for (int i = 0; i < 4; ++i) u.segment<3>(3 * i) = nodal.segment<3>(3 * mesh.tets[t][i]);
        out.tet_strains[t] = SymTensor3::FromComponents(S * u);
    }
    return out;
}

Eigen::MatrixXd nodal_rigid_modes(const TetMesh& mesh) {
    const int nv = mesh.num_vertices();
    const Vec3 c = mesh.domain_centroid();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3 * nv, 6);
    for (int v = 0; v < nv; ++v) {
        const Vec3 x = mesh.vertices[v] - c;
        for (int k = 0; k < 3; ++k) R(3 * v + k, k) = 1.0;
        // rotations: e_k x (x - c)
        R(3 * v + 1, 3) = -x[2];
        R(3 * v + 2, 3) = x[1];
        R(3 * v + 0, 4) = x[2];
        R(3 * v + 2, 4) = -x[0];
        R(3 * v + 0, 5) = -x[1];
        R(3 * v + 1, 5) = x[0];
    }
    return R;
}

}  // namespace strainfem
