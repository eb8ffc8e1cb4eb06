#include <strainfem/elasticity.hpp>

#include <strainfem/parallel.hpp>
#include <strainfem/quadrature.hpp>

#include <Eigen/Dense>

#include <sstream>
#include <stdexcept>

namespace strainfem {

namespace {

Vec3 rigid_mode_value(int k, const Vec3& x, const Vec3& centroid) {
    if (k < 3) return Vec3::Unit(k);
    return Vec3::Unit(k - 3).cross(x - centroid);
}

}  // namespace

void validate(const Material& mat) {
    if (!(mat.lambda > 0.0) || !(mat.mu > 0.0))
        throw std::invalid_argument("Material: Lame parameters must be positive");
}

SymTensor3 apply_material(const Material& mat, const SymTensor3& e) {
    const double lt = mat.lambda * e.trace();
    return {lt + 2.0 * mat.mu * e.e11, lt + 2.0 * mat.mu * e.e22, lt + 2.0 * mat.mu * e.e33,
            2.0 * mat.mu * e.e12, 2.0 * mat.mu * e.e13, 2.0 * mat.mu * e.e23};
}

Matrix6d material_metric(double lambda, double mu) {
    Vec6 t, w;
    t << 1, 1, 1, 0, 0, 0;
    w << 1, 1, 1, 2, 2, 2;
    Matrix6d m = lambda * t * t.transpose();
    m.diagonal() += 2.0 * mu * w;
    return m;
}

Matrix6d frobenius_metric() {
    Vec6 w;
    w << 1, 1, 1, 2, 2, 2;
    return w.asDiagonal();
}

LoadData zero_loads() {
    LoadData l;
    l.f = [](const Vec3&) { return Vec3::Zero().eval(); };
    l.g = [](const Vec3&, const Vec3&) { return Vec3::Zero().eval(); };
    return l;
}

Eigen::VectorXd assemble_nodal_loads(const TetMesh& mesh, const LoadData& loads) {
    const int nv = mesh.num_vertices();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(3 * nv);

    if (loads.f) {
        for (int t = 0; t < mesh.num_tets(); ++t) {
            const auto p = mesh.tet_points(t);
            Eigen::Matrix3d X;
            X.col(0) = p[1] - p[0];
            X.col(1) = p[2] - p[0];
            X.col(2) = p[3] - p[0];
            const Eigen::Matrix3d Xinv = X.inverse();
            for (const auto& qp : tet_quadrature(p, loads.volume_order)) {
                const Vec3 xi = Xinv * (qp.x - p[0]);
                const double bary[4] = {1.0 - xi.sum(), xi[0], xi[1], xi[2]};
                const Vec3 fv = loads.f(qp.x);
                for (int i = 0; i < 4; ++i)
                    F.segment<3>(3 * mesh.tets[t][i]) += qp.w * bary[i] * fv;
            }
        }
    }

    if (loads.g) {
        for (const auto& bf : mesh.boundary_faces) {
            const std::array<Vec3, 3> p = {mesh.vertices[bf.v[0]], mesh.vertices[bf.v[1]],
                                           mesh.vertices[bf.v[2]]};
            const Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
            // 2D barycentric coordinates via the edge-span normal equations.
            Eigen::Matrix<double, 3, 2> E;
            E.col(0) = p[1] - p[0];
            E.col(1) = p[2] - p[0];
            const Eigen::Matrix2d EtE_inv = (E.transpose() * E).inverse();
            for (const auto& qp : tri_quadrature(p, loads.surface_order)) {
                const Eigen::Vector2d xi = EtE_inv * (E.transpose() * (qp.x - p[0]));
                const double bary[3] = {1.0 - xi.sum(), xi[0], xi[1]};
                const Vec3 gv = loads.g(qp.x, n);
                for (int i = 0; i < 3; ++i)
                    F.segment<3>(3 * bf.v[i]) += qp.w * bary[i] * gv;
            }
        }
    }
    return F;
}

Vec6 compatibility_residuals(const TetMesh& mesh, const LoadData& loads) {
    const Eigen::VectorXd F = assemble_nodal_loads(mesh, loads);
    return nodal_rigid_modes(mesh).transpose() * F;
}

LoadData project_loads(const TetMesh& mesh, const LoadData& loads) {
    const Eigen::MatrixXd R = nodal_rigid_modes(mesh);
    const Vec3 centroid = mesh.domain_centroid();

    // Consistent-mass Gram of the rigid modes: the k-th column of M R is the
    // nodal load of body force r_k, so re-assembly after the subtraction is
    // exact for these affine fields.
    Eigen::Matrix<double, Eigen::Dynamic, 6> MR(3 * mesh.num_vertices(), 6);
    for (int k = 0; k < 6; ++k) {
        LoadData unit;
        unit.f = [k, centroid](const Vec3& x) { return rigid_mode_value(k, x, centroid); };
        unit.volume_order = loads.volume_order;
        MR.col(k) = assemble_nodal_loads(mesh, unit);
    }
    const Eigen::Matrix<double, 6, 6> gram = R.transpose() * MR;
    const Vec6 beta = gram.ldlt().solve(compatibility_residuals(mesh, loads));

    LoadData projected = loads;
    auto f_old = loads.f;
    projected.f = [f_old, beta, centroid](const Vec3& x) {
        Vec3 v = f_old ? f_old(x) : Vec3::Zero().eval();
        for (int k = 0; k < 6; ++k) v -= beta[k] * rigid_mode_value(k, x, centroid);
        return v;
    };
    return projected;
}

DiscreteLoads discretize_loads(const TetMesh& mesh, const LoadData& loads) {
    DiscreteLoads out;
    out.F = assemble_nodal_loads(mesh, loads);
    const Eigen::MatrixXd R = nodal_rigid_modes(mesh);
    out.raw_residuals = R.transpose() * out.F;
    out.rigid_residuals = out.raw_residuals;

    const double scale = std::max(1.0, out.F.lpNorm<Eigen::Infinity>());
    if (out.raw_residuals.lpNorm<Eigen::Infinity>() > kCompatRelTol * scale) {
        if (!loads.auto_project) {
            std::ostringstream msg;
            msg << "incompatible loads: rigid-mode residual "
                << out.raw_residuals.lpNorm<Eigen::Infinity>()
                << " exceeds tolerance " << kCompatRelTol * scale
                << "; project the loads or fix the data";
            throw std::runtime_error(msg.str());
        }
        const LoadData fixed = project_loads(mesh, loads);
        out.F = assemble_nodal_loads(mesh, fixed);
        out.rigid_residuals = R.transpose() * out.F;
        out.projected = true;
        if (out.rigid_residuals.lpNorm<Eigen::Infinity>() > kCompatRelTol * scale)
            throw std::runtime_error("incompatible loads: projection failed to restore "
                                     "compatibility");
    }
    return out;
}

namespace {

struct TetOperators {
    Eigen::Matrix<double, 6, 12> S;  // nodal displacements -> strain components
    Matrix6d lambda_inv;             // local dofs -> strain components
    double volume;
    double cond;
};

TetOperators tet_operators(const TetMesh& mesh, int t) {
    const auto p = mesh.tet_points(t);
    const LocalDofMap map = local_dof_map(p);
    return {p1_strain_operator(p), map.inverse, mesh.tet_volumes[t], map.cond};
}

}  // namespace

EnergyForm assemble_energy(const TetMesh& mesh, const Material& mat) {
    validate(mat);
    const int nt = mesh.num_tets();
    const Matrix6d metric = material_metric(mat.lambda, mat.mu);

    std::vector<Matrix6d> blocks(nt);
    std::vector<double> conds(nt);
    parallel_for(nt, [&](std::size_t t) {
        const auto ops = tet_operators(mesh, static_cast<int>(t));
        blocks[t] = ops.volume * ops.lambda_inv.transpose() * metric * ops.lambda_inv;
        conds[t] = ops.cond;
    });

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nt) * 36);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                trips.emplace_back(mesh.tet_edges[t][i].edge, mesh.tet_edges[t][j].edge,
                                   blocks[t](i, j));

    EnergyForm form;
    form.M.resize(mesh.num_edges(), mesh.num_edges());
    form.M.setFromTriplets(trips.begin(), trips.end());
    for (int t = 0; t < nt; ++t) form.max_local_cond = std::max(form.max_local_cond, conds[t]);
    return form;
}

double evaluate_j(const EnergyForm& M, const Eigen::VectorXd& l, const EdgeDofVector& d) {
    if (d.size() != M.M.rows() || l.size() != d.size())
        throw std::invalid_argument("evaluate_j: dimension mismatch");
    return 0.5 * d.dot(M.M * d) - l.dot(d);
}

Eigen::SparseMatrix<double> assemble_p1_form(const TetMesh& mesh, double lambda, double mu) {
    const int nt = mesh.num_tets();
    const Matrix6d metric = material_metric(lambda, mu);

    std::vector<Eigen::Matrix<double, 12, 12>> blocks(nt);
    parallel_for(nt, [&](std::size_t t) {
        const auto p = mesh.tet_points(static_cast<int>(t));
        const auto S = p1_strain_operator(p);
        blocks[t] = mesh.tet_volumes[t] * S.transpose() * metric * S;
    });

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nt) * 144);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        trips.emplace_back(3 * mesh.tets[t][i] + a, 3 * mesh.tets[t][j] + b,
                                           blocks[t](3 * i + a, 3 * j + b));

    Eigen::SparseMatrix<double> B(3 * mesh.num_vertices(), 3 * mesh.num_vertices());
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

Eigen::SparseMatrix<double> assemble_coupling(const TetMesh& mesh) {
    const int nt = mesh.num_tets();
    const Matrix6d W = frobenius_metric();

    std::vector<Eigen::Matrix<double, 12, 6>> blocks(nt);
    parallel_for(nt, [&](std::size_t t) {
        const auto ops = tet_operators(mesh, static_cast<int>(t));
        blocks[t] = ops.volume * ops.S.transpose() * W * ops.lambda_inv;
    });

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nt) * 72);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 4; ++i)
            for (int a = 0; a < 3; ++a)
                for (int j = 0; j < 6; ++j)
                    trips.emplace_back(3 * mesh.tets[t][i] + a, mesh.tet_edges[t][j].edge,
                                       blocks[t](3 * i + a, j));

    Eigen::SparseMatrix<double> G(3 * mesh.num_vertices(), mesh.num_edges());
    G.setFromTriplets(trips.begin(), trips.end());
    return G;
}

std::vector<SymTensor3> tet_strains_from_dofs(const TetMesh& mesh, const EdgeDofVector& d) {
    if (d.size() != mesh.num_edges())
        throw std::invalid_argument("tet_strains_from_dofs: dof vector size mismatch");
    std::vector<SymTensor3> strains(mesh.num_tets());
    parallel_for(mesh.num_tets(), [&](std::size_t t) {
        const auto ops = tet_operators(mesh, static_cast<int>(t));
        Vec6 local;
        for (int i = 0; i < 6; ++i) local[i] = d[mesh.tet_edges[t][i].edge];
        strains[t] = SymTensor3::FromComponents(ops.lambda_inv * local);
    });
    return strains;
}

Eigen::MatrixXd gauge_matrix(const TetMesh& mesh, const Gauge& gauge) {
    const int nv = mesh.num_vertices();
    Eigen::VectorXd w = Eigen::VectorXd::Ones(nv);
    if (gauge.weight == GaugeWeight::Mass) {
        w.setZero();
        for (int t = 0; t < mesh.num_tets(); ++t)
            for (int i = 0; i < 4; ++i) w[mesh.tets[t][i]] += mesh.tet_volumes[t] / 4.0;
    }
    Vec3 c = Vec3::Zero();
    for (int v = 0; v < nv; ++v) c += w[v] * mesh.vertices[v];
    c /= w.sum();

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(6, 3 * nv);
    for (int v = 0; v < nv; ++v) {
        const Vec3 x = mesh.vertices[v] - c;
        for (int k = 0; k < 3; ++k) G(k, 3 * v + k) = w[v];
        // sum w (x - c) ^ u = 0
        G(3, 3 * v + 2) = w[v] * x[1];
        G(3, 3 * v + 1) = -w[v] * x[2];
        G(4, 3 * v + 0) = w[v] * x[2];
        G(4, 3 * v + 2) = -w[v] * x[0];
        G(5, 3 * v + 1) = w[v] * x[0];
        G(5, 3 * v + 0) = -w[v] * x[1];
    }
    return G;
}

GaugedSolver::GaugedSolver(const TetMesh& mesh, const Eigen::SparseMatrix<double>& B,
                           const Gauge& gauge)
    : gauge_(gauge), n_(static_cast<int>(B.rows())) {
    const Eigen::MatrixXd G = gauge_matrix(mesh, gauge);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(B.nonZeros() + 2 * G.size());
    for (int k = 0; k < B.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < G.cols(); ++c)
            if (G(r, c) != 0.0) {
                trips.emplace_back(n_ + r, c, G(r, c));
                trips.emplace_back(c, n_ + r, G(r, c));
            }
    Eigen::SparseMatrix<double> K(n_ + 6, n_ + 6);
    K.setFromTriplets(trips.begin(), trips.end());
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->compute(K);
    if (lu_->info() != Eigen::Success)
        throw std::runtime_error("GaugedSolver: singular bordered system "
                                 "(disconnected mesh or broken gauge)");
}

Eigen::VectorXd GaugedSolver::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("GaugedSolver: rhs size mismatch");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_ + 6);
    b.head(n_) = rhs;
    const Eigen::VectorXd x = lu_->solve(b);
    return x.head(n_);
}

Reconstruction reconstruct_displacement(const TetMesh& mesh, const EdgeDofVector& d,
                                        const Gauge& gauge) {
    if (d.size() != mesh.num_edges())
        throw std::invalid_argument("reconstruct_displacement: dof vector size mismatch");
    const Eigen::SparseMatrix<double> B = assemble_p1_form(mesh, 0.0, 0.5);
    const Eigen::SparseMatrix<double> G = assemble_coupling(mesh);
    GaugedSolver solver(mesh, B, gauge);
    const Eigen::VectorXd v = solver.solve(G * d);

    // residual^2 = sum_T |T| |grad_s v - e_T|_F^2
    const auto strains = tet_strains_from_dofs(mesh, d);
    double res2 = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto S = p1_strain_operator(mesh.tet_points(t));
        Eigen::Matrix<double, 12, 1> u;
        for (int i = 0; i < 4; ++i) u.segment<3>(3 * i) = v.segment<3>(3 * mesh.tets[t][i]);
        const SymTensor3 diff = SymTensor3::FromComponents(S * u) - strains[t];
        res2 += mesh.tet_volumes[t] * diff.ddot(diff);
    }
    return {{v, gauge.tag()}, std::sqrt(std::max(0.0, res2))};
}

Eigen::VectorXd load_vector_from(const TetMesh& mesh, const Eigen::VectorXd& F,
                                 const Gauge& gauge) {
    const Eigen::SparseMatrix<double> B = assemble_p1_form(mesh, 0.0, 0.5);
    const Eigen::SparseMatrix<double> G = assemble_coupling(mesh);
    GaugedSolver solver(mesh, B, gauge);
    const Eigen::VectorXd w = solver.solve(F);
    return G.transpose() * w;
}

Eigen::VectorXd load_vector(const TetMesh& mesh, const LoadData& loads, const Gauge& gauge) {
    return load_vector_from(mesh, discretize_loads(mesh, loads).F, gauge);
}

}  // namespace strainfem
