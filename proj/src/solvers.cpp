#include <strainfem/solvers.hpp>

#include <Eigen/SparseCholesky>

#include <chrono>
#include <random>
#include <stdexcept>

namespace strainfem {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SolveReport solve_direct(const TetMesh& mesh, const Material& mat, const LoadData& loads,
                         const SolveOptions& opts) {
    const auto t0 = Clock::now();
    validate(mat);

    const EnergyForm energy = assemble_energy(mesh, mat);
    const ConstraintMatrix cm = assemble_constraints(mesh);
    const DiscreteLoads dl = discretize_loads(mesh, loads);
    const Eigen::VectorXd l = load_vector_from(mesh, dl.F, opts.gauge);

    const int ne = mesh.num_edges();
    const int mrows = static_cast<int>(cm.C.rows());
    const int dim = ne + mrows;

    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    b.head(ne) = l;

    // Residual of the unregularized KKT system at x.
    auto kkt_residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r = b;
        r.head(ne) -= energy.M * x.head(ne);
        if (mrows > 0) {
            r.head(ne) -= cm.C.transpose() * x.tail(mrows);
            r.tail(mrows) -= cm.C * x.head(ne);
        }
        return r;
    };

    const double diag_scale = energy.M.diagonal().sum() / ne;
    double delta = opts.delta_rel * diag_scale;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    for (int attempt = 0;; ++attempt) {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(energy.M.nonZeros() + 2 * cm.C.nonZeros() + mrows);
        for (int k = 0; k < energy.M.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(energy.M, k); it; ++it)
                trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
        for (int k = 0; k < cm.C.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(cm.C, k); it; ++it) {
                trips.emplace_back(ne + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
                trips.emplace_back(static_cast<int>(it.col()), ne + static_cast<int>(it.row()),
                                   it.value());
            }
        for (int r = 0; r < mrows; ++r) trips.emplace_back(ne + r, ne + r, -delta);
        Eigen::SparseMatrix<double> K(dim, dim);
        K.setFromTriplets(trips.begin(), trips.end());
        ldlt.compute(K);
        if (ldlt.info() == Eigen::Success) break;
        if (attempt >= 3)
            throw std::runtime_error("solve_direct: KKT factorization failed");
        delta *= 100.0;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    if (opts.multiplier_seed != 0 && mrows > 0) {
        std::mt19937 rng(opts.multiplier_seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int r = 0; r < mrows; ++r) x[ne + r] = dist(rng);
    }

    SolveReport report;
    const double btol = opts.refine_tol * std::max(1.0, b.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd r = kkt_residual(x);
    for (int it = 0; it < opts.max_refine; ++it) {
        if (r.lpNorm<Eigen::Infinity>() <= btol) break;
        x += ldlt.solve(r);
        r = kkt_residual(x);
        report.refine_iters = it + 1;
    }

    report.d = x.head(ne);
    report.kkt_residual = r.lpNorm<Eigen::Infinity>();
    report.constraint_residual = mrows > 0 ? (cm.C * report.d).norm() : 0.0;
    if (report.constraint_residual > 1e-10 * std::max(1.0, report.d.norm()))
        throw std::runtime_error("solve_direct: constraint residual above tolerance");
    report.tet_strains = tet_strains_from_dofs(mesh, report.d);
    report.objective = evaluate_j(energy, l, report.d);
    report.constraint_rows = mrows;
    report.max_local_cond = energy.max_local_cond;
    report.load_residuals = dl.rigid_residuals;
    report.loads_projected = dl.projected;
    report.seconds = elapsed(t0);
    return report;
}

P1Field solve_classical(const TetMesh& mesh, const Material& mat, const LoadData& loads,
                        const Gauge& gauge) {
    validate(mat);
    const DiscreteLoads dl = discretize_loads(mesh, loads);
    const Eigen::SparseMatrix<double> K = assemble_p1_form(mesh, mat.lambda, mat.mu);
    GaugedSolver solver(mesh, K, gauge);
    return {solver.solve(dl.F), gauge.tag()};
}

double compare_to_oracle(const TetMesh& mesh, const SolveReport& report, const P1Field& oracle) {
    const P1Strain oracle_strain = strain_of_p1(mesh, oracle.values);
    double num2 = 0.0, den2 = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const SymTensor3 diff = report.tet_strains[t] - oracle_strain.tet_strains[t];
        num2 += mesh.tet_volumes[t] * diff.ddot(diff);
        den2 += mesh.tet_volumes[t] * oracle_strain.tet_strains[t].ddot(oracle_strain.tet_strains[t]);
    }
    const double num = std::sqrt(num2), den = std::sqrt(den2);
    if (den < 1e-14) return num;
    return num / den;
}

}  // namespace strainfem
