#pragma once

#include <strainfem/constraints.hpp>
#include <strainfem/elasticity.hpp>
#include <strainfem/mesh.hpp>

namespace strainfem {

struct SolveOptions {
    // KKT regularization, relative to mean(diag M); selects a particular
    // multiplier among the redundant ones, never the primal.
    double delta_rel = 1e-8;
    double refine_tol = 1e-13;
    int max_refine = 30;
    // Nonzero: randomized initial multiplier (primal must not change).
    unsigned multiplier_seed = 0;
    Gauge gauge{};
};

struct SolveReport {
    EdgeDofVector d;                     // minimizing edge dofs
    std::vector<SymTensor3> tet_strains;
    double objective = 0.0;              // j(d)
    double constraint_residual = 0.0;    // ||C d||
    double kkt_residual = 0.0;
    int refine_iters = 0;
    int constraint_rows = 0;
    double max_local_cond = 0.0;
    Vec6 load_residuals = Vec6::Zero();
    bool loads_projected = false;
    double seconds = 0.0;
};

/// Minimizes j(d) = 1/2 d.M d - l.d over ker C: the intrinsic strain solve.
/// The augmented system [M C^T; C -delta I] is factored symmetric-indefinite
/// and refined against the unregularized KKT matrix; redundant constraint
/// rows are handled by minimum-norm-style multiplier selection.
SolveReport solve_direct(const TetMesh& mesh, const Material& mat, const LoadData& loads,
                         const SolveOptions& opts = {});

/// Classical gauge-fixed P1 displacement solve of the same problem;
/// the exact discrete oracle for solve_direct.
P1Field solve_classical(const TetMesh& mesh, const Material& mat, const LoadData& loads,
                        const Gauge& gauge = {});

/// Relative L2 distance between the intrinsic strain field and the strain of
/// the oracle displacement; absolute norm when the oracle strain vanishes.
double compare_to_oracle(const TetMesh& mesh, const SolveReport& report, const P1Field& oracle);

}  // namespace strainfem
