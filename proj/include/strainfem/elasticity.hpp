#pragma once

#include <strainfem/mesh.hpp>
#include <strainfem/strain_space.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <string>

namespace strainfem {

struct Material {
    double lambda;  // first Lame parameter
    double mu;      // second Lame parameter
};

void validate(const Material& mat);  // throws unless lambda > 0 and mu > 0

/// Isotropic material law A e = lambda tr(e) I + 2 mu e.
SymTensor3 apply_material(const Material& mat, const SymTensor3& e);

/// 6x6 form of A in component space: e' . metric . e = A e' : e.
Matrix6d material_metric(double lambda, double mu);
/// 6x6 form of the Frobenius product: e' . metric . e = e' : e.
Matrix6d frobenius_metric();

/// Body force f(x) and boundary traction g(x, outward unit normal).
struct LoadData {
    std::function<Vec3(const Vec3&)> f;
    std::function<Vec3(const Vec3&, const Vec3&)> g;
    int volume_order = 2;
    int surface_order = 2;
    // Pure-traction data must be orthogonal to rigid motions; when set,
    // solves repair quadrature-level incompatibility by projection instead
    // of refusing.
    bool auto_project = false;
};

LoadData zero_loads();

/// Nodal load vector F with F . v = L(v^h) under the configured quadrature.
Eigen::VectorXd assemble_nodal_loads(const TetMesh& mesh, const LoadData& loads);

/// L(r_k) for the six canonical rigid modes (translations, then rotations
/// about the domain centroid), under the configured quadrature.
Vec6 compatibility_residuals(const TetMesh& mesh, const LoadData& loads);

/// Subtracts from f the rigid field whose consistent-mass projection kills
/// all six discrete rigid components; post-projection residuals are at
/// roundoff. g is unchanged.
LoadData project_loads(const TetMesh& mesh, const LoadData& loads);

/// Relative tolerance on rigid-mode residuals above which loads are refused.
inline constexpr double kCompatRelTol = 1e-8;

struct DiscreteLoads {
    Eigen::VectorXd F;
    Vec6 raw_residuals;    // before any projection
    Vec6 rigid_residuals;  // of the vector actually used
    bool projected = false;
};

/// Assembles F, checks compatibility, and projects if allowed; throws
/// "incompatible loads" otherwise.
DiscreteLoads discretize_loads(const TetMesh& mesh, const LoadData& loads);

/// Elastic energy quadratic form over edge dofs:
/// d' M d = sum_T |T| (A e_T' : e_T) with e_T recovered from the local dofs.
struct EnergyForm {
    Eigen::SparseMatrix<double> M;
    double max_local_cond = 0.0;  // worst per-tet dof-map conditioning
};

EnergyForm assemble_energy(const TetMesh& mesh, const Material& mat);

/// j(d) = 1/2 d.M d - l.d.
double evaluate_j(const EnergyForm& M, const Eigen::VectorXd& l, const EdgeDofVector& d);

/// P1 stiffness-type form sum_T |T| (lambda tr tr + 2 mu :) of grad_s;
/// kernel = rigid motions. Used by the classical solver and, with
/// (lambda, mu) = (0, 1/2), as the reconstruction Gram matrix.
Eigen::SparseMatrix<double> assemble_p1_form(const TetMesh& mesh, double lambda, double mu);

/// Coupling G (3nv x n_edges): <grad_s v, e(d)>_L2 = v . G d.
Eigen::SparseMatrix<double> assemble_coupling(const TetMesh& mesh);

/// Per-tet tensors recovered from edge dofs through the local inverse maps.
std::vector<SymTensor3> tet_strains_from_dofs(const TetMesh& mesh, const EdgeDofVector& d);

/// Rigid-motion gauge: six linear constraints (weighted zero mean
/// displacement and zero mean rotation about the weighted centroid).
enum class GaugeWeight { Uniform, Mass };
struct Gauge {
    GaugeWeight weight = GaugeWeight::Uniform;
    std::string tag() const { return weight == GaugeWeight::Uniform ? "uniform" : "mass"; }
};

Eigen::MatrixXd gauge_matrix(const TetMesh& mesh, const Gauge& gauge);  // 6 x 3nv

/// Continuous piecewise-linear displacement field, gauge-fixed.
struct P1Field {
    Eigen::VectorXd values;  // 3 per vertex
    std::string gauge;
};

/// Factors the bordered system [B G^T; G 0] for a symmetric form B whose
/// kernel is the rigid motions; solve() returns the gauge-satisfying
/// stationary point of 1/2 v.Bv - rhs.v.
class GaugedSolver {
  public:
    GaugedSolver(const TetMesh& mesh, const Eigen::SparseMatrix<double>& B, const Gauge& gauge);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    const Gauge& gauge() const { return gauge_; }

  private:
    Gauge gauge_;
    int n_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

struct Reconstruction {
    P1Field field;
    double residual;  // || grad_s v - e ||_L2
};

/// Least-squares primitive of a piecewise-constant strain field: minimizes
/// || grad_s v - e(d) ||_L2 over gauge-fixed P1 fields. Zero residual
/// exactly on the discrete compatible space.
Reconstruction reconstruct_displacement(const TetMesh& mesh, const EdgeDofVector& d,
                                        const Gauge& gauge = {});

/// Load functional over edge dofs, l = L o kappa_h, realized by one adjoint
/// solve of the reconstruction system: l . d = F . reconstruct(d).
Eigen::VectorXd load_vector(const TetMesh& mesh, const LoadData& loads, const Gauge& gauge = {});
Eigen::VectorXd load_vector_from(const TetMesh& mesh, const Eigen::VectorXd& F,
                                 const Gauge& gauge = {});

}  // namespace strainfem
