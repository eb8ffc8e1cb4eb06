#pragma once

#include <strainfem/elasticity.hpp>
#include <strainfem/mesh.hpp>
#include <strainfem/solvers.hpp>

#include <string>
#include <vector>

namespace strainfem {

/// Exact displacement with analytically consistent loads f = -div(A grad_s u)
/// and g = (A grad_s u) . n for a given material.
struct ManufacturedCase {
    std::string name;
    std::string smoothness;  // affine | polynomial | trigonometric
    Material material;
    std::function<Vec3(const Vec3&)> u;
    std::function<SymTensor3(const Vec3&)> strain;
    LoadData loads;
};

/// name in {affine, poly2, trig}.
ManufacturedCase make_case(const std::string& name, const Material& mat);

/// || eps - eps_h ||_L2 of a piecewise-constant strain field against the
/// exact strain, with an order-2 rule per tet.
double l2_strain_error(const TetMesh& mesh, const std::vector<SymTensor3>& tet_strains,
                       const ManufacturedCase& mcase);

struct ConvergenceRow {
    int n;
    double h;
    double err;
    double rate;  // NaN on the first row
    double oracle_gap;
    double seconds;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Runs solve_direct on Kuhn cube meshes for each n, records the L2 strain
/// error, the observed rate between consecutive rows, and the oracle gap.
ConvergenceTable convergence_study(const std::string& case_name,
                                   const std::vector<int>& n_list, const Material& mat);

/// Legacy-ASCII VTK unstructured grid: tet cells, 6-component cell-data
/// tensors for strain and stress, point-data displacement vectors.
void export_vtk(const TetMesh& mesh, const std::vector<SymTensor3>& strain,
                const std::vector<SymTensor3>& stress, const P1Field& displacement,
                const std::string& path);

/// Header "n,h,err,rate,oracle_gap,seconds"; 17 significant digits; the rate
/// field is empty on rows without a predecessor.
void export_csv(const ConvergenceTable& table, const std::string& path);

}  // namespace strainfem
