#include <strainfem/harness.hpp>

#include <strainfem/quadrature.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace strainfem {

namespace {

LoadData equilibrium_loads(const Material& mat,
                           const std::function<Vec3(const Vec3&)>& f,
                           const std::function<SymTensor3(const Vec3&)>& strain) {
    LoadData loads;
    loads.f = f;
    loads.g = [mat, strain](const Vec3& x, const Vec3& n) {
        return apply_material(mat, strain(x)).apply(n);
    };
    loads.auto_project = true;
    return loads;
}

}  // namespace

ManufacturedCase make_case(const std::string& name, const Material& mat) {
    validate(mat);
    ManufacturedCase c;
    c.name = name;
    c.material = mat;

    if (name == "affine") {
        // u = B x with B = diag(1,-1,0); trace-free, so f = 0 and the
        // traction is 2 mu B n.
        c.smoothness = "affine";
        c.u = [](const Vec3& x) { return Vec3(x[0], -x[1], 0.0); };
        c.strain = [](const Vec3&) { return SymTensor3{1.0, -1.0, 0.0, 0.0, 0.0, 0.0}; };
        c.loads = equilibrium_loads(mat, [](const Vec3&) { return Vec3::Zero().eval(); },
                                    c.strain);
        return c;
    }

    if (name == "poly2") {
        // u = (x^2 + yz, y^2 + xz, z^2 + xy); the stress is affine and its
        // divergence is the constant (2 lambda + 4 mu)(1,1,1).
        c.smoothness = "polynomial";
        c.u = [](const Vec3& x) {
            return Vec3(x[0] * x[0] + x[1] * x[2], x[1] * x[1] + x[0] * x[2],
                        x[2] * x[2] + x[0] * x[1]);
        };
        c.strain = [](const Vec3& x) {
            return SymTensor3{2.0 * x[0], 2.0 * x[1], 2.0 * x[2], x[2], x[1], x[0]};
        };
        const double fc = -(2.0 * mat.lambda + 4.0 * mat.mu);
        c.loads = equilibrium_loads(mat, [fc](const Vec3&) { return Vec3(fc, fc, fc); },
                                    c.strain);
        return c;
    }

    if (name == "trig") {
        // u_i = sin(pi x) sin(pi y) sin(pi z) for every component.
        c.smoothness = "trigonometric";
        const double pi = M_PI;
        auto sines = [pi](const Vec3& x, double s[3], double cs[3]) {
            for (int k = 0; k < 3; ++k) {
                s[k] = std::sin(pi * x[k]);
                cs[k] = std::cos(pi * x[k]);
            }
        };
        c.u = [sines](const Vec3& x) {
            double s[3], cs[3];
            sines(x, s, cs);
            const double v = s[0] * s[1] * s[2];
            return Vec3(v, v, v);
        };
        auto grad_s = [sines, pi](const Vec3& x) {
            double s[3], cs[3];
            sines(x, s, cs);
            const double p1 = pi * cs[0] * s[1] * s[2];
            const double p2 = pi * s[0] * cs[1] * s[2];
            const double p3 = pi * s[0] * s[1] * cs[2];
            return SymTensor3{p1, p2, p3, 0.5 * (p1 + p2), 0.5 * (p1 + p3), 0.5 * (p2 + p3)};
        };
        c.strain = grad_s;
        const double lambda = mat.lambda, mu = mat.mu;
        auto body = [sines, pi, lambda, mu](const Vec3& x) {
            double s[3], cs[3];
            sines(x, s, cs);
            const double sp = s[0] * s[1] * s[2];
            const double p2sq = pi * pi;
            // grad of div u: dD_i = pi^2 (-s + sum of the two mixed cosines)
            const double d1 = p2sq * (-sp + cs[0] * cs[1] * s[2] + cs[0] * s[1] * cs[2]);
            const double d2 = p2sq * (cs[0] * cs[1] * s[2] - sp + s[0] * cs[1] * cs[2]);
            const double d3 = p2sq * (cs[0] * s[1] * cs[2] + s[0] * cs[1] * cs[2] - sp);
            // f = -(lambda + mu) grad(div u) - mu lap u, lap u_i = -3 pi^2 u_i
            return Vec3(-(lambda + mu) * d1 + 3.0 * mu * p2sq * sp,
                        -(lambda + mu) * d2 + 3.0 * mu * p2sq * sp,
                        -(lambda + mu) * d3 + 3.0 * mu * p2sq * sp);
        };
        c.loads = equilibrium_loads(mat, body, grad_s);
        return c;
    }

    throw std::invalid_argument("make_case: unknown case '" + name + "'");
}

double l2_strain_error(const TetMesh& mesh, const std::vector<SymTensor3>& tet_strains,
                       const ManufacturedCase& mcase) {
    if (static_cast<int>(tet_strains.size()) != mesh.num_tets())
        throw std::invalid_argument("l2_strain_error: strain list size mismatch");
    double acc = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t)
        for (const auto& qp : tet_quadrature(mesh.tet_points(t), 2)) {
            const SymTensor3 diff = mcase.strain(qp.x) - tet_strains[t];
            acc += qp.w * diff.ddot(diff);
        }
    return std::sqrt(std::max(0.0, acc));
}

ConvergenceTable convergence_study(const std::string& case_name,
                                   const std::vector<int>& n_list, const Material& mat) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("convergence_study: n_list must be increasing");

    ConvergenceTable table;
    for (int n : n_list) {
        const auto t0 = std::chrono::steady_clock::now();
        const TetMesh mesh = generate_cube_mesh(n);
        const ManufacturedCase mcase = make_case(case_name, mat);
        const SolveReport report = solve_direct(mesh, mat, mcase.loads);
        const P1Field oracle = solve_classical(mesh, mat, mcase.loads);

        ConvergenceRow row;
        row.n = n;
        row.h = mesh.max_diameter();
        row.err = l2_strain_error(mesh, report.tet_strains, mcase);
        row.oracle_gap = compare_to_oracle(mesh, report, oracle);
        row.rate = std::numeric_limits<double>::quiet_NaN();
        if (!table.rows.empty()) {
            const auto& prev = table.rows.back();
            row.rate = std::log(prev.err / row.err) / std::log(prev.h / row.h);
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        table.rows.push_back(row);
    }
    return table;
}

void export_vtk(const TetMesh& mesh, const std::vector<SymTensor3>& strain,
                const std::vector<SymTensor3>& stress, const P1Field& displacement,
                const std::string& path) {
    const int nt = mesh.num_tets(), nv = mesh.num_vertices();
    if (static_cast<int>(strain.size()) != nt || static_cast<int>(stress.size()) != nt ||
        displacement.values.size() != 3 * nv)
        throw std::invalid_argument("export_vtk: field size mismatch");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_vtk: cannot open " + path);
    char buf[256];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };

    out << "# vtk DataFile Version 3.0\n";
    out << "strainfem fields\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices)
        out << num(v[0]) << " " << num(v[1]) << " " << num(v[2]) << "\n";
    out << "CELLS " << nt << " " << 5 * nt << "\n";
    for (const auto& t : mesh.tets)
        out << "4 " << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
    out << "CELL_TYPES " << nt << "\n";
    for (int t = 0; t < nt; ++t) out << "10\n";

    out << "CELL_DATA " << nt << "\n";
    out << "FIELD elastic_fields 2\n";
    auto write_tensors = [&](const char* name, const std::vector<SymTensor3>& field) {
        out << name << " 6 " << nt << " double\n";
        for (const auto& e : field) {
            const Vec6 c = e.components();
            for (int i = 0; i < 6; ++i) out << num(c[i]) << (i == 5 ? "\n" : " ");
        }
    };
    write_tensors("strain", strain);
    write_tensors("stress", stress);

    out << "POINT_DATA " << nv << "\n";
    out << "VECTORS displacement double\n";
    for (int v = 0; v < nv; ++v)
        out << num(displacement.values[3 * v]) << " " << num(displacement.values[3 * v + 1])
            << " " << num(displacement.values[3 * v + 2]) << "\n";
    if (!out) throw std::runtime_error("export_vtk: write failed for " + path);
}

void export_csv(const ConvergenceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_csv: cannot open " + path);
    char buf[256];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "n,h,err,rate,oracle_gap,seconds\n";
    for (const auto& row : table.rows) {
        out << row.n << "," << num(row.h) << "," << num(row.err) << ",";
        if (!std::isnan(row.rate)) out << num(row.rate);
        out << "," << num(row.oracle_gap) << "," << num(row.seconds) << "\n";
    }
    if (!out) throw std::runtime_error("export_csv: write failed for " + path);
}

}  // namespace strainfem
