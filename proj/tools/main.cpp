// strainfem command-line driver: mesh generation, topology checks, the
// intrinsic and classical solvers, and convergence studies.

#include <strainfem/constraints.hpp>
#include <strainfem/harness.hpp>
#include <strainfem/mesh.hpp>
#include <strainfem/solvers.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace strainfem;
using nlohmann::json;

struct ProblemSetup {
    Material material{1.0, 1.0};
    LoadData loads;
    std::string case_name;  // empty for config-defined polynomial loads
};

// Polynomial component: list of terms [c, px, py, pz] -> c x^px y^py z^pz.
std::function<double(const Vec3&)> parse_poly(const json& terms) {
    std::vector<std::array<double, 4>> parsed;
    for (const auto& term : terms) {
        if (!term.is_array() || term.size() != 4)
            throw std::runtime_error("config: polynomial term must be [c, px, py, pz]");
        parsed.push_back({term[0].get<double>(), term[1].get<double>(), term[2].get<double>(),
                          term[3].get<double>()});
    }
    return [parsed](const Vec3& x) {
        double acc = 0.0;
        for (const auto& t : parsed)
            acc += t[0] * std::pow(x[0], t[1]) * std::pow(x[1], t[2]) * std::pow(x[2], t[3]);
        return acc;
    };
}

ProblemSetup load_setup(const std::string& config_path, const std::string& case_name,
                        double lambda, double mu, bool lambda_set, bool mu_set,
                        int project_override) {
    ProblemSetup setup;
    json cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config " + config_path);
        in >> cfg;
        if (cfg.contains("lambda")) setup.material.lambda = cfg["lambda"].get<double>();
        if (cfg.contains("mu")) setup.material.mu = cfg["mu"].get<double>();
    }
    if (lambda_set) setup.material.lambda = lambda;
    if (mu_set) setup.material.mu = mu;
    validate(setup.material);

    std::string name = case_name;
    if (name.empty() && cfg.contains("case")) name = cfg["case"].get<std::string>();

    if (!name.empty()) {
        const ManufacturedCase mcase = make_case(name, setup.material);
        setup.loads = mcase.loads;
        setup.case_name = name;
    } else if (cfg.contains("f") || cfg.contains("g")) {
        setup.loads = zero_loads();
        if (cfg.contains("f")) {
            std::array<std::function<double(const Vec3&)>, 3> comp = {
                parse_poly(cfg["f"][0]), parse_poly(cfg["f"][1]), parse_poly(cfg["f"][2])};
            setup.loads.f = [comp](const Vec3& x) {
                return Vec3(comp[0](x), comp[1](x), comp[2](x));
            };
        }
        if (cfg.contains("g")) {
            std::array<std::function<double(const Vec3&)>, 3> comp = {
                parse_poly(cfg["g"][0]), parse_poly(cfg["g"][1]), parse_poly(cfg["g"][2])};
            setup.loads.g = [comp](const Vec3& x, const Vec3&) {
                return Vec3(comp[0](x), comp[1](x), comp[2](x));
            };
        }
        if (cfg.contains("volume_order")) setup.loads.volume_order = cfg["volume_order"].get<int>();
        if (cfg.contains("surface_order"))
            setup.loads.surface_order = cfg["surface_order"].get<int>();
        if (cfg.contains("project")) setup.loads.auto_project = cfg["project"].get<bool>();
    } else {
        throw std::runtime_error("no load case: pass --case or a config with case/f/g");
    }
    if (project_override >= 0) setup.loads.auto_project = project_override != 0;
    return setup;
}

int run_mesh_gen(int n, const std::string& out) {
    const TetMesh mesh = generate_cube_mesh(n);
    write_mesh(mesh, out);
    std::cout << "wrote " << out << ": " << mesh.num_vertices() << " vertices, "
              << mesh.num_tets() << " tets, " << mesh.num_edges() << " edges\n";
    return 0;
}

int run_check_topology(const std::string& mesh_path, bool constraints_mode,
                       const std::string& out_path) {
    const TetMesh mesh = read_mesh(mesh_path);
    std::ostringstream csv;
    bool all_pass = true;

    if (!constraints_mode) {
        csv << "vertex,class,N,A,Nb,Nib,residual\n";
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const VertexPatch patch = vertex_patch(mesh, v);
            const EulerResult res = euler_check(patch);
            all_pass = all_pass && res.pass;
            csv << v << "," << (patch.boundary_center ? "boundary" : "interior") << ","
                << patch.N << "," << patch.A << "," << patch.N_b << "," << patch.N_ib << ","
                << res.residual << "\n";
        }
    } else {
        csv << "vertex,m_expected,null_dim,pass\n";
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const VertexPatch patch = vertex_patch(mesh, v);
            const int expected = patch.boundary_center ? patch.N_ib : patch.N_b - 3;
            int null_dim = -1;
            bool pass = false;
            try {
                const PatchConstraintSet set = patch_constraints(mesh, patch);
                null_dim = set.m;
                pass = true;
            } catch (const std::exception&) {
                pass = false;
            }
            all_pass = all_pass && pass;
            csv << v << "," << expected << "," << null_dim << "," << (pass ? "1" : "0") << "\n";
        }
        const RankCheck rank = global_rank_check(mesh, assemble_constraints(mesh));
        std::cerr << "global kernel dimension " << rank.kernel_dim << " (expected "
                  << rank.expected << "): " << (rank.pass ? "ok" : "MISMATCH") << "\n";
        all_pass = all_pass && rank.pass;
    }

    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << csv.str();
    }
    return all_pass ? 0 : 1;
}

int run_solve(const std::string& mesh_path, const std::string& method,
              const ProblemSetup& setup, const std::string& out_prefix) {
    const TetMesh mesh = read_mesh(mesh_path);
    const Material mat = setup.material;

    std::vector<SymTensor3> strains;
    P1Field displacement;
    double objective = 0.0;

    if (method == "direct") {
        const SolveReport report = solve_direct(mesh, mat, setup.loads);
        strains = report.tet_strains;
        displacement = reconstruct_displacement(mesh, report.d).field;
        objective = report.objective;
        std::cout << "method=direct edges=" << mesh.num_edges()
                  << " constraint_rows=" << report.constraint_rows
                  << " objective=" << report.objective
                  << " constraint_residual=" << report.constraint_residual
                  << " refine_iters=" << report.refine_iters
                  << " loads_projected=" << (report.loads_projected ? 1 : 0)
                  << " seconds=" << report.seconds << "\n";
    } else if (method == "classical") {
        displacement = solve_classical(mesh, mat, setup.loads);
        strains = strain_of_p1(mesh, displacement.values).tet_strains;
        const EnergyForm energy = assemble_energy(mesh, mat);
        const P1Strain ps = strain_of_p1(mesh, displacement.values);
        const Eigen::VectorXd l = load_vector(mesh, setup.loads);
        objective = evaluate_j(energy, l, ps.edge_dofs);
        std::cout << "method=classical vertices=" << mesh.num_vertices()
                  << " objective=" << objective << "\n";
    } else {
        throw std::runtime_error("unknown method '" + method + "'");
    }

    if (!setup.case_name.empty()) {
        const ManufacturedCase mcase = make_case(setup.case_name, mat);
        std::cout << "l2_strain_error=" << l2_strain_error(mesh, strains, mcase) << "\n";
    }

    if (!out_prefix.empty()) {
        std::vector<SymTensor3> stresses(strains.size());
        for (std::size_t t = 0; t < strains.size(); ++t)
            stresses[t] = apply_material(mat, strains[t]);
        export_vtk(mesh, strains, stresses, displacement, out_prefix + ".vtk");
        std::cout << "wrote " << out_prefix << ".vtk\n";
    }
    (void)objective;
    return 0;
}

int run_compare(const std::string& mesh_path, const ProblemSetup& setup) {
    const TetMesh mesh = read_mesh(mesh_path);
    const SolveReport report = solve_direct(mesh, setup.material, setup.loads);
    const P1Field oracle = solve_classical(mesh, setup.material, setup.loads);
    const double gap = compare_to_oracle(mesh, report, oracle);
    std::cout << "oracle_gap=" << gap << "\n";
    return gap < 1e-9 ? 0 : 1;
}

int run_convergence(const std::string& case_name, const std::string& levels,
                    const Material& mat, const std::string& out_prefix) {
    std::vector<int> n_list;
    std::stringstream ss(levels);
    std::string tok;
    while (std::getline(ss, tok, ',')) n_list.push_back(std::stoi(tok));

    const ConvergenceTable table = convergence_study(case_name, n_list, mat);
    std::printf("%6s %12s %14s %8s %12s %9s\n", "n", "h", "err", "rate", "oracle_gap", "seconds");
    for (const auto& row : table.rows)
        std::printf("%6d %12.6g %14.8g %8.3f %12.3g %9.3f\n", row.n, row.h, row.err, row.rate,
                    row.oracle_gap, row.seconds);
    if (!out_prefix.empty()) {
        export_csv(table, out_prefix + ".csv");
        std::cout << "wrote " << out_prefix << ".csv\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strainfem: direct strain-tensor finite elements for pure-traction "
                 "linearized elasticity"};
    app.require_subcommand(1);

    // mesh-gen
    auto* mesh_gen = app.add_subcommand("mesh-gen", "generate a Kuhn cube mesh");
    int n = 1;
    std::string out_path;
    mesh_gen->add_option("--n", n, "subdivisions per axis")->required();
    mesh_gen->add_option("--out", out_path, "output mesh path")->required();

    // check-topology
    auto* check = app.add_subcommand("check-topology", "per-vertex Euler and constraint checks");
    std::string check_mesh, check_out;
    bool constraints_mode = false;
    check->add_option("--mesh", check_mesh, "mesh path")->required();
    check->add_flag("--constraints", constraints_mode, "check constraint counts instead");
    check->add_option("--out", check_out, "CSV output path (default stdout)");

    // common solve options
    std::string solve_mesh, method = "direct", case_name, config_path, solve_out;
    double lambda = 1.0, mu = 1.0;
    int project_override = -1;

    auto add_problem_opts = [&](CLI::App* cmd, bool with_case) {
        cmd->add_option("--lambda", lambda, "first Lame parameter");
        cmd->add_option("--mu", mu, "second Lame parameter");
        if (with_case) {
            cmd->add_option("--case", case_name, "manufactured case: affine|poly2|trig");
            cmd->add_option("--config", config_path, "JSON problem config");
            cmd->add_flag_callback("--project", [&] { project_override = 1; },
                                   "force rigid-mode projection of the loads");
            cmd->add_flag_callback("--no-project", [&] { project_override = 0; },
                                   "refuse incompatible loads instead of projecting");
        }
    };

    auto* solve = app.add_subcommand("solve", "run one solver");
    solve->add_option("--mesh", solve_mesh, "mesh path")->required();
    solve->add_option("--method", method, "direct|classical");
    solve->add_option("--out", solve_out, "output prefix (.vtk)");
    add_problem_opts(solve, true);

    auto* compare = app.add_subcommand("compare", "run both solvers and print the strain gap");
    compare->add_option("--mesh", solve_mesh, "mesh path")->required();
    add_problem_opts(compare, true);

    auto* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
    std::string levels = "2,4,8";
    conv->add_option("--case", case_name, "manufactured case")->required();
    conv->add_option("--levels", levels, "comma-separated mesh subdivisions");
    conv->add_option("--lambda", lambda, "first Lame parameter");
    conv->add_option("--mu", mu, "second Lame parameter");
    conv->add_option("--out", solve_out, "output prefix (.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mesh_gen->parsed()) return run_mesh_gen(n, out_path);
        if (check->parsed()) return run_check_topology(check_mesh, constraints_mode, check_out);

        const bool lambda_set = solve->count("--lambda") > 0 || compare->count("--lambda") > 0;
        const bool mu_set = solve->count("--mu") > 0 || compare->count("--mu") > 0;
        if (solve->parsed()) {
            const ProblemSetup setup = load_setup(config_path, case_name, lambda, mu,
                                                  lambda_set, mu_set, project_override);
            return run_solve(solve_mesh, method, setup, solve_out);
        }
        if (compare->parsed()) {
            const ProblemSetup setup = load_setup(config_path, case_name, lambda, mu,
                                                  lambda_set, mu_set, project_override);
            return run_compare(solve_mesh, setup);
        }
        if (conv->parsed())
            return run_convergence(case_name, levels, Material{lambda, mu}, solve_out);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
