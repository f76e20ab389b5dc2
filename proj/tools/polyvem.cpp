#include <iostream>

#include <CLI11.hpp>

#include "polyvem/cases.hpp"
#include "polyvem/runner.hpp"

using namespace polyvem;

int main(int argc, char** argv) {
    CLI::App app{"Divergence-free virtual elements for steady Navier-Stokes on polygonal meshes"};
    app.require_subcommand(1);

    auto* mesh = app.add_subcommand("mesh", "mesh utilities");
    mesh->require_subcommand(1);
    auto* gen = mesh->add_subcommand("gen", "generate a mesh file");
    std::string family, domain = "square", mesh_out;
    int n = 10;
    double distortion = 0.0;
    std::uint64_t mesh_seed = 0;
    gen->add_option("--family", family, "quad|tri|web|voronoi|disk-tri")->required()
        ->check(CLI::IsMember({"quad", "tri", "web", "voronoi", "disk-tri"}));
    gen->add_option("--n", n, "subdivisions per unit length (1/h)")->required()->check(CLI::PositiveNumber);
    gen->add_option("--distortion", distortion, "vertex displacement amplitude (quad, disk-tri)");
    gen->add_option("--seed", mesh_seed, "random seed");
    gen->add_option("--domain", domain, "square|disk (voronoi)")->check(CLI::IsMember({"square", "disk"}));
    gen->add_option("-o,--output", mesh_out, "output mesh file")->required();

    auto* run = app.add_subcommand("run", "run a benchmark case");
    std::string config_file, case_name, levels, nu, mode, run_family, export_format, out;
    std::uint64_t seed = 0;
    run->add_option("--config", config_file, "flat key = value config file")->check(CLI::ExistingFile);
    run->add_option("--case", case_name, "registered case name");
    run->add_option("--levels", levels, "comma-separated 1/h values");
    run->add_option("--seed", seed, "mesh seed");
    run->add_option("--mode", mode, "convection form")->check(CLI::IsMember({"plain", "skew"}));
    run->add_option("--nu", nu, "viscosity (comma list for a sweep)");
    run->add_option("--family", run_family, "mesh family override");
    run->add_option("--export", export_format, "field export")->check(CLI::IsMember({"none", "vtk", "csv"}));
    run->add_option("-o,--output", out, "output directory");

    app.add_subcommand("list", "list registered cases");

    auto* verify = app.add_subcommand("verify", "check a case's load against its exact solution");
    std::string verify_name;
    verify->add_option("case", verify_name, "case name (all when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const PolyMesh m = make_mesh(family, domain_from_string(domain), n, distortion, mesh_seed);
            write_mesh(m, mesh_out);
            const QualityReport q = mesh_quality(m);
            std::cout << m.num_cells() << " cells, " << m.num_vertices() << " vertices, min star ratio "
                      << q.min_star_ratio << '\n';
        } else if (run->parsed()) {
            RunConfig cfg = config_file.empty() ? RunConfig{} : RunConfig::load(config_file);
            if (!case_name.empty()) cfg.set("case", case_name);
            if (!levels.empty()) cfg.set("levels", levels);
            if (run->count("--seed")) cfg.set("seed", std::to_string(seed));
            if (!mode.empty()) cfg.set("mode", mode);
            if (!nu.empty()) cfg.set("nu", nu);
            if (!run_family.empty()) cfg.set("family", run_family);
            if (!export_format.empty()) cfg.set("export", export_format);
            if (!out.empty()) cfg.set("output", out);
            if (cfg.case_name.empty()) throw ConfigError("no case given (--case or 'case =' in the config)");
            const std::vector<LevelResult> rows = run_case(cfg, &std::cerr);
            for (std::size_t i = 0; i < rows.size();) {
                std::size_t j = i;
                while (j < rows.size() && rows[j].nu == rows[i].nu) ++j;
                if (j - i < rows.size()) std::cout << "nu = " << rows[i].nu << '\n';
                std::cout << rate_table({rows.begin() + i, rows.begin() + j});
                i = j;
            }
            for (const LevelResult& r : rows)
                if (!r.solve.converged) return 2;
        } else if (app.got_subcommand("list")) {
            std::cout << list_cases();
        } else if (verify->parsed()) {
            int bad = 0;
            for (const BenchmarkCase& c : case_registry()) {
                if (!verify_name.empty() && c.name != verify_name) continue;
                const VerifyResult v = verify_case(c);
                std::printf("%-10s pde %.2e  gradient %.2e  value %.2e  div %.2e  %s\n", c.name.c_str(), v.pde,
                            v.gradient, v.value, v.divergence, v.max() <= 1e-8 ? "ok" : "FAIL");
                bad += v.max() > 1e-8;
            }
            if (!verify_name.empty()) find_case(verify_name);
            return bad ? 1 : 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
