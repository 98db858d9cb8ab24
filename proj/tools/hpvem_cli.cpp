// Command-line front end: mesh generation, single solves, convergence studies
// and property checks.

#include "hpvem/assembly.hpp"
#include "hpvem/eigensolve.hpp"
#include "hpvem/errors.hpp"
#include "hpvem/mesh.hpp"
#include "hpvem/property_checks.hpp"
#include "hpvem/report.hpp"
#include "hpvem/study.hpp"
#include "hpvem/test_cases.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hpvem;

namespace {

struct Options {
    std::string case_name = "tc1";
    std::string regime = "h";
    int p = 1;
    int p_min = 1;
    int p_max = 8;
    int mu = 1;
    int hp_cap = 0;
    double merge_tol = 1e-9;
    double sigma = 0.5;
    int layers = 6;
    int layers_min = 0;
    std::string stab = "drecipe";
    double eps = 2.0;
    int neigs = 4;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string ref_file;
    std::string mesh_kind = "cartesian";
    std::vector<int> sizes{4, 8, 16, 32};
    int mesh_n = 4;
    int lloyd = 50;
    std::string abscissa;
    int quad_extra = 2;
    double tol = 1e-10;
    bool no_timing = false;
    bool quick = false;
    bool dump = false;
    std::string write_ref;
};

StudyConfig to_config(const Options& o)
{
    StudyConfig c;
    c.case_name = make_test_case(o.case_name, o.eps).name;
    c.eps = o.eps;
    c.regime = parse_regime(o.regime);
    c.p = o.p;
    c.p_min = o.p_min;
    c.p_max = o.p_max;
    c.mu = o.mu;
    c.hp_cap = o.hp_cap;
    c.sigma = o.sigma;
    c.n_min = o.layers_min;
    c.n_max = o.layers;
    c.stab.s1 = parse_s1_kind(o.stab);
    c.n_eigs = o.neigs;
    c.seed = o.seed;
    c.ref_file = o.ref_file;
    c.mesh_kind = o.mesh_kind;
    c.mesh_sizes = o.sizes;
    c.mesh_n = o.mesh_n;
    c.lloyd_iterations = o.lloyd;
    if (!o.abscissa.empty()) {
        c.abscissa = parse_abscissa(o.abscissa);
    }
    c.quad_extra = o.quad_extra;
    c.solver_tolerance = o.tol;
    c.timing = !o.no_timing;
    if (!(c.sigma > 0.0 && c.sigma < 1.0)) {
        throw ArgumentError("sigma must lie in (0, 1)");
    }
    return c;
}

std::string stem(const StudyConfig& c)
{
    std::string s = c.case_name + "_" + to_string(c.regime);
    if (c.case_name == "tc4_checkerboard") {
        std::ostringstream e;
        e << c.eps;
        s += "_eps" + e.str();
    }
    return s;
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir + ": " + ec.message());
    }
}

int cmd_mesh(const Options& o)
{
    const StudyConfig c = to_config(o);
    const TestCase tc = make_test_case(c.case_name, c.eps);
    ensure_dir(o.out);
    if (c.regime == Regime::hp) {
        const GradedDomain kind = tc.id == CaseId::lshape ? GradedDomain::lshape
                                  : tc.id == CaseId::checkerboard
                                      ? GradedDomain::square_checkerboard
                                      : throw ArgumentError("hp meshes exist for tc3 and tc4 only");
        for (int n = c.n_min; n <= c.n_max; ++n) {
            const LayeredMesh lm = generate_graded(kind, n, c.sigma);
            const DegreeMap deg = assign_hp(lm, c.mu, c.hp_cap);
            const std::string path = o.out + "/" + stem(c) + "_n" + std::to_string(n) + ".mesh";
            write_mesh_file(path, lm.mesh, &lm.layer_of_cell, &deg.cell_degree);
            std::cout << path << ": " << lm.mesh.num_cells() << " cells\n";
        }
        return 0;
    }
    const std::vector<Discretization> steps = study_steps(c, tc);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string path = o.out + "/" + stem(c) + "_" + std::to_string(i) + ".mesh";
        write_mesh_file(path, steps[i].mesh, nullptr, &steps[i].degrees.cell_degree);
        std::cout << path << ": " << steps[i].mesh.num_cells() << " cells\n";
    }
    return 0;
}

int cmd_solve(const Options& o)
{
    StudyConfig c = to_config(o);
    const TestCase tc = make_test_case(c.case_name, c.eps);
    // A single step of the configured regime.
    switch (c.regime) {
    case Regime::h: c.mesh_sizes = {c.mesh_n}; break;
    case Regime::p: c.p_min = c.p_max = c.p; break;
    case Regime::hp: c.n_min = c.n_max; break;
    }
    const Discretization d = study_steps(c, tc).front();
    AssemblyOptions ao;
    ao.stab = c.stab;
    ao.quad_extra = c.quad_extra;
    const SystemMatrices sys = assemble(d.mesh, d.degrees, tc.coeffs, tc.bc, ao);
    if (o.dump) {
        ensure_dir(o.out);
        write_matrix_file(o.out + "/A.txt", sys.A);
        write_matrix_file(o.out + "/M.txt", sys.M);
    }
    SolverConfig sc;
    sc.n_eigs = c.n_eigs;
    sc.tolerance = c.solver_tolerance;
    sc.zero_mode = tc.bc.kind == BoundaryKind::neumann;
    const EigenResult eig = solve_generalized(sys.A, sys.M, sc);

    std::vector<double> expected;
    try {
        expected = reference_spectrum(tc, c.n_eigs, c.ref_file).expanded(c.n_eigs);
    } catch (const IngestionError&) {
        if (o.write_ref.empty()) {
            throw;
        }
    }
    std::printf("# %s cells=%d dofs=%d max_p=%d solver=%s\n", tc.name.c_str(),
                d.mesh.num_cells(), sys.dofs.n_free, d.degrees.max_degree(),
                eig.dense ? "dense" : "shift-invert");
    for (double z : eig.zero_modes) {
        std::printf("# zero mode %.6e\n", z);
    }
    std::printf("index,computed,residual,reference,rel_error\n");
    for (int i = 0; i < eig.values.size(); ++i) {
        if (i < static_cast<int>(expected.size())) {
            std::printf("%d,%.15g,%.3e,%.15g,%.6e\n", i + 1, eig.values[i], eig.residuals[i],
                        expected[i], std::abs(eig.values[i] - expected[i]) / expected[i]);
        } else {
            std::printf("%d,%.15g,%.3e,,\n", i + 1, eig.values[i], eig.residuals[i]);
        }
    }
    if (!o.write_ref.empty()) {
        ReferenceSpectrum ref;
        ref.source = ReferenceSource::external_data_file;
        std::vector<double> v(eig.values.data(), eig.values.data() + eig.values.size());
        // Merge numerically equal values into multiplets.
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!ref.values.empty() && std::abs(v[i] - ref.values.back()) <= o.merge_tol * v[i]) {
                ++ref.multiplicities.back();
            } else {
                ref.values.push_back(v[i]);
                ref.multiplicities.push_back(1);
            }
        }
        // The last multiplet may be cut by the requested count.
        ref.values.pop_back();
        ref.multiplicities.pop_back();
        std::ostringstream cmd;
        cmd << "hpvem solve --case " << o.case_name << " --eps " << o.eps << " --regime "
            << o.regime << " --p " << o.p << " --mu " << o.mu << " --hp-cap " << o.hp_cap
            << " --sigma " << o.sigma << " --layers " << o.layers << " --stab " << o.stab << " --neigs " << o.neigs
            << " --merge-tol " << o.merge_tol << " --write-ref " << o.write_ref;
        std::ostringstream info;
        info << "mesh: " << d.mesh.num_cells() << " cells, " << sys.dofs.n_free
             << " dofs, max degree " << d.degrees.max_degree();
        std::vector<std::string> header{
            tc.name + " nonzero Neumann eigenvalues, value multiplicity",
            "provenance: computed by this code on a deep discretization", info.str(),
            "regenerate: " + cmd.str()};
        if (!o.ref_file.empty()) {
            const ReferenceSpectrum other = read_reference_file(o.ref_file);
            std::ostringstream cross;
            cross << "cross-check against " << fs::path(o.ref_file).filename().string()
                  << ", relative differences:";
            for (std::size_t i = 0; i < std::min(other.values.size(), ref.values.size()); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, " %.1e",
                              std::abs(ref.values[i] - other.values[i]) / other.values[i]);
                cross << buf;
            }
            header.push_back(cross.str());
        }
        write_reference_file(o.write_ref, ref, header);
        std::cerr << "wrote " << o.write_ref << '\n';
    }
    return 0;
}

int cmd_study(const Options& o)
{
    const StudyConfig c = to_config(o);
    ensure_dir(o.out);
    const std::string base = o.out + "/" + stem(c);
    std::vector<ConvergenceRecord> records;
    try {
        run_study(c, [&records](const ConvergenceRecord& r) {
            records.push_back(r);
            std::fprintf(stderr, "run %d: %d dofs, lambda_1 error %.3e\n", r.run, r.dofs,
                         r.rel_error.empty() ? 0.0 : r.rel_error[0]);
            std::fflush(stderr);
        });
    } catch (const Error&) {
        // Flush what was computed before the failing step.
        emit_report(base + ".partial.csv", ReportFormat::csv, c, records, {});
        throw;
    }
    std::vector<FitResult> fits;
    for (int i = 0; i < c.n_eigs; ++i) {
        try {
            fits.push_back(fit_study(records, i, c.default_fit_model()));
        } catch (const FitError& e) {
            std::cerr << "lambda_" << i + 1 << ": " << e.what() << '\n';
        }
    }
    emit_report(base + ".csv", ReportFormat::csv, c, records, fits);
    emit_report(base + ".summary.txt", ReportFormat::summary, c, records, fits);
    write_summary(std::cout, c, records, fits);
    return 0;
}

int cmd_check(const Options& o)
{
    const std::vector<CheckResult> results = run_property_checks(o.quick, o.seed);
    bool ok = true;
    for (const CheckResult& r : results) {
        std::printf("%s %s (%.3e, limit %.1e)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.value, r.threshold);
        ok = ok && r.passed;
    }
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hp virtual element eigenvalue solver"};
    app.set_config("--config", "", "key=value file mirroring the long options");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--case", o.case_name, "tc1 | tc2 | tc3 | tc4 (or full names)");
    app.add_option("--regime", o.regime, "h | p | hp");
    app.add_option("--p", o.p, "degree (h regime; solve in p regime)");
    app.add_option("--pmin", o.p_min, "first degree of the p regime");
    app.add_option("--pmax", o.p_max, "last degree of the p regime");
    app.add_option("--mu", o.mu, "hp degree slope: layer j gets mu (j + 1)");
    app.add_option("--hp-cap", o.hp_cap, "upper bound on hp layer degrees (0: none)");
    app.add_option("--sigma", o.sigma, "grading parameter in (0, 1)");
    app.add_option("--layers", o.layers, "finest hp refinement level n (n + 1 layers)");
    app.add_option("--layers-min", o.layers_min, "coarsest hp refinement level");
    app.add_option("--stab", o.stab, "explicit | drecipe")
        ->check(CLI::IsMember({"explicit", "drecipe"}));
    app.add_option("--eps", o.eps, "checkerboard contrast (tc4)");
    app.add_option("--neigs", o.neigs, "solve: eigenvalues computed; study: distinct reference values tracked");
    app.add_option("--seed", o.seed, "random seed for Voronoi meshes and checks");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--ref-file", o.ref_file, "reference spectrum file");
    app.add_option("--mesh", o.mesh_kind, "cartesian | voronoi")
        ->check(CLI::IsMember({"cartesian", "voronoi"}));
    app.add_option("--sizes", o.sizes, "h regime mesh sizes (cells per side or seed counts)")
        ->delimiter(',');
    app.add_option("--mesh-n", o.mesh_n, "mesh size of the p regime and of single solves");
    app.add_option("--lloyd", o.lloyd, "Lloyd iterations for Voronoi meshes");
    app.add_option("--abscissa", o.abscissa, "sqrt_dof | cbrt_dof | h | p");
    app.add_option("--quad-extra", o.quad_extra, "element quadrature exactness 2p + this");
    app.add_option("--tol", o.tol, "eigensolver residual tolerance");
    app.add_flag("--no-timing", o.no_timing, "write zero wall times (reproducible reports)");

    auto* mesh = app.add_subcommand("mesh", "generate and write the meshes of a study");
    auto* solve = app.add_subcommand("solve", "solve one configuration");
    solve->add_flag("--dump-matrices", o.dump, "write A.txt and M.txt to the output directory");
    solve->add_option("--write-ref", o.write_ref, "write the eigenvalues as a reference file");
    solve->add_option("--merge-tol", o.merge_tol, "relative gap below which values merge into a multiplet");
    auto* study = app.add_subcommand("study", "run a convergence study, write CSV and summary");
    auto* check = app.add_subcommand("check", "run the property suites");
    check->add_flag("--quick", o.quick, "smaller samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*mesh) return cmd_mesh(o);
        if (*solve) return cmd_solve(o);
        if (*study) return cmd_study(o);
        if (*check) return cmd_check(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
