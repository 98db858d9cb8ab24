#include "hpvem/study.hpp"

#include "hpvem/errors.hpp"

#include <chrono>
#include <cmath>

namespace hpvem {

Regime parse_regime(const std::string& s)
{
    if (s == "h") return Regime::h;
    if (s == "p") return Regime::p;
    if (s == "hp") return Regime::hp;
    throw ArgumentError("unknown regime: " + s);
}

Abscissa parse_abscissa(const std::string& s)
{
    if (s == "sqrt_dof") return Abscissa::sqrt_dof;
    if (s == "cbrt_dof") return Abscissa::cbrt_dof;
    if (s == "h") return Abscissa::h;
    if (s == "p" || s == "degree") return Abscissa::degree;
    throw ArgumentError("unknown abscissa: " + s);
}

FitModel parse_fit_model(const std::string& s)
{
    if (s == "algebraic") return FitModel::algebraic;
    if (s == "exponential") return FitModel::exponential;
    throw ArgumentError("unknown fit model: " + s);
}

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::h: return "h";
    case Regime::p: return "p";
    case Regime::hp: return "hp";
    }
    return "?";
}

std::string to_string(Abscissa a)
{
    switch (a) {
    case Abscissa::sqrt_dof: return "sqrt_dof";
    case Abscissa::cbrt_dof: return "cbrt_dof";
    case Abscissa::h: return "h";
    case Abscissa::degree: return "p";
    }
    return "?";
}

std::string to_string(FitModel m)
{
    return m == FitModel::algebraic ? "algebraic" : "exponential";
}

Abscissa StudyConfig::effective_abscissa() const
{
    if (abscissa) {
        return *abscissa;
    }
    switch (regime) {
    case Regime::h: return Abscissa::h;
    case Regime::p: return Abscissa::sqrt_dof;
    case Regime::hp: return Abscissa::cbrt_dof;
    }
    return Abscissa::h;
}

FitModel StudyConfig::default_fit_model() const
{
    return regime == Regime::h ? FitModel::algebraic : FitModel::exponential;
}

namespace {

PolyMesh fixed_mesh(const StudyConfig& config, const TestCase& tc, int size)
{
    if (config.mesh_kind == "cartesian") {
        return case_cartesian_mesh(tc, size);
    }
    if (config.mesh_kind == "voronoi") {
        if (tc.id == CaseId::lshape || tc.id == CaseId::checkerboard) {
            throw ArgumentError("Voronoi meshes are only available on rectangular domains "
                                "without interfaces");
        }
        return generate_voronoi(size, tc.bbox, config.lloyd_iterations, config.seed);
    }
    throw ArgumentError("unknown mesh kind: " + config.mesh_kind);
}

double abscissa_of(Abscissa a, int dofs, double h, int degree)
{
    switch (a) {
    case Abscissa::sqrt_dof: return std::sqrt(static_cast<double>(dofs));
    case Abscissa::cbrt_dof: return std::cbrt(static_cast<double>(dofs));
    case Abscissa::h: return h;
    case Abscissa::degree: return degree;
    }
    return 0.0;
}

} // namespace

std::vector<Discretization> study_steps(const StudyConfig& config, const TestCase& tc)
{
    std::vector<Discretization> steps;
    switch (config.regime) {
    case Regime::h:
        if (config.mesh_sizes.empty()) {
            throw ArgumentError("h regime needs at least one mesh size");
        }
        for (int n : config.mesh_sizes) {
            PolyMesh mesh = fixed_mesh(config, tc, n);
            DegreeMap deg = assign_uniform(mesh, config.p);
            steps.push_back({std::move(mesh), std::move(deg)});
        }
        break;
    case Regime::p: {
        if (config.p_min < 1 || config.p_max < config.p_min) {
            throw ArgumentError("p regime needs 1 <= p_min <= p_max");
        }
        const PolyMesh mesh = fixed_mesh(config, tc, config.mesh_n);
        for (int p = config.p_min; p <= config.p_max; ++p) {
            steps.push_back({mesh, assign_uniform(mesh, p)});
        }
        break;
    }
    case Regime::hp: {
        GradedDomain kind;
        if (tc.id == CaseId::lshape) {
            kind = GradedDomain::lshape;
        } else if (tc.id == CaseId::checkerboard) {
            kind = GradedDomain::square_checkerboard;
        } else {
            throw ArgumentError("hp regime needs a graded-mesh domain (tc3 or tc4)");
        }
        if (config.n_min < 0 || config.n_max < config.n_min) {
            throw ArgumentError("hp regime needs 0 <= n_min <= n_max");
        }
        for (int n = config.n_min; n <= config.n_max; ++n) {
            LayeredMesh lm = generate_graded(kind, n, config.sigma);
            DegreeMap deg = assign_hp(lm, config.mu, config.hp_cap);
            steps.push_back({std::move(lm.mesh), std::move(deg)});
        }
        break;
    }
    }
    return steps;
}

EigenResult solve_case(const TestCase& tc, const Discretization& d, const StabChoice& stab,
                       int n_eigs, int quad_extra, double tolerance, int* dofs)
{
    AssemblyOptions opts;
    opts.stab = stab;
    opts.quad_extra = quad_extra;
    const SystemMatrices sys = assemble(d.mesh, d.degrees, tc.coeffs, tc.bc, opts);
    if (dofs) {
        *dofs = sys.dofs.n_free;
    }
    SolverConfig sc;
    sc.n_eigs = n_eigs;
    sc.tolerance = tolerance;
    sc.zero_mode = tc.bc.kind == BoundaryKind::neumann;
    return solve_generalized(sys.A, sys.M, sc);
}

std::vector<ConvergenceRecord> run_study(
    const StudyConfig& config, const std::function<void(const ConvergenceRecord&)>& on_record)
{
    if (config.n_eigs < 1) {
        throw ArgumentError("n_eigs must be >= 1");
    }
    const TestCase tc = make_test_case(config.case_name, config.eps);
    const ReferenceSpectrum ref = reference_spectrum(tc, config.n_eigs, config.ref_file);
    if (static_cast<int>(ref.values.size()) < config.n_eigs) {
        throw CoverageError("reference lists only " + std::to_string(ref.values.size()) +
                            " distinct eigenvalues, " + std::to_string(config.n_eigs) +
                            " requested");
    }
    int n_solve = 0;
    for (int j = 0; j < config.n_eigs; ++j) {
        n_solve += ref.multiplicities[j];
    }
    const std::vector<Discretization> steps = study_steps(config, tc);
    const Abscissa absc = config.effective_abscissa();

    std::vector<ConvergenceRecord> records;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        ConvergenceRecord rec;
        rec.run = static_cast<int>(s);
        const EigenResult eig = solve_case(tc, steps[s], config.stab, n_solve,
                                           config.quad_extra, config.solver_tolerance, &rec.dofs);
        const auto t1 = std::chrono::steady_clock::now();
        rec.h = steps[s].mesh.max_diameter();
        rec.max_degree = steps[s].degrees.max_degree();
        rec.abscissa = abscissa_of(absc, rec.dofs, rec.h, rec.max_degree);
        rec.spectrum.assign(eig.values.data(), eig.values.data() + eig.values.size());
        // Multiplet j owns the next multiplicities[j] computed values.
        int offset = 0;
        for (int j = 0; j < config.n_eigs; ++j) {
            const double lam_ref = ref.values[j];
            int best = offset;
            for (int i = offset; i < offset + ref.multiplicities[j]; ++i) {
                if (std::abs(eig.values[i] - lam_ref) < std::abs(eig.values[best] - lam_ref)) {
                    best = i;
                }
            }
            rec.reference.push_back(lam_ref);
            rec.multiplicity.push_back(ref.multiplicities[j]);
            rec.computed.push_back(eig.values[best]);
            rec.rel_error.push_back(std::abs(eig.values[best] - lam_ref) / std::abs(lam_ref));
            rec.residual.push_back(eig.residuals[best]);
            offset += ref.multiplicities[j];
        }
        rec.walltime = config.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
        if (!records.empty() && rec.dofs <= records.back().dofs) {
            throw ArgumentError("DOF counts must increase along a study");
        }
        records.push_back(rec);
        if (on_record) {
            on_record(records.back());
        }
    }
    return records;
}

FitResult fit_rates(const std::vector<double>& x, const std::vector<double>& err, FitModel model,
                    double floor)
{
    if (x.size() != err.size()) {
        throw ArgumentError("fit needs matching abscissa and error lists");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(err[i] >= floor) || !std::isfinite(err[i])) {
            continue;
        }
        if (model == FitModel::algebraic) {
            if (!(x[i] > 0.0)) {
                continue;
            }
            xs.push_back(std::log(x[i]));
        } else {
            xs.push_back(x[i]);
        }
        ys.push_back(std::log(err[i]));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 3) {
        throw FitError("rate fit needs at least 3 points above the error floor, got " +
                       std::to_string(n));
    }
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw FitError("rate fit needs distinct abscissae");
    }
    FitResult f;
    f.model = model;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.rate = model == FitModel::algebraic ? f.slope : -f.slope;
    // A flat error sequence is fitted exactly by a zero slope.
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

FitResult fit_study(const std::vector<ConvergenceRecord>& records, int eig_index, FitModel model,
                    double floor)
{
    std::vector<double> x;
    std::vector<double> e;
    for (const ConvergenceRecord& r : records) {
        if (eig_index < 0 || eig_index >= static_cast<int>(r.rel_error.size())) {
            throw ArgumentError("eigenvalue index out of range");
        }
        x.push_back(r.abscissa);
        e.push_back(r.rel_error[eig_index]);
    }
    FitResult f = fit_rates(x, e, model, floor);
    f.eig_index = eig_index;
    return f;
}

} // namespace hpvem
