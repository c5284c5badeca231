#include "app/cli.hpp"

#include "app/report.hpp"
#include "conekernel/error.hpp"
#include "conekernel/exponents.hpp"
#include "conekernel/kernel_mc.hpp"
#include "conekernel/parallel.hpp"
#include "conekernel/simd.hpp"
#include "conekernel/specfun.hpp"
#include "conekernel/verify.hpp"
#include "conekernel/wedge_kernel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace conekernel::app {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outputs {
    json results = json::object();
    json diagnostics = json::object();
    std::vector<std::pair<std::string, std::string>> files;
};

double number(const json& p, const char* key) { return p.at(key).get<double>(); }

std::int64_t integer(const json& p, const char* key) { return p.at(key).get<std::int64_t>(); }

Point2 point(const json& p, const char* key) {
    const auto& v = p.at(key);
    return {v[0].get<double>(), v[1].get<double>()};
}

Sym2 sym(const json& p, const char* key) {
    const auto& v = p.at(key);
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

SpdMatrix2 matrix(const json& p) { return SpdMatrix2(sym(p, "matrix")); }

bool is_identity(const SpdMatrix2& a) { return a.a() == 1.0 && a.b() == 0.0 && a.c() == 1.0; }

json exponent_json(const ExponentResult& r) {
    return {{"value", r.value}, {"kind", std::string(to_string(r.kind))}, {"formula", std::string(to_string(r.formula))}};
}

json cell_json(const PolarCell& c) {
    return {{"r_lo", c.r_lo}, {"r_hi", c.r_hi}, {"theta_lo", c.theta_lo}, {"theta_hi", c.theta_hi}};
}

json fit_json(const FitReport& f) {
    return {{"slope", f.slope},           {"intercept", f.intercept},   {"r_squared", f.r_squared},
            {"slope_stderr", f.slope_stderr}, {"window", {f.window_min, f.window_max}}, {"n_points", f.n_points}};
}

void require_positive_count(std::int64_t v, const char* name) {
    if (v < 1) throw InputError("BAD_ARGUMENT", std::string(name) + " must be at least 1");
}

TimeCoefficients coefficients(const json& p) {
    const Sym2 base = sym(p, "matrix");
    const Sym2 amp = sym(p, "amplitude");
    if (amp.a == 0.0 && amp.b == 0.0 && amp.c == 0.0) return TimeCoefficients::constant(SpdMatrix2(base));
    return TimeCoefficients::sinusoidal(base, amp, number(p, "frequency"));
}

KernelSampler constant_sampler(const SpdMatrix2& a, const Wedge2D& domain) {
    if (is_identity(a)) {
        return [domain](double tau, Point2 x, Point2 y) { return heat_kernel_wedge(domain, tau, x, y); };
    }
    return [a, domain](double tau, Point2 x, Point2 y) { return transformed_kernel(a, domain, tau, x, y); };
}

Outputs cmd_exponents(const json& p) {
    const SpdMatrix2 a = matrix(p);
    const double kappa = number(p, "kappa");
    const double alpha = number(p, "alpha");
    const Wedge2D domain(kappa, alpha);
    const SymEigen2 eig = eigen_decompose(a.sym());
    const double nu1 = p.contains("nu1") ? number(p, "nu1") : eig.lambda_min;
    const double nu2 = p.contains("nu2") ? number(p, "nu2") : eig.lambda_max;
    const ParabolicityBounds bounds(nu1, nu2);
    const double nu = p.contains("nu") ? number(p, "nu") : std::min(nu1, 1.0 / nu2);
    const EigenvalueResult arc = first_dirichlet_eigenvalue_arc(kappa);

    Outputs out;
    const ExponentResult lc = lambda_c_constant(a, domain.kappa(), domain.alpha());
    out.results["kappa_tilde"] = kappa_tilde_closed_form(a, domain.kappa(), domain.alpha());
    out.results["lambda_c"] = lc.value;
    out.results["lambda_c_kind"] = std::string(to_string(lc.kind));
    out.results["lambda_c_formula"] = std::string(to_string(lc.formula));
    out.results["lambda_c_laplacian"] = exponent_json(lambda_c_heat_2d(kappa));
    out.results["Lambda_arc"] = arc.Lambda;
    out.results["parabolicity"] = {{"nu1", bounds.nu1}, {"nu2", bounds.nu2}, {"nu", nu}};
    json lower = json::object();
    lower["improved"] = exponent_json(lambda_lb_improved(bounds, arc.Lambda, 2));
    lower["previous"] = exponent_json(lambda_lb_previous(nu, arc.Lambda, 2));
    lower["gap"] = bound_gap(bounds, nu, arc.Lambda, 2);
    out.results["lower_bounds"] = lower;
    return out;
}

Outputs cmd_kappa_tilde(const json& p) {
    const SpdMatrix2 a = matrix(p);
    const Wedge2D domain(number(p, "kappa"), number(p, "alpha"));
    const double cf = kappa_tilde_closed_form(a, domain.kappa(), domain.alpha());
    const double qd = kappa_tilde_quadrature(a, domain.kappa(), domain.alpha());
    const double geo = kappa_tilde_geometric(a, domain.kappa(), domain.alpha());
    Outputs out;
    out.results["closed_form"] = cf;
    out.results["quadrature"] = qd;
    out.results["geometric"] = geo;
    out.results["max_discrepancy"] = std::max(std::abs(cf - qd), std::abs(cf - geo));
    out.results["lambda_c"] = kPi / cf;
    return out;
}

Outputs cmd_eigenvalue_cap(const json& p) {
    const SphericalCap3D cap(number(p, "kappa"));
    const EigenvalueResult r = first_dirichlet_eigenvalue_cap(cap.kappa());
    Outputs out;
    out.results["Lambda"] = r.Lambda;
    out.results["degree"] = r.degree;
    out.results["bracket"] = {r.lower, r.upper};
    out.results["inside_bracket"] = r.lower <= r.Lambda && r.Lambda <= r.upper;
    out.results["lambda_c"] = exponent_json(lambda_c_laplacian_general(r.Lambda, 3));
    out.diagnostics["j0"] = specfun::bessel_j0_first_zero();
    return out;
}

Outputs cmd_kernel_exact(const json& p) {
    const SpdMatrix2 a = matrix(p);
    const Wedge2D domain(number(p, "kappa"), number(p, "alpha"));
    const double tau = number(p, "tau");
    if (!(tau > 0.0)) throw InputError("BAD_TIME", "tau must be positive");
    const Point2 y = point(p, "y");
    if (!contains(domain, y)) throw InputError("OUTSIDE_DOMAIN", "y lies outside the wedge");
    const std::int64_t nr = integer(p, "n_radial");
    const std::int64_t na = integer(p, "n_angular");
    require_positive_count(nr, "n_radial");
    require_positive_count(na, "n_angular");
    const double r_max = p.contains("r_max") ? number(p, "r_max") : norm(y) + 6.0 * std::sqrt(tau);
    if (!(r_max > 0.0)) throw InputError("BAD_GRID", "r_max must be positive");

    const TransformedWedge tw = transform_wedge(a, domain);
    const KernelSampler sampler = constant_sampler(a, domain);
    Outputs out;
    out.results["kappa_tilde"] = tw.image.kappa();
    out.results["lambda_c"] = kPi / tw.image.kappa();
    out.results["mass"] = kernel_mass(tw.image, tau, tw.map(y));
    if (p.contains("x")) {
        const Point2 x = point(p, "x");
        if (!contains(domain, x)) throw InputError("OUTSIDE_DOMAIN", "x lies outside the wedge");
        out.results["value_at_x"] = sampler(tau, x, y);
    }
    CsvTable table({"i_r", "i_theta", "r", "theta", "x1", "x2", "G"});
    for (std::int64_t i = 0; i < nr; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * r_max / static_cast<double>(nr);
        for (std::int64_t j = 0; j < na; ++j) {
            const double theta = (static_cast<double>(j) + 0.5) * domain.kappa() / static_cast<double>(na);
            const Point2 x = domain.point_at(r, theta);
            table.row().add(static_cast<long long>(i)).add(static_cast<long long>(j)).add(r).add(theta);
            table.add(x.x1).add(x.x2).add(sampler(tau, x, y));
        }
    }
    out.files.emplace_back("kernel.csv", table.str());
    out.diagnostics["series_rel_tol"] = SeriesControl{}.rel_tol;
    out.diagnostics["grid"] = {{"r_max", r_max}, {"n_radial", nr}, {"n_angular", na}};
    return out;
}

Outputs cmd_kernel_mc(const json& p, const RunOptions& opt, std::uint64_t seed) {
    const Wedge2D domain(number(p, "kappa"), number(p, "alpha"));
    const TimeCoefficients coeffs = coefficients(p);
    const double s = number(p, "s");
    const double t = number(p, "t");
    if (!(t > s)) throw InputError("BAD_TIME", "need t > s");
    const Point2 y = point(p, "y");
    const std::int64_t nr = integer(p, "n_radial");
    const std::int64_t na = integer(p, "n_angular");
    require_positive_count(nr, "n_radial");
    require_positive_count(na, "n_angular");
    require_positive_count(integer(p, "n_paths"), "n_paths");
    const double r_max = p.contains("r_max") ? number(p, "r_max") : norm(y) + 4.0 * std::sqrt(t - s);

    McConfig cfg;
    cfg.n_paths = static_cast<std::uint64_t>(integer(p, "n_paths"));
    cfg.dt = number(p, "dt");
    cfg.seed = seed;
    cfg.bridge_correction = p.at("bridge").get<bool>();
    cfg.threads = opt.threads;
    cfg.binning = PolarGrid::uniform(number(p, "r_min"), r_max, static_cast<int>(nr), 0.0, domain.kappa(),
                                     static_cast<int>(na));
    const DensityEstimate est = simulate_killed_density(coeffs, domain, s, y, t, cfg);

    const Sym2 amp = sym(p, "amplitude");
    const bool constant = amp.a == 0.0 && amp.b == 0.0 && amp.c == 0.0;
    const SpdMatrix2 a(sym(p, "matrix"));
    std::size_t checked = 0;
    std::size_t within = 0;
    CsvTable table({"i_r", "i_theta", "r_lo", "r_hi", "theta_lo", "theta_hi", "centroid_x1", "centroid_x2", "count",
                    "value", "stderr", "exact"});
    for (std::size_t i = 0; i < est.n_radial; ++i) {
        for (std::size_t j = 0; j < est.n_angular; ++j) {
            const DensityCell& c = est.at(i, j);
            table.row().add(static_cast<long long>(i)).add(static_cast<long long>(j));
            table.add(c.cell.r_lo).add(c.cell.r_hi).add(c.cell.theta_lo).add(c.cell.theta_hi);
            table.add(c.centroid.x1).add(c.centroid.x2).add(static_cast<unsigned long long>(c.count));
            table.add(c.value).add(c.std_error);
            if (constant && c.cell.r_lo > 0.0) {
                const double exact = transformed_cell_average(a, domain, t - s, y, c.cell);
                table.add(exact);
                if (c.count >= 50) {
                    ++checked;
                    if (std::abs(c.value - exact) <= 3.0 * c.std_error) ++within;
                }
            } else {
                table.add_empty();
            }
        }
    }
    Outputs out;
    out.results["survivors"] = est.survivors;
    out.results["total"] = est.total;
    out.results["survival_fraction"] = static_cast<double>(est.survivors) / static_cast<double>(est.total);
    if (constant) {
        out.results["comparison"] = {{"cells_checked", checked},
                                     {"within_3_stderr", within},
                                     {"fraction_within", checked ? static_cast<double>(within) / checked : 0.0}};
    }
    out.files.emplace_back("density.csv", table.str());
    out.diagnostics["steps"] = est.steps;
    out.diagnostics["dt_used"] = est.dt;
    out.diagnostics["nu1"] = coeffs.nu1();
    out.diagnostics["nu2"] = coeffs.nu2();
    return out;
}

Outputs cmd_verify_bound(const json& p) {
    const SpdMatrix2 a = matrix(p);
    const Wedge2D domain(number(p, "kappa"), number(p, "alpha"));
    const double tau = number(p, "tau");
    if (!(tau > 0.0)) throw InputError("BAD_TIME", "tau must be positive");
    const std::int64_t levels = integer(p, "levels");
    require_positive_count(levels, "levels");
    const double kt = kappa_tilde_closed_form(a, domain.kappa(), domain.alpha());
    const double lc = kPi / kt;
    const double sigma = number(p, "sigma");
    const BoundSpec sub = BoundSpec::two_weight(number(p, "lambda_plus_factor") * lc,
                                                number(p, "lambda_minus_factor") * lc, sigma);
    const BoundSpec super = BoundSpec::two_weight(number(p, "supercritical_factor") * lc,
                                                  number(p, "lambda_minus_factor") * lc, sigma);
    const RefinementGrid base{number(p, "vertex_min"), number(p, "boundary_min")};
    const double decay = number(p, "decay");
    const KernelSampler sampler = constant_sampler(a, domain);

    const auto sub_levels = refinement_study(sampler, domain, tau, sub, lc, static_cast<int>(levels), decay, base);
    const auto super_levels = refinement_study(sampler, domain, tau, super, lc, static_cast<int>(levels), decay, base);

    Outputs out;
    out.results["kappa_tilde"] = kt;
    out.results["lambda_c"] = lc;
    CsvTable refinement({"level", "vertex_min", "boundary_min", "feasible_N_subcritical", "feasible_N_supercritical",
                         "n_evaluated", "n_excluded"});
    json sub_n = json::array(), super_n = json::array(), sub_growth = json::array(), super_growth = json::array();
    bool doubling = levels >= 2;
    for (std::size_t l = 0; l < sub_levels.size(); ++l) {
        const auto& a_l = sub_levels[l];
        const auto& b_l = super_levels[l];
        sub_n.push_back(a_l.report.feasible_N);
        super_n.push_back(b_l.report.feasible_N);
        if (l > 0) {
            sub_growth.push_back(a_l.report.feasible_N / sub_levels[l - 1].report.feasible_N);
            const double g = b_l.report.feasible_N / super_levels[l - 1].report.feasible_N;
            super_growth.push_back(g);
            doubling = doubling && g >= 2.0;
        }
        refinement.row().add(static_cast<long long>(l)).add(a_l.grid.vertex_min).add(a_l.grid.boundary_min);
        refinement.add(a_l.report.feasible_N).add(b_l.report.feasible_N);
        refinement.add(static_cast<unsigned long long>(a_l.report.n_evaluated));
        refinement.add(static_cast<unsigned long long>(a_l.report.n_excluded));
    }
    json subj = {{"lambda_plus", sub.lambda_plus}, {"lambda_minus", sub.lambda_minus}, {"feasible_N", sub_n},
                 {"growth", sub_growth}};
    if (sub_levels.size() >= 2) subj["stable"] = sub_levels[1].report.feasible_N < 2.0 * sub_levels[0].report.feasible_N;
    out.results["subcritical"] = subj;
    out.results["supercritical"] = {{"lambda_plus", super.lambda_plus}, {"lambda_minus", super.lambda_minus},
                                    {"feasible_N", super_n}, {"growth", super_growth}, {"doubling", doubling}};

    // Envelope ordering on the coarsest grid.
    std::size_t violations = 0;
    const auto samples = refinement_samples(sampler, domain, tau, base);
    for (const auto& smp : samples) {
        if (bound_rhs(sub, domain, smp.tau, smp.x, smp.y) > less_rough_rhs(sub, domain, smp.tau, smp.x, smp.y)) {
            ++violations;
        }
    }
    out.results["envelope_ordering"] = {{"samples", samples.size()}, {"violations", violations}};

    const double sq = std::sqrt(tau);
    const Point2 y_far = domain.point_at(4.0 * sq, 0.5 * domain.kappa());
    const FitReport vfit = fit_vertex_exponent(sampler, domain, tau, y_far);
    const FitReport bfit = fit_boundary_exponent(sampler, domain, tau, y_far, 4.0 * sq);
    std::vector<KernelSample> gauss;
    const Point2 y_deep = domain.point_at(20.0 * sq, 0.5 * domain.kappa());
    for (int i = 0; i < 16; ++i) {
        const Point2 x = domain.point_at((20.0 + 0.25 * (i + 1)) * sq, 0.5 * domain.kappa());
        gauss.push_back({tau, x, y_deep, sampler(tau, x, y_deep)});
    }
    const FitReport gfit = fit_gaussian_sigma(gauss, domain);
    out.results["vertex_fit"] = fit_json(vfit);
    out.results["boundary_fit"] = fit_json(bfit);
    out.results["gaussian_fit"] = fit_json(gfit);

    CsvTable points({"fit", "abscissa", "ordinate"});
    const std::pair<const char*, const FitReport*> fits[] = {{"vertex", &vfit}, {"boundary", &bfit}, {"gaussian", &gfit}};
    for (const auto& [name, f] : fits) {
        for (std::size_t i = 0; i < f->n_points; ++i) points.row().add(name).add(f->abscissa[i]).add(f->ordinate[i]);
    }
    out.files.emplace_back("refinement.csv", refinement.str());
    out.files.emplace_back("fit_points.csv", points.str());
    out.diagnostics["decay_per_level"] = decay;
    out.diagnostics["floor_rel"] = 1e-14;
    return out;
}

Outputs cmd_duality(const json& p, const RunOptions& opt, std::uint64_t seed) {
    const Wedge2D domain(number(p, "kappa"), number(p, "alpha"));
    const TimeCoefficients coeffs = coefficients(p);
    const Point2 x = point(p, "x");
    const Point2 y = point(p, "y");
    if (!contains(domain, x) || !contains(domain, y)) throw InputError("OUTSIDE_DOMAIN", "x and y must lie inside the wedge");
    require_positive_count(integer(p, "n_paths"), "n_paths");
    const PolarCell x_cell =
        PolarCell::centered_at(norm(x), domain.edge_angle(x), number(p, "cell_dr"), number(p, "cell_dtheta"));
    McConfig cfg;
    cfg.n_paths = static_cast<std::uint64_t>(integer(p, "n_paths"));
    cfg.dt = number(p, "dt");
    cfg.seed = seed;
    cfg.bridge_correction = p.at("bridge").get<bool>();
    cfg.threads = opt.threads;
    const DualityReport rep = duality_report(coeffs, domain, number(p, "s"), number(p, "t"), x_cell, y, cfg);
    Outputs out;
    out.results["forward"] = rep.forward;
    out.results["forward_stderr"] = rep.forward_stderr;
    out.results["forward_count"] = rep.forward_count;
    out.results["reverse"] = rep.reverse;
    out.results["reverse_stderr"] = rep.reverse_stderr;
    out.results["reverse_count"] = rep.reverse_count;
    out.results["z"] = rep.z;
    out.results["x_cell"] = cell_json(rep.x_cell);
    out.results["y_cell"] = cell_json(rep.y_cell);
    out.results["reverse_start"] = {rep.x_start.x1, rep.x_start.x2};
    return out;
}

json error_object(const RunConfig& config, std::string_view kind, const std::string& code, const std::string& msg) {
    json e = json::object();
    e["schema_version"] = kSchemaVersion;
    e["command"] = config.command;
    e["error"] = {{"kind", std::string(kind)}, {"code", code}, {"message", msg}};
    return e;
}

} // namespace

std::string RunResult::report_text() const { return report.dump(2) + "\n"; }

RunResult run(const RunConfig& config, const RunOptions& options) {
    RunResult result;
    try {
        const CommandSpec* spec = find_command(config.command);
        if (!spec) throw InputError("UNKNOWN_COMMAND", "unknown command '" + config.command + "'");
        RunConfig resolved = config;
        resolved.parameters = resolve_parameters(*spec, config.parameters);
        const json& p = resolved.parameters;
        Outputs out;
        if (config.command == "exponents") {
            out = cmd_exponents(p);
        } else if (config.command == "kappa-tilde") {
            out = cmd_kappa_tilde(p);
        } else if (config.command == "eigenvalue-cap") {
            out = cmd_eigenvalue_cap(p);
        } else if (config.command == "kernel-exact") {
            out = cmd_kernel_exact(p);
        } else if (config.command == "kernel-mc") {
            out = cmd_kernel_mc(p, options, config.seed);
        } else if (config.command == "verify-bound") {
            out = cmd_verify_bound(p);
        } else {
            out = cmd_duality(p, options, config.seed);
        }
        result.report = json::object();
        result.report["schema_version"] = kSchemaVersion;
        result.report["command"] = config.command;
        result.report["config"] = config_to_json(resolved);
        result.report["results"] = std::move(out.results);
        result.report["diagnostics"] = std::move(out.diagnostics);
        result.files = std::move(out.files);
    } catch (const InputError& e) {
        result.exit_code = 1;
        result.report = error_object(config, "validation", e.code(), e.what());
        result.files.clear();
    } catch (const NumericalError& e) {
        result.exit_code = 2;
        result.report = error_object(config, "numerical", e.code(), e.what());
        result.files.clear();
    }
    return result;
}

void write_outputs(const RunResult& result, const std::string& output_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(output_dir);
    fs::create_directories(dir);
    auto write = [&dir](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f << text;
    };
    write(result.exit_code == 0 ? "report.json" : "error.json", result.report_text());
    for (const auto& [name, text] : result.files) write(name, text);
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Critical exponents, wedge heat kernels and Gaussian-bound checks"};
    app.require_subcommand(1);

    struct Common {
        std::string config_file;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> output_dir;
        int threads = 0;
        std::string simd;
        bool metadata = false;
    };
    std::map<std::string, Common> common;
    std::map<std::string, std::map<std::string, std::string>> raw;
    for (const auto& cmd : command_table()) {
        const std::string name(cmd.name);
        CLI::App* sub = app.add_subcommand(name, std::string(cmd.summary));
        Common& c = common[name];
        sub->add_option("--config", c.config_file, "JSON run configuration; flags override its values");
        sub->add_option("--seed", c.seed, "random seed");
        sub->add_option("--output-dir", c.output_dir, "directory for report.json and CSV tables");
        sub->add_option("--threads", c.threads, "worker threads (0: all cores; never changes results)");
        sub->add_option("--simd", c.simd, "kernel tier: scalar or avx2 (never changes results)");
        sub->add_flag("--metadata", c.metadata, "also write metadata.json with timing and thread count");
        for (const auto& param : cmd.params) {
            sub->add_option(flag_name(param.name), raw[name][std::string(param.name)], std::string(param.help));
        }
    }

    RunConfig config;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << error_object(config, "validation", "BAD_ARGUMENT", e.what()).dump(2) << "\n";
        return 1;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    const Common& c = common[name];
    const CommandSpec& spec = *find_command(name);
    try {
        if (!c.config_file.empty()) {
            std::ifstream in(c.config_file);
            if (!in) throw InputError("BAD_CONFIG", "cannot read " + c.config_file);
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error& e) {
                throw InputError("BAD_CONFIG", e.what());
            }
            config = config_from_json(doc);
            if (!config.command.empty() && config.command != name) {
                throw InputError("BAD_CONFIG", "configuration is for command '" + config.command + "'");
            }
        }
        config.command = name;
        for (const auto& param : spec.params) {
            const CLI::Option* opt = chosen->get_option(flag_name(param.name));
            if (opt->count() > 0) {
                config.parameters[std::string(param.name)] =
                    parse_flag_value(param, raw[name][std::string(param.name)]);
            }
        }
        if (c.seed) config.seed = *c.seed;
        if (c.output_dir) config.output_dir = *c.output_dir;
        if (!c.simd.empty()) {
            const auto level = simd::parse_level(c.simd);
            if (!level) throw InputError("BAD_ARGUMENT", "--simd must be scalar or avx2");
            simd::force_level(level);
        }
    } catch (const InputError& e) {
        std::cout << error_object(config, "validation", e.code(), e.what()).dump(2) << "\n";
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run(config, RunOptions{c.threads});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << result.report_text();
    if (!config.output_dir.empty()) {
        try {
            write_outputs(result, config.output_dir);
            if (c.metadata) {
                const json meta = {{"wall_seconds", seconds},
                                   {"threads", resolve_thread_count(c.threads)},
                                   {"simd", std::string(simd::to_string(simd::active_level()))}};
                std::ofstream(std::filesystem::path(config.output_dir) / "metadata.json") << meta.dump(2) << "\n";
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return result.exit_code;
}

} // namespace conekernel::app
