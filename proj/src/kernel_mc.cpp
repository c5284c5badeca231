#include "conekernel/kernel_mc.hpp"

#include "conekernel/error.hpp"
#include "conekernel/parallel.hpp"
#include "conekernel/rng.hpp"
#include "conekernel/simd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace conekernel {

namespace {

constexpr std::size_t kBlockPaths = 4096;
constexpr int kSubsteps = 4;
// Bridge exponents above this give crossing probabilities below e^{-40}.
constexpr double kBridgeCutoff = 40.0;

std::vector<double> default_check_times() {
    std::vector<double> t(401);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = -20.0 + 0.1 * static_cast<double>(i);
    return t;
}

bool strictly_increasing(const std::vector<double>& v) {
    if (v.size() < 2) return false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return std::isfinite(v.front()) && std::isfinite(v.back());
}

void validate_grid(const PolarGrid& g, const Wedge2D& domain) {
    if (!strictly_increasing(g.radial_edges) || g.radial_edges.front() < 0.0) {
        throw InputError("BAD_GRID", "radial edges must be nonnegative and strictly increasing");
    }
    if (!strictly_increasing(g.angular_edges) || g.angular_edges.front() < 0.0 ||
        g.angular_edges.back() > domain.kappa()) {
        throw InputError("BAD_GRID", "angular edges must be strictly increasing within [0, kappa]");
    }
}

simd::StepParams make_step(const Wedge2D& domain, const Sym2& a, double dt) {
    const Sym2 two_a{2.0 * a.a, 2.0 * a.b, 2.0 * a.c};
    const Sym2 root = spd_sqrt(two_a);
    const double sdt = std::sqrt(dt);
    simd::StepParams p;
    p.s11 = root.a * sdt;
    p.s12 = root.b * sdt;
    p.s22 = root.c * sdt;
    const Point2 u_lo = unit_vector(domain.lower_edge_angle());
    const Point2 u_hi = unit_vector(domain.upper_edge_angle());
    const Point2 n_lo{-u_lo.x2, u_lo.x1};
    const Point2 n_hi{u_hi.x2, -u_hi.x1};
    p.n_lo1 = n_lo.x1;
    p.n_lo2 = n_lo.x2;
    p.n_hi1 = n_hi.x1;
    p.n_hi2 = n_hi.x2;
    p.u_lo1 = u_lo.x1;
    p.u_lo2 = u_lo.x2;
    p.u_hi1 = u_hi.x1;
    p.u_hi2 = u_hi.x2;
    p.inv_var_lo = 1.0 / (a.quadratic_form(n_lo) * dt);
    p.inv_var_hi = 1.0 / (a.quadratic_form(n_hi) * dt);
    if (domain.kappa() == std::numbers::pi) {
        p.mode = simd::WedgeMode::halfplane;
    } else {
        p.mode = domain.is_convex() ? simd::WedgeMode::convex : simd::WedgeMode::reflex;
    }
    return p;
}

struct Schedule {
    std::uint64_t steps = 0;
    double dt = 0.0;
    std::vector<simd::StepParams> main;
    std::vector<std::array<simd::StepParams, kSubsteps>> sub;
};

Schedule build_schedule(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, double t, double dt_max) {
    const double span = t - s;
    Schedule sch;
    sch.steps = static_cast<std::uint64_t>(std::ceil(span / dt_max * (1.0 - 1e-12)));
    if (sch.steps == 0) sch.steps = 1;
    if (sch.steps > 0xFFFFFFFFull) throw InputError("BAD_DT", "too many time steps");
    sch.dt = span / static_cast<double>(sch.steps);
    sch.main.reserve(sch.steps);
    sch.sub.reserve(sch.steps);
    const double h = sch.dt / kSubsteps;
    for (std::uint64_t k = 0; k < sch.steps; ++k) {
        const double tk = s + static_cast<double>(k) * sch.dt;
        coeffs.check(tk);
        sch.main.push_back(make_step(domain, coeffs.at(tk), sch.dt));
        std::array<simd::StepParams, kSubsteps> subs;
        for (int j = 0; j < kSubsteps; ++j) {
            const double tj = tk + static_cast<double>(j) * h;
            coeffs.check(tj);
            subs[static_cast<std::size_t>(j)] = make_step(domain, coeffs.at(tj), h);
        }
        sch.sub.push_back(subs);
    }
    return sch;
}

bool bridge_kills(rng::Key key, std::uint64_t path, std::uint32_t step, std::uint32_t substep, double e_lo,
                  double e_hi) {
    if (std::min(e_lo, e_hi) >= kBridgeCutoff) return false;
    const auto u = rng::uniform_pair(key, path, step, rng::make_tag(substep, rng::Purpose::bridge));
    return (e_lo < kBridgeCutoff && u[0] < std::exp(-e_lo)) || (e_hi < kBridgeCutoff && u[1] < std::exp(-e_hi));
}

// Locates v in edges; returns npos outside [front, back).
std::size_t bin_index(const std::vector<double>& edges, double v) {
    if (!(v >= edges.front()) || !(v < edges.back())) return static_cast<std::size_t>(-1);
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

struct BlockWorkspace {
    std::vector<std::uint64_t> id;
    std::vector<double> x1, x2, xi1, xi2, e_lo, e_hi;
    std::vector<std::uint8_t> alive;

    void resize(std::size_t n) {
        id.resize(n);
        x1.resize(n);
        x2.resize(n);
        xi1.resize(n);
        xi2.resize(n);
        e_lo.resize(n);
        e_hi.resize(n);
        alive.resize(n);
    }
};

} // namespace

TimeCoefficients::TimeCoefficients(Evaluator evaluator, double nu1, double nu2, std::span<const double> check_times)
    : evaluator_(std::move(evaluator)), nu1_(nu1), nu2_(nu2) {
    if (!evaluator_) throw InputError("BAD_COEFFICIENTS", "coefficient evaluator is empty");
    if (!(nu1 > 0.0) || !(nu2 >= nu1) || !std::isfinite(nu2)) {
        throw InputError("BAD_BOUNDS", "parabolicity bounds must satisfy 0 < nu1 <= nu2 < inf");
    }
    if (check_times.empty()) {
        for (double t : default_check_times()) check(t);
    } else {
        for (double t : check_times) check(t);
    }
}

TimeCoefficients TimeCoefficients::constant(const SpdMatrix2& a) {
    const SymEigen2 e = eigen_decompose(a.sym());
    const Sym2 m = a.sym();
    const double t0 = 0.0;
    return TimeCoefficients([m](double) { return m; }, e.lambda_min, e.lambda_max, std::span<const double>(&t0, 1));
}

TimeCoefficients TimeCoefficients::sinusoidal(const Sym2& base, const Sym2& amplitude, double frequency,
                                              double phase) {
    // lambda_min(B + sC) is concave and lambda_max convex in s, so the extremes over s in [-1, 1] sit at the ends.
    const Sym2 lo{base.a - amplitude.a, base.b - amplitude.b, base.c - amplitude.c};
    const Sym2 hi{base.a + amplitude.a, base.b + amplitude.b, base.c + amplitude.c};
    const SymEigen2 e_lo = eigen_decompose(lo);
    const SymEigen2 e_hi = eigen_decompose(hi);
    const double nu1 = std::min(e_lo.lambda_min, e_hi.lambda_min);
    const double nu2 = std::max(e_lo.lambda_max, e_hi.lambda_max);
    if (!(nu1 > 0.0)) throw InputError("NOT_SPD", "A(t) is not uniformly positive definite");
    if (!std::isfinite(frequency) || !std::isfinite(phase)) {
        throw InputError("BAD_COEFFICIENTS", "frequency and phase must be finite");
    }
    return TimeCoefficients(
        [base, amplitude, frequency, phase](double t) {
            const double w = std::sin(frequency * t + phase);
            return Sym2{base.a + w * amplitude.a, base.b + w * amplitude.b, base.c + w * amplitude.c};
        },
        nu1, nu2);
}

void TimeCoefficients::check(double t) const {
    const Sym2 m = evaluator_(t);
    if (!std::isfinite(m.a) || !std::isfinite(m.b) || !std::isfinite(m.c)) {
        throw InputError("PARABOLICITY", "A(t) is not finite at t = " + std::to_string(t));
    }
    const SymEigen2 e = eigen_decompose(m);
    const double slack = 1e-12 * nu2_;
    if (e.lambda_min < nu1_ - slack || e.lambda_max > nu2_ + slack) {
        throw InputError("PARABOLICITY", "eigenvalues of A(t) leave [nu1, nu2] at t = " + std::to_string(t));
    }
}

TimeCoefficients hat_coefficients(const TimeCoefficients& coeffs) {
    const double t0 = 0.0;
    return TimeCoefficients([coeffs](double t) { return coeffs.at(-t); }, coeffs.nu1(), coeffs.nu2(),
                            std::span<const double>(&t0, 1));
}

PolarGrid PolarGrid::uniform(double r_lo, double r_hi, int n_radial, double theta_lo, double theta_hi,
                             int n_angular) {
    if (n_radial < 1 || n_angular < 1) throw InputError("BAD_GRID", "grid needs at least one cell per axis");
    PolarGrid g;
    for (int i = 0; i <= n_radial; ++i) {
        g.radial_edges.push_back(r_lo + (r_hi - r_lo) * static_cast<double>(i) / n_radial);
    }
    for (int j = 0; j <= n_angular; ++j) {
        g.angular_edges.push_back(theta_lo + (theta_hi - theta_lo) * static_cast<double>(j) / n_angular);
    }
    g.radial_edges.back() = r_hi;
    g.angular_edges.back() = theta_hi;
    return g;
}

DensityEstimate simulate_killed_density(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, Point2 y,
                                        double t, const McConfig& cfg) {
    if (!(t > s) || !std::isfinite(t - s)) throw InputError("BAD_TIME", "need t > s");
    if (cfg.n_paths < 1) throw InputError("BAD_PATHS", "n_paths must be at least 1");
    if (!(cfg.dt > 0.0) || cfg.dt > (t - s) / 100.0 * (1.0 + 1e-12)) {
        throw InputError("BAD_DT", "dt must be positive and at most (t - s) / 100");
    }
    if (!contains(domain, y)) throw InputError("OUTSIDE_DOMAIN", "start point lies outside the wedge");
    validate_grid(cfg.binning, domain);

    const Schedule sch = build_schedule(coeffs, domain, s, t, cfg.dt);
    const rng::Key key = rng::key_from_seed(cfg.seed);
    const simd::Level level = simd::active_level();
    const double near_vertex2 = 16.0 * sch.dt;
    const std::size_t nr = cfg.binning.n_radial();
    const std::size_t na = cfg.binning.n_angular();
    const std::size_t n_cells = nr * na;
    const std::size_t n_blocks = static_cast<std::size_t>((cfg.n_paths + kBlockPaths - 1) / kBlockPaths);
    const int workers = resolve_thread_count(cfg.threads);

    std::vector<std::vector<std::uint64_t>> histograms(static_cast<std::size_t>(workers),
                                                       std::vector<std::uint64_t>(n_cells, 0));
    std::vector<std::uint64_t> survivors(static_cast<std::size_t>(workers), 0);

    parallel_for(n_blocks, workers, [&](std::size_t block, int worker) {
        const std::uint64_t first = static_cast<std::uint64_t>(block) * kBlockPaths;
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kBlockPaths, cfg.n_paths - first));
        BlockWorkspace ws;
        ws.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            ws.id[i] = first + i;
            ws.x1[i] = y.x1;
            ws.x2[i] = y.x2;
        }
        std::size_t n = count;
        for (std::uint64_t k = 0; k < sch.steps && n > 0; ++k) {
            const auto step = static_cast<std::uint32_t>(k);
            // Near-vertex lanes move to the tail and take substeps.
            std::size_t m = n;
            for (std::size_t i = 0; i < m;) {
                if (ws.x1[i] * ws.x1[i] + ws.x2[i] * ws.x2[i] < near_vertex2) {
                    --m;
                    std::swap(ws.id[i], ws.id[m]);
                    std::swap(ws.x1[i], ws.x1[m]);
                    std::swap(ws.x2[i], ws.x2[m]);
                } else {
                    ++i;
                }
            }
            if (m > 0) {
                simd::gaussian_pairs(key, std::span(ws.id.data(), m), step, rng::make_tag(0, rng::Purpose::normals),
                                     std::span(ws.xi1.data(), m), std::span(ws.xi2.data(), m), level);
                simd::advance_paths(sch.main[k], std::span(ws.x1.data(), m), std::span(ws.x2.data(), m),
                                    std::span<const double>(ws.xi1.data(), m),
                                    std::span<const double>(ws.xi2.data(), m), std::span(ws.alive.data(), m),
                                    std::span(ws.e_lo.data(), m), std::span(ws.e_hi.data(), m), level);
                if (cfg.bridge_correction) {
                    for (std::size_t i = 0; i < m; ++i) {
                        if (ws.alive[i] && bridge_kills(key, ws.id[i], step, 0, ws.e_lo[i], ws.e_hi[i])) {
                            ws.alive[i] = 0;
                        }
                    }
                }
            }
            for (std::size_t i = m; i < n; ++i) {
                ws.alive[i] = 1;
                for (int j = 0; j < kSubsteps && ws.alive[i]; ++j) {
                    const auto sub = static_cast<std::uint32_t>(j + 1);
                    simd::gaussian_pairs(key, std::span(&ws.id[i], 1), step, rng::make_tag(sub, rng::Purpose::normals),
                                         std::span(&ws.xi1[i], 1), std::span(&ws.xi2[i], 1), simd::Level::scalar);
                    simd::advance_paths(sch.sub[k][static_cast<std::size_t>(j)], std::span(&ws.x1[i], 1),
                                        std::span(&ws.x2[i], 1), std::span<const double>(&ws.xi1[i], 1),
                                        std::span<const double>(&ws.xi2[i], 1), std::span(&ws.alive[i], 1),
                                        std::span(&ws.e_lo[i], 1), std::span(&ws.e_hi[i], 1), simd::Level::scalar);
                    if (ws.alive[i] && cfg.bridge_correction &&
                        bridge_kills(key, ws.id[i], step, sub, ws.e_lo[i], ws.e_hi[i])) {
                        ws.alive[i] = 0;
                    }
                }
            }
            std::size_t kept = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!ws.alive[i]) continue;
                ws.id[kept] = ws.id[i];
                ws.x1[kept] = ws.x1[i];
                ws.x2[kept] = ws.x2[i];
                ++kept;
            }
            n = kept;
        }
        auto& hist = histograms[static_cast<std::size_t>(worker)];
        survivors[static_cast<std::size_t>(worker)] += n;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p{ws.x1[i], ws.x2[i]};
            const std::size_t ir = bin_index(cfg.binning.radial_edges, norm(p));
            const std::size_t ia = bin_index(cfg.binning.angular_edges, domain.edge_angle(p));
            if (ir < nr && ia < na) ++hist[ir * na + ia];
        }
    });

    DensityEstimate est;
    est.n_radial = nr;
    est.n_angular = na;
    est.total = cfg.n_paths;
    est.steps = sch.steps;
    est.dt = sch.dt;
    for (auto v : survivors) est.survivors += v;
    const double n_total = static_cast<double>(cfg.n_paths);
    est.cells.reserve(n_cells);
    for (std::size_t ir = 0; ir < nr; ++ir) {
        for (std::size_t ia = 0; ia < na; ++ia) {
            DensityCell c;
            c.cell = {cfg.binning.radial_edges[ir], cfg.binning.radial_edges[ir + 1], cfg.binning.angular_edges[ia],
                      cfg.binning.angular_edges[ia + 1]};
            c.area = c.cell.area();
            c.centroid = domain.point_at(c.cell.centroid_radius(), c.cell.centroid_angle());
            for (const auto& h : histograms) c.count += h[ir * na + ia];
            const double p = static_cast<double>(c.count) / n_total;
            c.value = p / c.area;
            c.std_error = std::sqrt(p * (1.0 - p) / n_total) / c.area;
            est.cells.push_back(c);
        }
    }
    return est;
}

DualityReport duality_report(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, double t,
                             const PolarCell& x_cell, Point2 y, const McConfig& cfg) {
    if (!contains(domain, y)) throw InputError("OUTSIDE_DOMAIN", "y lies outside the wedge");
    DualityReport rep;
    rep.x_cell = x_cell;
    rep.y_cell = PolarCell::centered_at(norm(y), domain.edge_angle(y), x_cell.r_hi - x_cell.r_lo,
                                        x_cell.theta_hi - x_cell.theta_lo);
    rep.x_start = domain.point_at(x_cell.centroid_radius(), x_cell.centroid_angle());

    McConfig fwd = cfg;
    fwd.binning = {{x_cell.r_lo, x_cell.r_hi}, {x_cell.theta_lo, x_cell.theta_hi}};
    const DensityEstimate f = simulate_killed_density(coeffs, domain, s, y, t, fwd);

    McConfig rev = cfg;
    rev.binning = {{rep.y_cell.r_lo, rep.y_cell.r_hi}, {rep.y_cell.theta_lo, rep.y_cell.theta_hi}};
    const DensityEstimate r = simulate_killed_density(hat_coefficients(coeffs), domain, -t, rep.x_start, -s, rev);

    rep.forward = f.cells[0].value;
    rep.forward_stderr = f.cells[0].std_error;
    rep.forward_count = f.cells[0].count;
    rep.reverse = r.cells[0].value;
    rep.reverse_stderr = r.cells[0].std_error;
    rep.reverse_count = r.cells[0].count;
    const double pooled = std::hypot(rep.forward_stderr, rep.reverse_stderr);
    if (!(pooled > 0.0)) throw NumericalError("EMPTY_CELLS", "both duality cells are empty");
    rep.z = (rep.forward - rep.reverse) / pooled;
    return rep;
}

double duality_residual(const TimeCoefficients& coeffs, const Wedge2D& domain, double s, double t,
                        const PolarCell& x_cell, Point2 y, const McConfig& cfg) {
    return duality_report(coeffs, domain, s, t, x_cell, y, cfg).z;
}

} // namespace conekernel
