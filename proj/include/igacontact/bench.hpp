#pragma once

/**
 * @file bench.hpp
 * @brief Benchmark drivers: model builders for the patch test, two-blocks,
 *        Hertz and ironing experiments, analytical references, error metrics
 *        and CSV/field-file emission.
 */

#include <igacontact/solver.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace iga {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct BenchmarkConfig {
    std::string benchmark = "patch";
    Formulation formulation = Formulation::CCS;
    std::string out_dir;
    std::map<std::string, double> p;

    double get(const std::string& key) const {
        auto it = p.find(key);
        if (it == p.end()) throw ConfigError("missing config parameter: " + key);
        return it->second;
    }
    int geti(const std::string& key) const { return int(std::llround(get(key))); }
    void set(const std::string& key, double v) { p[key] = v; }
};

/// Defaults mirror the reported simulation setups of the four experiments.
inline BenchmarkConfig default_config(const std::string& benchmark) {
    BenchmarkConfig c;
    c.benchmark = benchmark;
    if (benchmark == "patch") {
        c.p = {{"ncp", 30},         {"degree", 2},      {"penalty", 100}, {"mu", 0.5},
               {"lambda", 1.0},     {"pressure", 0.01}, {"steps", 10},
               {"grade_beta", 1.3}, {"width", 1.0},     {"height", 1.0},
               {"reparam_upper", 0.6}, {"reparam_lower", -0.45}};
    } else if (benchmark == "blocks") {
        c.p = {{"ncp_u", 10}, {"ncp_v", 15}, {"degree", 2},   {"penalty", 1500},
               {"mu", 0.5},   {"lambda", 0.5}, {"vbar", 0.2}, {"steps", 20},
               {"width", 1.0}, {"height", 1.0}};
    } else if (benchmark == "hertz") {
        c.p = {{"nelem", 50},     {"degree", 3},  {"penalty", 1000}, {"E", 1.0},
               {"nu", 0.3},       {"pressure", 0.001}, {"radius", 1.0},
               {"inner_frac", 0.01}, {"steps", 1}, {"grade_frac_elems", 0.8},
               {"grade_frac_len", 0.1}};
    } else if (benchmark == "ironing") {
        c.p = {{"nelem_u", 80},  {"nelem_v", 20}, {"degree", 3},    {"penalty", 100},
               {"E_cyl", 3.0},   {"E_slab", 1.0}, {"nu", 0.3},      {"radius", 1.0},
               {"inner_frac", 0.01}, {"slab_length", 4.0}, {"slab_height", 1.0},
               {"cyl_x", 1.0},   {"depth", 0.3},  {"travel", 1.0},  {"vert_steps", 30},
               {"horiz_steps", 270}};
    } else {
        throw ConfigError("unknown benchmark: " + benchmark);
    }
    return c;
}

/// Plain key = value lines; '#' starts a comment. Knows the string-valued keys
/// benchmark, formulation and out.
inline void apply_config_line(BenchmarkConfig& cfg, const std::string& key,
                              const std::string& value) {
    if (key == "benchmark") {
        BenchmarkConfig fresh = default_config(value);
        fresh.formulation = cfg.formulation;
        fresh.out_dir = cfg.out_dir;
        for (const auto& [k, v] : cfg.p)
            if (fresh.p.count(k)) fresh.p[k] = v;
        cfg = fresh;
    } else if (key == "formulation") {
        cfg.formulation = parse_formulation(value);
    } else if (key == "out") {
        cfg.out_dir = value;
    } else {
        try {
            cfg.p[key] = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("config: cannot parse value for '" + key + "'");
        }
    }
}

inline void load_config_file(BenchmarkConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            auto e = s.find_last_not_of(" \t\r");
            s.erase(e == std::string::npos ? 0 : e + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_config_line(cfg, key, value);
    }
}

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

struct BuiltBench {
    Model model;
    std::vector<double> schedule;
    ReactionSpec reaction;
    SolveConfig solve_cfg;
};

/// Contact patch test: two equal blocks with non-conforming interface meshes,
/// pressed together by a uniform pressure; the exact solution is a uniform
/// stress state. Non-conformity comes from a power-graded upper mesh and from
/// distinct curvilinear edge parametrizations of the two bodies (the geometry
/// stays an exact rectangle; only the boundary measure becomes non-affine).
/// Linear elasticity.
inline BuiltBench build_patch(const BenchmarkConfig& cfg) {
    const int ncp = cfg.geti("ncp");
    const int p = cfg.geti("degree");
    const double pbar = cfg.get("pressure");
    const double w = cfg.get("width");
    const double h = cfg.get("height");
    const int nel = ncp - p;

    Material mat = Material::linear_elastic(cfg.get("lambda"), cfg.get("mu"));

    Body foundation;
    foundation.patch = make_rectangle(KnotVector::open_uniform(p, ncp),
                                      KnotVector::open_uniform(p, ncp), 0.0, 0.0, w, h,
                                      bump_reparam(cfg.get("reparam_lower"), 0.4));
    foundation.material = mat;
    foundation.side(Side::South).set_dirichlet_const(1, 0.0);
    foundation.side(Side::West).set_dirichlet_const(0, 0.0);
    foundation.side(Side::North).contact = true;

    Body punch;
    KnotVector ku = KnotVector::open_with_breaks(p, power_breaks(nel, cfg.get("grade_beta")),
                                                 0.0, 1.0);
    punch.patch = make_rectangle(ku, KnotVector::open_uniform(p, ncp), 0.0, h, w, h,
                                 bump_reparam(cfg.get("reparam_upper"), 0.5));
    punch.material = mat;
    punch.side(Side::South).contact = true;
    punch.side(Side::West).set_dirichlet_const(0, 0.0);
    punch.side(Side::North).traction = [pbar](const Vec2&, double s) {
        return Vec2(0.0, -pbar * s);
    };

    BuiltBench out;
    out.model.bodies = {foundation, punch};
    ContactPairSpec pair;
    pair.a = ContactSurfaceRef::deformable(1, Side::South);  // punch is the slave
    pair.b = ContactSurfaceRef::deformable(0, Side::North);
    pair.penalty = cfg.get("penalty");
    out.model.contacts = {pair};
    out.schedule = uniform_schedule(cfg.geti("steps"));
    out.reaction.boundaries = {{0, Side::South}};
    out.solve_cfg.newton_rtol = 1e-10;
    out.solve_cfg.newton_atol = 1e-12;
    return out;
}

/// Two equal blocks pressed together by a prescribed vertical displacement of
/// the upper edge. Linear elasticity despite the large prescribed motion.
inline BuiltBench build_blocks(const BenchmarkConfig& cfg) {
    const int p = cfg.geti("degree");
    const double w = cfg.get("width"), h = cfg.get("height");
    const double vbar = cfg.get("vbar");
    Material mat = Material::linear_elastic(cfg.get("lambda"), cfg.get("mu"));
    KnotVector ku = KnotVector::open_uniform(p, cfg.geti("ncp_u"));
    KnotVector kv = KnotVector::open_uniform(p, cfg.geti("ncp_v"));

    Body lower;
    lower.patch = make_rectangle(ku, kv, 0.0, 0.0, w, h);
    lower.material = mat;
    lower.side(Side::South).set_dirichlet_const(0, 0.0);
    lower.side(Side::South).set_dirichlet_const(1, 0.0);
    lower.side(Side::North).contact = true;

    Body upper;
    upper.patch = make_rectangle(ku, kv, 0.0, h, w, h);
    upper.material = mat;
    upper.side(Side::South).contact = true;
    upper.side(Side::North).set_dirichlet_const(0, 0.0);
    upper.side(Side::North).set_dirichlet_ramp(1, -vbar);

    BuiltBench out;
    out.model.bodies = {lower, upper};
    ContactPairSpec pair;
    pair.a = ContactSurfaceRef::deformable(1, Side::South);  // upper block is the slave
    pair.b = ContactSurfaceRef::deformable(0, Side::North);
    pair.penalty = cfg.get("penalty");
    out.model.contacts = {pair};
    out.schedule = uniform_schedule(cfg.geti("steps"));
    out.reaction.boundaries = {{1, Side::North}};
    out.solve_cfg.newton_rtol = 1e-10;
    out.solve_cfg.newton_atol = 1e-13;
    return out;
}

/// Hertz cylinder (annulus with a small inner radius) on a rigid plane; quarter
/// model with symmetry on the left edge and a distributed load on the top face.
/// The mesh is graded so most elements cluster near the contact zone.
inline BuiltBench build_hertz(const BenchmarkConfig& cfg) {
    const int nel = cfg.geti("nelem");
    const int p = cfg.geti("degree");
    const double R = cfg.get("radius");
    const double rin = cfg.get("inner_frac") * R;
    const double pbar = cfg.get("pressure");
    const double fe = cfg.get("grade_frac_elems");
    const double fl = cfg.get("grade_frac_len");

    Body cyl;
    cyl.patch = make_annulus(Vec2(0.0, R), rin, R, -M_PI / 2.0, 0.0, p, p + 1, 1);
    cyl.patch = cyl.patch.refine_knots(0, graded_breaks(nel, fe, fl, false));  // radial, fine outside
    cyl.patch = cyl.patch.refine_knots(1, graded_breaks(nel, fe, fl, true));   // angular, fine at bottom
    cyl.material = Material::from_young_poisson(Material::Kind::LinearElastic, cfg.get("E"),
                                                cfg.get("nu"));
    cyl.side(Side::South).set_dirichlet_const(0, 0.0);  // symmetry plane
    cyl.side(Side::North).traction = [pbar](const Vec2&, double s) {
        return Vec2(0.0, -pbar * s);
    };
    cyl.side(Side::East).contact = true;

    BuiltBench out;
    out.model.bodies = {cyl};
    ContactPairSpec pair;
    pair.a = ContactSurfaceRef::deformable(0, Side::East);  // cylinder is the slave
    pair.b = ContactSurfaceRef::rigid_line({Vec2(0.0, 0.0), Vec2(0.0, 1.0)});
    pair.penalty = cfg.get("penalty");
    out.model.contacts = {pair};
    out.schedule = uniform_schedule(cfg.geti("steps"));
    out.solve_cfg.newton_rtol = 1e-10;
    out.solve_cfg.newton_atol = 1e-13;
    return out;
}

/// Ironing: a neo-Hookean half-cylinder pressed into a neo-Hookean slab and
/// dragged across it. The slab is fixed at the bottom with periodic lateral
/// edges; the cylinder is driven through its two flat top faces.
inline BuiltBench build_ironing(const BenchmarkConfig& cfg) {
    const int neu = cfg.geti("nelem_u");
    const int nev = cfg.geti("nelem_v");
    const int p = cfg.geti("degree");
    const double R = cfg.get("radius");
    const double rin = cfg.get("inner_frac") * R;
    const double L = cfg.get("slab_length"), H = cfg.get("slab_height");
    const double cx = cfg.get("cyl_x");
    const double depth = cfg.get("depth");
    const double travel = cfg.get("travel");
    if (neu % 2 != 0) throw ConfigError("ironing: nelem_u must be even");

    Body slab;
    slab.patch = make_rectangle(KnotVector::open_uniform(p, neu + p),
                                KnotVector::open_uniform(p, nev + p), 0.0, 0.0, L, H);
    slab.material = Material::from_young_poisson(Material::Kind::NeoHookean, cfg.get("E_slab"),
                                                 cfg.get("nu"));
    slab.side(Side::South).set_dirichlet_const(0, 0.0);
    slab.side(Side::South).set_dirichlet_const(1, 0.0);
    slab.side(Side::North).contact = true;

    Body cyl;
    cyl.patch = make_annulus(Vec2(cx, H + R), rin, R, M_PI, 2.0 * M_PI, p, p + 1, 2);
    {
        std::vector<double> angular;
        for (int k = 1; k < neu; ++k)
            if (k * 2 != neu) angular.push_back(double(k) / neu);
        cyl.patch = cyl.patch.refine_knots(1, angular);
        std::vector<double> radial;
        for (int k = 1; k < nev; ++k) radial.push_back(double(k) / nev);
        cyl.patch = cyl.patch.refine_knots(0, radial);
    }
    cyl.material = Material::from_young_poisson(Material::Kind::NeoHookean, cfg.get("E_cyl"),
                                                cfg.get("nu"));
    auto drive_x = [travel](const Vec2&, double s) {
        return s <= 0.5 ? 0.0 : travel * (2.0 * s - 1.0);
    };
    auto drive_y = [depth](const Vec2&, double s) {
        return s <= 0.5 ? -depth * 2.0 * s : -depth;
    };
    for (Side s : {Side::South, Side::North}) {
        cyl.side(s).set_dirichlet(0, drive_x);
        cyl.side(s).set_dirichlet(1, drive_y);
    }
    cyl.side(Side::East).contact = true;

    BuiltBench out;
    out.model.bodies = {slab, cyl};
    out.model.periodic = {{0, Side::West, Side::East}};
    ContactPairSpec pair;
    pair.a = ContactSurfaceRef::deformable(1, Side::East);  // indenter is the slave
    pair.b = ContactSurfaceRef::deformable(0, Side::North);
    pair.penalty = cfg.get("penalty");
    out.model.contacts = {pair};

    const int nv = cfg.geti("vert_steps"), nh = cfg.geti("horiz_steps");
    for (int i = 1; i <= nv; ++i) out.schedule.push_back(0.5 * double(i) / nv);
    for (int i = 1; i <= nh; ++i) out.schedule.push_back(0.5 + 0.5 * double(i) / nh);
    out.reaction.boundaries = {{1, Side::South}, {1, Side::North}};
    out.solve_cfg.newton_rtol = 1e-8;
    out.solve_cfg.newton_atol = 1e-11;
    return out;
}

inline BuiltBench build_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.benchmark == "patch") return build_patch(cfg);
    if (cfg.benchmark == "blocks") return build_blocks(cfg);
    if (cfg.benchmark == "hertz") return build_hertz(cfg);
    if (cfg.benchmark == "ironing") return build_ironing(cfg);
    throw ConfigError("unknown benchmark: " + cfg.benchmark);
}

// ---------------------------------------------------------------------------
// Post-processing
// ---------------------------------------------------------------------------

inline Mat2 deformation_gradient_at(const Discretization& disc, const Vec2& uv,
                                    const SystemState& state) {
    PointCache pc = build_point_cache(disc.patch(), uv, 1);
    Mat2 g = Mat2::Zero();
    for (std::size_t b = 0; b < pc.cps.size(); ++b) {
        Vec2 ub(state.u[disc.dof(pc.cps[b], 0)], state.u[disc.dof(pc.cps[b], 1)]);
        g += ub * pc.grad[b].transpose();
    }
    return Mat2::Identity() + g;
}

inline Mat2 cauchy_stress_at(const Discretization& disc, const Vec2& uv,
                             const SystemState& state) {
    return cauchy_stress(disc.body().material, deformation_gradient_at(disc, uv, state));
}

/// Max relative deviation of sigma_yy from the exact uniform value -pbar,
/// sampled on a dense parametric grid over all bodies.
inline double patch_test_error(const ProblemSpace& space, const SystemState& state,
                               double pbar, int nsamp = 41) {
    double worst = 0.0;
    for (const auto& disc : space.discs) {
        const auto& ku = disc.patch().knots_u();
        const auto& kv = disc.patch().knots_v();
        for (int i = 0; i <= nsamp; ++i)
            for (int j = 0; j <= nsamp; ++j) {
                Vec2 uv(ku.front() + (ku.back() - ku.front()) * double(i) / nsamp,
                        kv.front() + (kv.back() - kv.front()) * double(j) / nsamp);
                double syy = cauchy_stress_at(disc, uv, state)(1, 1);
                worst = std::max(worst, std::abs(syy + pbar) / pbar);
            }
    }
    return worst;
}

/// Contact state sampled at the slave surface's own evaluation points
/// (Gauss points for the integral formulations, Greville points otherwise).
inline std::vector<ContactPointState> sample_contact_states(const ProblemSpace& space,
                                                            const SystemState& state,
                                                            const ContactPairSpec& pair,
                                                            bool gauss_points) {
    SurfaceView own(space.discs[pair.a.body], pair.a.side);
    SurfaceView other = pair.b.is_rigid() ? SurfaceView(pair.b.rigid)
                                          : SurfaceView(space.discs[pair.b.body], pair.b.side);
    auto own_cur = own.current_cps(state);
    auto other_cur = other.is_rigid() ? std::vector<Vec2>{} : other.current_cps(state);

    std::vector<double> params;
    if (gauss_points) {
        for (const auto& ep : detail::gauss_eval_points(own.ref_curve())) params.push_back(ep.xi);
    } else {
        params = own.ref_curve().knots().greville();
    }
    std::vector<ContactPointState> out;
    const int pe = own.ref_curve().knots().degree();
    for (double xi : params) {
        BasisEval be = own.ref_curve().rational_basis(xi, 0);
        Vec2 x = Vec2::Zero();
        for (int k = 0; k <= pe; ++k) x += be.ders(0, k) * own_cur[be.first_index(pe) + k];
        ProjectionResult pr = closest_point(other, other_cur, x);
        bool act = projection_active(pr, other.diameter());
        out.push_back({x, pr.gap, act ? pair.penalty * pr.gap : 0.0, act});
    }
    return out;
}

/// Discrete total variation of sigma_yy sampled along one boundary side.
inline double oscillation_measure(const Discretization& disc, const SystemState& state,
                                  Side side, int nsamp = 200) {
    const auto& ku = disc.patch().knots_u();
    const auto& kv = disc.patch().knots_v();
    double tv = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= nsamp; ++i) {
        double t = double(i) / nsamp;
        Vec2 uv;
        switch (side) {
            case Side::South: uv = Vec2(ku.front() + (ku.back() - ku.front()) * t, kv.front()); break;
            case Side::North: uv = Vec2(ku.front() + (ku.back() - ku.front()) * t, kv.back()); break;
            case Side::West: uv = Vec2(ku.front(), kv.front() + (kv.back() - kv.front()) * t); break;
            case Side::East: uv = Vec2(ku.back(), kv.front() + (kv.back() - kv.front()) * t); break;
        }
        double syy = cauchy_stress_at(disc, uv, state)(1, 1);
        if (i > 0) tv += std::abs(syy - prev);
        prev = syy;
    }
    return tv;
}

/// Closed-form Hertz reference for a cylinder on a rigid plane, plane strain.
struct HertzReference {
    double P = 0.0, E = 1.0, nu = 0.3;
    double Eprime = 0.0, a = 0.0, p0 = 0.0;

    static HertzReference make(double P, double E, double nu) {
        HertzReference h;
        h.P = P;
        h.E = E;
        h.nu = nu;
        h.Eprime = E / (1.0 - nu * nu);
        h.a = std::sqrt(4.0 * P / (M_PI * h.Eprime));
        h.p0 = 2.0 * P / (M_PI * h.a);
        return h;
    }
    double pressure(double x) const {
        double t = 1.0 - (x / a) * (x / a);
        return t > 0.0 ? p0 * std::sqrt(t) : 0.0;
    }
};

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir + "/" + name);
    if (!f) throw ConfigError("cannot open output file " + dir + "/" + name);
    f << std::setprecision(15);
    return f;
}

}  // namespace detail

inline void write_field(const ProblemSpace& space, const SystemState& state,
                        const std::string& dir, int nsamp = 40) {
    for (std::size_t k = 0; k < space.discs.size(); ++k) {
        auto f = detail::open_out(dir, "field_body" + std::to_string(k) + ".dat");
        f << "# structured grid " << (nsamp + 1) << " x " << (nsamp + 1)
          << ": x y ux uy sxx syy sxy\n";
        const auto& disc = space.discs[k];
        const auto& ku = disc.patch().knots_u();
        const auto& kv = disc.patch().knots_v();
        for (int j = 0; j <= nsamp; ++j)
            for (int i = 0; i <= nsamp; ++i) {
                Vec2 uv(ku.front() + (ku.back() - ku.front()) * double(i) / nsamp,
                        kv.front() + (kv.back() - kv.front()) * double(j) / nsamp);
                PointCache pc = build_point_cache(disc.patch(), uv, 1);
                Vec2 u = Vec2::Zero();
                Mat2 g = Mat2::Zero();
                for (std::size_t b = 0; b < pc.cps.size(); ++b) {
                    Vec2 ub(state.u[disc.dof(pc.cps[b], 0)], state.u[disc.dof(pc.cps[b], 1)]);
                    u += pc.val[b] * ub;
                    g += ub * pc.grad[b].transpose();
                }
                Mat2 sig = cauchy_stress(disc.body().material, Mat2::Identity() + g);
                f << pc.X.x() << " " << pc.X.y() << " " << u.x() << " " << u.y() << " "
                  << sig(0, 0) << " " << sig(1, 1) << " " << sig(0, 1) << "\n";
            }
    }
}

inline void write_trace(const SolveTrace& trace, const std::string& dir) {
    auto f = detail::open_out(dir, "trace.csv");
    f << "step,load_factor,at_target,iterations,bisections,residual0,residual,Fx,Fy\n";
    int i = 0;
    for (const auto& s : trace.steps)
        f << i++ << "," << s.load_factor << "," << (s.at_target ? 1 : 0) << "," << s.iterations
          << "," << s.bisections << "," << s.residual0 << "," << s.residual << ","
          << s.reaction.x() << "," << s.reaction.y() << "\n";
}

struct BenchResult {
    bool solver_ok = false;
    SolveTrace trace;
    std::map<std::string, double> metrics;
};

/// Run one benchmark end to end and write its artifacts.
inline BenchResult run_benchmark(const BenchmarkConfig& cfg, bool quiet = false) {
    BuiltBench bb = build_benchmark(cfg);
    ProblemSpace space(bb.model);
    SolveConfig scfg = bb.solve_cfg;
    if (!quiet) scfg.verbose = false;

    SolveResult sr = solve(bb.model, space, cfg.formulation, bb.schedule, scfg, bb.reaction);
    BenchResult out;
    out.trace = sr.trace;
    out.solver_ok = sr.trace.success;

    const std::string dir =
        cfg.out_dir.empty() ? (cfg.benchmark + std::string("_") + formulation_name(cfg.formulation))
                            : cfg.out_dir;
    write_trace(sr.trace, dir);
    if (!out.solver_ok) return out;
    write_field(space, sr.state, dir);

    if (cfg.benchmark == "patch") {
        const double pbar = cfg.get("pressure");
        out.metrics["sigma_yy_error"] = patch_test_error(space, sr.state, pbar);
        auto f = detail::open_out(dir, "sigma_yy_error.csv");
        f << "x,y,sigma_yy_err\n";
        for (const auto& disc : space.discs) {
            const auto& ku = disc.patch().knots_u();
            const auto& kv = disc.patch().knots_v();
            const int ns = 40;
            for (int j = 0; j <= ns; ++j)
                for (int i = 0; i <= ns; ++i) {
                    Vec2 uv(ku.front() + (ku.back() - ku.front()) * double(i) / ns,
                            kv.front() + (kv.back() - kv.front()) * double(j) / ns);
                    PointCache pc = build_point_cache(disc.patch(), uv, 0);
                    double syy = cauchy_stress_at(disc, uv, sr.state)(1, 1);
                    f << pc.X.x() << "," << pc.X.y() << "," << std::abs(syy + pbar) / pbar
                      << "\n";
                }
        }
    } else if (cfg.benchmark == "blocks") {
        out.metrics["tv_lower_east"] =
            oscillation_measure(space.discs[0], sr.state, Side::East);
        out.metrics["tv_upper_east"] =
            oscillation_measure(space.discs[1], sr.state, Side::East);
        out.metrics["tv"] = out.metrics["tv_lower_east"] + out.metrics["tv_upper_east"];
        auto f = detail::open_out(dir, "edge_stress.csv");
        f << "body,y,sigma_yy\n";
        for (int k = 0; k < 2; ++k) {
            const auto& disc = space.discs[k];
            const auto& kv = disc.patch().knots_v();
            for (int i = 0; i <= 200; ++i) {
                double t = kv.front() + (kv.back() - kv.front()) * double(i) / 200;
                Vec2 uv(disc.patch().knots_u().back(), t);
                f << k << "," << build_point_cache(disc.patch(), uv, 0).X.y() << ","
                  << cauchy_stress_at(disc, uv, sr.state)(1, 1) << "\n";
            }
        }
    } else if (cfg.benchmark == "hertz") {
        const double pbar = cfg.get("pressure");
        const double R = cfg.get("radius");
        HertzReference ref = HertzReference::make(2.0 * pbar * R, cfg.get("E"), cfg.get("nu"));
        bool gauss = !has_collocated_contact(cfg.formulation) && !is_pts(cfg.formulation);
        auto samples = sample_contact_states(space, sr.state, bb.model.contacts[0], gauss);
        std::sort(samples.begin(), samples.end(),
                  [](const auto& a, const auto& b) { return a.x.x() < b.x.x(); });
        auto f = detail::open_out(dir, "pressure_profile.csv");
        f << "x_over_a,p_over_p0\n";
        double pmax = 0.0, a_num = 0.0;
        for (const auto& s : samples) {
            double p = -s.t_N;
            f << s.x.x() / ref.a << "," << p / ref.p0 << "\n";
            pmax = std::max(pmax, p);
            if (s.active) a_num = std::max(a_num, std::abs(s.x.x()));
        }
        // Pressure at x = a/2, linearly interpolated between sample points.
        double p_half = 0.0;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            double x0 = samples[i - 1].x.x(), x1 = samples[i].x.x();
            if (x0 <= 0.5 * ref.a && 0.5 * ref.a <= x1 && x1 > x0) {
                double t = (0.5 * ref.a - x0) / (x1 - x0);
                p_half = -(samples[i - 1].t_N * (1.0 - t) + samples[i].t_N * t);
            }
        }
        out.metrics["p_max"] = pmax;
        out.metrics["p0_ref"] = ref.p0;
        out.metrics["a_ref"] = ref.a;
        out.metrics["a_num"] = a_num;
        out.metrics["p_half"] = p_half;
        auto fr = detail::open_out(dir, "hertz_reference.csv");
        fr << "x_over_a,p_over_p0\n";
        for (int i = 0; i <= 200; ++i) {
            double x = ref.a * 1.4 * double(i) / 200;
            fr << x / ref.a << "," << ref.pressure(x) / ref.p0 << "\n";
        }
    } else if (cfg.benchmark == "ironing") {
        auto f = detail::open_out(dir, "reaction.csv");
        f << "step,load_factor,Fx,Fy\n";
        int step = 0;
        for (const auto& s : sr.trace.steps)
            if (s.at_target)
                f << ++step << "," << s.load_factor << "," << s.reaction.x() << ","
                  << s.reaction.y() << "\n";
    }
    return out;
}

}  // namespace iga
