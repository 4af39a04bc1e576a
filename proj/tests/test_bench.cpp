#include <catch2/catch_amalgamated.hpp>

#include <igacontact/bench.hpp>

#include <cstdio>

using namespace iga;

TEST_CASE("hertz reference profile integrates to the total load") {
    HertzReference ref = HertzReference::make(0.002, 1.0, 0.3);
    CHECK(ref.Eprime == Catch::Approx(1.0 / 0.91).epsilon(1e-14));
    // Values reported for the standard setup.
    CHECK(ref.a == Catch::Approx(0.0481).margin(5e-5));
    CHECK(ref.p0 == Catch::Approx(0.0264).margin(5e-5));

    // Quadrature of the closed-form profile over [-a, a]. The substitution
    // x = a sin(theta) removes the endpoint square-root singularity, so Gauss
    // quadrature of the transformed integrand converges spectrally.
    const auto& gr = gauss_rule(30);
    double integral = 0.0;
    for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
        double theta = 0.5 * M_PI * gr.nodes[q];
        double x = ref.a * std::sin(theta);
        integral += gr.weights[q] * 0.5 * M_PI * ref.a * std::cos(theta) * ref.pressure(x);
    }
    CHECK(integral == Catch::Approx(ref.P).margin(1e-12));
}

TEST_CASE("default configs mirror the reported setups") {
    BenchmarkConfig patch = default_config("patch");
    CHECK(patch.geti("ncp") == 30);
    CHECK(patch.geti("degree") == 2);
    CHECK(patch.get("penalty") == 100.0);
    CHECK(patch.get("mu") == 0.5);
    CHECK(patch.get("lambda") == 1.0);
    CHECK(patch.get("pressure") == 0.01);
    CHECK(patch.geti("steps") == 10);

    BenchmarkConfig blocks = default_config("blocks");
    CHECK(blocks.geti("ncp_u") == 10);
    CHECK(blocks.geti("ncp_v") == 15);
    CHECK(blocks.get("penalty") == 1500.0);
    CHECK(blocks.geti("steps") == 20);

    BenchmarkConfig hertz = default_config("hertz");
    CHECK(hertz.geti("nelem") == 50);
    CHECK(hertz.geti("degree") == 3);
    CHECK(hertz.get("penalty") == 1000.0);
    CHECK(hertz.get("E") == 1.0);
    CHECK(hertz.get("nu") == 0.3);
    CHECK(hertz.get("pressure") == 0.001);

    BenchmarkConfig ir = default_config("ironing");
    CHECK(ir.geti("nelem_u") == 80);
    CHECK(ir.geti("nelem_v") == 20);
    CHECK(ir.geti("degree") == 3);
    CHECK(ir.get("penalty") == 100.0);
    CHECK(ir.get("E_cyl") == 3.0);
    CHECK(ir.get("E_slab") == 1.0);
    CHECK(ir.geti("vert_steps") == 30);
    CHECK(ir.geti("horiz_steps") == 270);

    CHECK_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("config files override defaults") {
    std::string path = std::string("test_config_tmp.cfg");
    {
        std::ofstream f(path);
        f << "# comment line\n";
        f << "benchmark = blocks\n";
        f << "formulation = eccs\n";
        f << "penalty = 42.5   # inline comment\n";
        f << "ncp_u = 7\n";
    }
    BenchmarkConfig cfg = default_config("patch");
    load_config_file(cfg, path);
    CHECK(cfg.benchmark == "blocks");
    CHECK(cfg.formulation == Formulation::ECCS);
    CHECK(cfg.get("penalty") == 42.5);
    CHECK(cfg.geti("ncp_u") == 7);
    CHECK(cfg.geti("ncp_v") == 15);  // untouched default
    std::remove(path.c_str());

    BenchmarkConfig bad = default_config("patch");
    CHECK_THROWS_AS(apply_config_line(bad, "penalty", "abc"), ConfigError);
}

TEST_CASE("benchmark geometry builders satisfy their constraints") {
    // Patch test: equal-width blocks; the upper mesh is graded and both bodies
    // carry distinct curvilinear edge parametrizations (non-affine measure, same
    // exact rectangle geometry).
    BenchmarkConfig pc = default_config("patch");
    BuiltBench patch = build_patch(pc);
    const auto& pku = patch.model.bodies[1].patch.knots_u();
    auto spans = pku.spans();
    CHECK(spans.front().second - spans.front().first <
          0.5 * (spans.back().second - spans.back().first));
    for (int body = 0; body < 2; ++body) {
        const auto& bp = patch.model.bodies[body].patch;
        NurbsCurve2D iface = bp.boundary_curve(body == 0 ? Side::North : Side::South);
        double j0 = iface.eval(0.2, 1).d1.norm();
        double j1 = iface.eval(0.8, 1).d1.norm();
        CHECK(std::abs(j0 - j1) > 0.05 * (j0 + j1));  // non-affine parametrization
        // The interface is still the exact straight line y = 1.
        for (int i = 0; i <= 20; ++i)
            CHECK(iface.eval(double(i) / 20, 0).x.y() == Catch::Approx(1.0).margin(1e-12));
    }

    // Hertz: outer boundary is the exact circle of radius R after grading.
    BenchmarkConfig hc = default_config("hertz");
    hc.set("nelem", 10);
    BuiltBench hertz = build_hertz(hc);
    const auto& cyl = hertz.model.bodies[0].patch;
    for (int i = 0; i <= 25; ++i) {
        double eta = double(i) / 25;
        Vec2 x = cyl.eval_surface(cyl.knots_u().back(), eta, 0).x;
        CHECK((x - Vec2(0, 1)).norm() == Catch::Approx(1.0).margin(1e-12));
    }
    // Bottom of the cylinder touches the rigid plane.
    Vec2 bottom = cyl.eval_surface(cyl.knots_u().back(), 0.0, 0).x;
    CHECK(bottom.x() == Catch::Approx(0.0).margin(1e-12));
    CHECK(bottom.y() == Catch::Approx(0.0).margin(1e-12));
    // 80 percent of the angular elements lie in the first tenth of the knot span.
    int fine = 0, total = 0;
    for (auto [a, b] : cyl.knots_v().spans()) {
        ++total;
        if (b <= 0.1 + 1e-12) ++fine;
    }
    CHECK(total == 10);
    CHECK(fine == 8);

    // Ironing: half-cylinder flat faces sit at the top, outer arc touches slab.
    BenchmarkConfig ic = default_config("ironing");
    ic.set("nelem_u", 8);
    ic.set("nelem_v", 4);
    BuiltBench ir = build_ironing(ic);
    const auto& icyl = ir.model.bodies[1].patch;
    Vec2 low = icyl.eval_surface(icyl.knots_u().back(), 0.5, 0).x;
    CHECK(low.y() == Catch::Approx(1.0).margin(1e-12));  // touches slab top
    CHECK(ir.model.periodic.size() == 1);
    CHECK(ir.schedule.size() == std::size_t(ic.geti("vert_steps") + ic.geti("horiz_steps")));
}

TEST_CASE("patch error metric on a synthetic exact state") {
    BenchmarkConfig cfg = default_config("patch");
    cfg.set("ncp", 8);
    BuiltBench bb = build_patch(cfg);
    ProblemSpace space(bb.model);
    SystemState state(space.ndof);
    // Impose the exact affine solution of the uniform stress state.
    const double pbar = cfg.get("pressure");
    const double lam = cfg.get("lambda"), mu = cfg.get("mu");
    // sigma_xx = 0 and sigma_yy = -pbar under plane strain:
    const double eyy = -pbar * (lam + 2 * mu) /
                       ((lam + 2 * mu) * (lam + 2 * mu) - lam * lam);
    const double exx = -lam / (lam + 2 * mu) * eyy;
    for (const auto& disc : space.discs) {
        const auto& patch = disc.patch();
        auto gu = patch.knots_u().greville();
        auto gv = patch.knots_v().greville();
        for (int j = 0; j < patch.nv(); ++j)
            for (int i = 0; i < patch.nu(); ++i) {
                Vec2 X = patch.eval_surface(gu[i], gv[j], 0).x;
                state.u[disc.dof(patch.grid_index(i, j), 0)] = exx * X.x();
                state.u[disc.dof(patch.grid_index(i, j), 1)] = eyy * X.y();
            }
    }
    CHECK(patch_test_error(space, state, pbar) <= 1e-10);
    // Analytic uniform stress state satisfies the Galerkin bulk equations.
    AssembledSystem sys(space.ndof);
    for (const auto& disc : space.discs) assemble_bulk(disc, state, sys);
    double interior_res = 0.0;
    for (const auto& disc : space.discs) {
        const auto& patch = disc.patch();
        for (int j = 1; j < patch.nv() - 1; ++j)
            for (int i = 1; i < patch.nu() - 1; ++i)
                for (int c = 0; c < 2; ++c)
                    interior_res =
                        std::max(interior_res,
                                 std::abs(sys.rhs[disc.dof(patch.grid_index(i, j), c)]));
    }
    CHECK(interior_res <= 1e-12);
}

TEST_CASE("oscillation measure is near zero for a uniform stress state") {
    BenchmarkConfig cfg = default_config("blocks");
    cfg.set("ncp_u", 6);
    cfg.set("ncp_v", 8);
    BuiltBench bb = build_blocks(cfg);
    ProblemSpace space(bb.model);
    SystemState state(space.ndof);
    for (const auto& disc : space.discs) {
        const auto& patch = disc.patch();
        auto gu = patch.knots_u().greville();
        auto gv = patch.knots_v().greville();
        for (int j = 0; j < patch.nv(); ++j)
            for (int i = 0; i < patch.nu(); ++i) {
                Vec2 X = patch.eval_surface(gu[i], gv[j], 0).x;
                state.u[disc.dof(patch.grid_index(i, j), 1)] = -0.01 * X.y();
            }
    }
    CHECK(oscillation_measure(space.discs[0], state, Side::East) <= 1e-12);
}
