#include <catch2/catch_amalgamated.hpp>

#include <igacontact/solver.hpp>

#include <random>

using namespace iga;

namespace {

Body square_body(int degree, int ncp, Material mat) {
    Body b;
    b.patch = make_rectangle(KnotVector::open_uniform(degree, ncp),
                             KnotVector::open_uniform(degree, ncp), 0, 0, 1, 1);
    b.material = mat;
    return b;
}

/// Interpolate a displacement field at the Greville points; exact whenever the
/// field lies in the spline space.
void set_field(const Discretization& disc, SystemState& state,
               const std::function<Vec2(const Vec2&)>& u_of_X) {
    const auto& patch = disc.patch();
    auto gu = patch.knots_u().greville();
    auto gv = patch.knots_v().greville();
    const int n = patch.nu(), m = patch.nv();
    // Tensor-product Greville interpolation (exact for fields in the space).
    MatX A = MatX::Zero(n * m, n * m);
    MatX rhs = MatX::Zero(n * m, 2);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            int row = i + n * j;
            PatchBasis pb = patch.basis(gu[i], gv[j], 0);
            for (std::size_t k = 0; k < pb.indices.size(); ++k) A(row, pb.indices[k]) = pb.val[k];
            Vec2 X = patch.eval_surface(gu[i], gv[j], 0).x;
            rhs.row(row) = u_of_X(X).transpose();
        }
    MatX sol = A.fullPivLu().solve(rhs);
    for (int cp = 0; cp < n * m; ++cp) {
        state.u[disc.dof(cp, 0)] = sol(cp, 0);
        state.u[disc.dof(cp, 1)] = sol(cp, 1);
    }
}

MatX dense_matrix(const AssembledSystem& sys) {
    MatX K = MatX::Zero(sys.n, sys.n);
    for (const auto& t : sys.trips) K(t.row(), t.col()) += t.value();
    return K;
}

}  // namespace

TEST_CASE("linear displacement field has zero interior residual") {
    Model m;
    m.bodies = {square_body(2, 6, Material::neo_hookean(1.0, 0.5))};
    ProblemSpace space(m);
    SystemState state(space.ndof);
    Mat2 A;
    A << 0.05, 0.02, -0.03, 0.04;
    set_field(space.discs[0], state, [&](const Vec2& X) { return Vec2(A * X); });

    CollocationGrid grid(space.discs[0]);
    for (const auto& p : grid.points()) {
        if (p.cls != CollocClass::Interior) continue;
        RowTerms rt = pde_terms(space.discs[0], p.cache, state);
        CHECK(rt.r.norm() < 1e-12);
    }
}

TEST_CASE("manufactured quadratic field reproduces the stress divergence") {
    const double lambda = 1.0, mu = 0.5;
    Model m;
    m.bodies = {square_body(3, 7, Material::linear_elastic(lambda, mu))};
    ProblemSpace space(m);
    SystemState state(space.ndof);
    // u = (x^2, 0): div sigma = (2(lambda + 2 mu), 0).
    set_field(space.discs[0], state, [](const Vec2& X) { return Vec2(X.x() * X.x(), 0.0); });

    CollocationGrid grid(space.discs[0]);
    for (const auto& p : grid.points()) {
        if (p.cls != CollocClass::Interior) continue;
        RowTerms rt = pde_terms(space.discs[0], p.cache, state);
        CHECK(rt.r.x() == Catch::Approx(2.0 * (lambda + 2.0 * mu)).epsilon(1e-10));
        CHECK(std::abs(rt.r.y()) < 1e-10);
    }
}

TEST_CASE("traction rows reproduce an independently evaluated flux") {
    Model m;
    m.bodies = {square_body(2, 6, Material::neo_hookean(0.8, 0.6))};
    ProblemSpace space(m);
    SystemState state(space.ndof);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> d(-0.02, 0.02);
    for (int i = 0; i < space.ndof; ++i) state.u[i] = d(rng);

    const auto& disc = space.discs[0];
    CollocationGrid grid(disc);
    for (const auto& p : grid.points()) {
        if (p.cls != CollocClass::Edge) continue;
        const auto& e = p.edges[0];
        RowTerms rt = flux_terms(disc, p.cache, state, e.N_ref);

        // Oracle: finite-difference the displacement field in physical space.
        auto u_at = [&](const Vec2& uv) {
            PatchBasis pb = disc.patch().basis(uv[0], uv[1], 0);
            Vec2 u = Vec2::Zero();
            for (std::size_t k = 0; k < pb.indices.size(); ++k)
                u += pb.val[k] * Vec2(state.u[disc.dof(pb.indices[k], 0)],
                                      state.u[disc.dof(pb.indices[k], 1)]);
            return u;
        };
        // Map physical offsets back through the (affine) geometry of the square.
        const double h = 1e-6;
        Mat2 gu;
        Vec2 uv = p.uv;
        Vec2 inward(e.side == Side::East ? -1.0 : (e.side == Side::West ? 1.0 : 0.0),
                    e.side == Side::North ? -1.0 : (e.side == Side::South ? 1.0 : 0.0));
        Vec2 base = uv + 2 * h * inward;  // stay inside the domain for central FD
        for (int c = 0; c < 2; ++c) {
            Vec2 dp = Vec2::Zero(), dm = Vec2::Zero();
            dp[c] = h;
            dm[c] = -h;
            gu.col(c) = (u_at(base + dp) - u_at(base + dm)) / (2 * h);
        }
        Mat2 F = Mat2::Identity() + gu;
        Vec2 oracle = eval_PA(disc.body().material, F).P * e.N_ref;
        CHECK((rt.r - oracle).norm() < 2e-4 * (1.0 + oracle.norm()));
    }
}

TEST_CASE("enhanced rows degenerate to the interior residual when Cstar = 0") {
    Model m;
    m.bodies = {square_body(2, 5, Material::neo_hookean(1.0, 0.5))};
    m.bodies[0].side(Side::North).traction = [](const Vec2&, double) { return Vec2(0.1, -0.2); };
    ProblemSpace space(m);
    SystemState state(space.ndof);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(-0.02, 0.02);
    for (int i = 0; i < space.ndof; ++i) state.u[i] = d(rng);

    CollocationGrid grid(space.discs[0]);
    AssembledSystem enh(space.ndof);
    assemble_collocated_bulk(grid, state, 1.0, CollocMode::Enhanced, enh, 0.0);
    const auto& disc = space.discs[0];
    for (const auto& p : grid.points()) {
        if (p.cls != CollocClass::Edge) continue;
        RowTerms pde = pde_terms(disc, p.cache, state);
        for (int c = 0; c < 2; ++c)
            CHECK(enh.rhs[disc.dof(p.cp, c)] == Catch::Approx(pde.r[c]).margin(1e-13));
    }
}

TEST_CASE("collocated bulk row count and tangent consistency") {
    Model m;
    m.bodies = {square_body(2, 5, Material::neo_hookean(1.2, 0.7))};
    m.bodies[0].side(Side::South).set_dirichlet_const(0, 0.0);
    m.bodies[0].side(Side::South).set_dirichlet_const(1, 0.0);
    m.bodies[0].side(Side::North).traction = [](const Vec2&, double s) {
        return Vec2(0.0, -0.05 * s);
    };
    ProblemSpace space(m);
    SystemState state(space.ndof);
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> d(-0.01, 0.01);
    for (int i = 0; i < space.ndof; ++i) state.u[i] = d(rng);

    for (CollocMode mode : {CollocMode::Plain, CollocMode::Enhanced}) {
        auto assemble = [&](const SystemState& st) {
            AssembledSystem sys(space.ndof);
            CollocationGrid grid(space.discs[0]);
            assemble_collocated_bulk(grid, st, 1.0, mode, sys);
            return sys;
        };
        AssembledSystem sys = assemble(state);

        // One 2-row block per collocation point.
        int colloc_rows = 0;
        for (auto k : sys.kind)
            if (k == RowKind::Collocated) ++colloc_rows;
        CHECK(colloc_rows == space.ndof);  // every point owns its rows (Dirichlet applied later)

        MatX K = dense_matrix(sys);
        const double h = 1e-7;
        for (int jdof = 0; jdof < space.ndof; jdof += 7) {
            SystemState sp = state, sm = state;
            sp.u[jdof] += h;
            sm.u[jdof] -= h;
            VecX fd = (assemble(sp).rhs - assemble(sm).rhs) / (2 * h);
            CHECK((fd - K.col(jdof)).norm() <= 2e-5 * (1.0 + K.col(jdof).norm()));
        }
    }
}

TEST_CASE("full collocated solve reproduces the uniform compression state") {
    Model m;
    m.bodies = {square_body(2, 7, Material::linear_elastic(1.0, 0.5))};
    auto& b = m.bodies[0];
    b.side(Side::South).set_dirichlet_const(1, 0.0);
    b.side(Side::West).set_dirichlet_const(0, 0.0);
    const double pbar = 0.01;
    b.side(Side::North).traction = [pbar](const Vec2&, double s) { return Vec2(0, -pbar * s); };
    ProblemSpace space(m);
    SolveConfig cfg;
    cfg.newton_rtol = 1e-12;
    for (Formulation f : {Formulation::C, Formulation::EC}) {
        SolveResult sr = solve(m, space, f, uniform_schedule(1), cfg);
        REQUIRE(sr.trace.success);
        const auto& disc = space.discs[0];
        for (double xi : {0.15, 0.6})
            for (double eta : {0.25, 0.8}) {
                PointCache pc = build_point_cache(disc.patch(), Vec2(xi, eta), 1);
                Mat2 g = Mat2::Zero();
                for (std::size_t k = 0; k < pc.cps.size(); ++k)
                    g += Vec2(sr.state.u[disc.dof(pc.cps[k], 0)],
                              sr.state.u[disc.dof(pc.cps[k], 1)]) *
                         pc.grad[k].transpose();
                Mat2 sig = cauchy_stress(b.material, Mat2::Identity() + g);
                CHECK(sig(1, 1) == Catch::Approx(-pbar).epsilon(1e-10));
            }
    }
}

TEST_CASE("collocation grid rejects insufficient continuity") {
    Body b = square_body(2, 3, Material::linear_elastic(1.0, 0.5));
    b.patch = b.patch.refine_knots(0, {0.5, 0.5});  // interior multiplicity 2 = p
    Model m;
    m.bodies = {b};
    ProblemSpace space(m);
    CHECK_THROWS_AS(CollocationGrid(space.discs[0]), ConfigError);

    Body lin = square_body(1, 3, Material::linear_elastic(1.0, 0.5));
    Model m2;
    m2.bodies = {lin};
    ProblemSpace space2(m2);
    CHECK_THROWS_AS(CollocationGrid(space2.discs[0]), ConfigError);
}
