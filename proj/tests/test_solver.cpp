#include <catch2/catch_amalgamated.hpp>

#include <igacontact/bench.hpp>

using namespace iga;

namespace {

Model compression_model(int ncp, double penalty, double drive) {
    Material mat = Material::linear_elastic(1.0, 0.5);
    Model m;
    Body lower, upper;
    lower.patch = make_rectangle(KnotVector::open_uniform(2, ncp),
                                 KnotVector::open_uniform(2, ncp), 0, 0, 1, 1);
    lower.material = mat;
    lower.side(Side::South).set_dirichlet_const(0, 0.0);
    lower.side(Side::South).set_dirichlet_const(1, 0.0);
    lower.side(Side::North).contact = true;
    upper.patch = make_rectangle(KnotVector::open_uniform(2, ncp),
                                 KnotVector::open_uniform(2, ncp), 0, 1, 1, 1);
    upper.material = mat;
    upper.side(Side::South).contact = true;
    upper.side(Side::North).set_dirichlet_const(0, 0.0);
    upper.side(Side::North).set_dirichlet_ramp(1, -drive);
    m.bodies = {lower, upper};
    ContactPairSpec pair;
    pair.a = ContactSurfaceRef::deformable(1, Side::South);
    pair.b = ContactSurfaceRef::deformable(0, Side::North);
    pair.penalty = penalty;
    m.contacts = {pair};
    return m;
}

}  // namespace

TEST_CASE("solve is deterministic under serial execution") {
    Model m = compression_model(5, 150.0, 0.015);
    ProblemSpace space(m);
    SolveConfig cfg;
    ReactionSpec reaction{{{0, Side::South}}};
    SolveResult a = solve(m, space, Formulation::GPTS, uniform_schedule(3), cfg, reaction);
    SolveResult b = solve(m, space, Formulation::GPTS, uniform_schedule(3), cfg, reaction);
    REQUIRE(a.trace.success);
    REQUIRE(b.trace.success);
    CHECK(a.state.u == b.state.u);  // bitwise
    REQUIRE(a.trace.steps.size() == b.trace.steps.size());
    for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
        CHECK(a.trace.steps[i].residual == b.trace.steps[i].residual);
        CHECK(a.trace.steps[i].reaction == b.trace.steps[i].reaction);
    }
}

TEST_CASE("local convergence contracts fast once the active set settles") {
    Model m = compression_model(6, 300.0, 0.02);
    ProblemSpace space(m);
    SystemState state(space.ndof);
    SolverWorkspace ws;
    SolveConfig cfg;
    cfg.verbose = false;

    // March to full load, recording residual histories manually.
    std::vector<double> last_history;
    for (double s : uniform_schedule(4)) {
        std::vector<double> hist;
        for (int it = 0; it <= cfg.max_iter; ++it) {
            AssembleResult ar = assemble_full(m, space, state, s, Formulation::GPTS, ws);
            double rn = 0.0;
            for (int i = 0; i < ar.sys.n; ++i)
                if (ar.sys.kind[i] == RowKind::Galerkin) rn += ar.sys.rhs[i] * ar.sys.rhs[i];
            rn = std::sqrt(rn);
            hist.push_back(rn);
            if (it > 0 && rn < 1e-13) break;
            SpMat K = ar.sys.matrix();
            Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu(K);
            REQUIRE(lu.info() == Eigen::Success);
            state.u += VecX(lu.solve(-ar.sys.rhs));
        }
        last_history = hist;
    }
    // Once below 1e-3 of the initial residual, each iteration gains >= 10x.
    double ref = std::max(last_history.front(), 1e-30);
    for (std::size_t i = 0; i + 1 < last_history.size(); ++i) {
        if (last_history[i] < 1e-3 * ref && last_history[i] > 1e-14)
            CHECK(last_history[i + 1] <= 0.1 * last_history[i]);
    }
}

TEST_CASE("bisection recovers failed steps and still hits every target") {
    Model m = compression_model(5, 400.0, 0.03);
    ProblemSpace space(m);
    SolveConfig cfg;
    cfg.max_iter = 2;  // starve Newton so bisection must engage
    cfg.max_bisections = 10;
    auto schedule = uniform_schedule(2);
    SolveResult sr = solve(m, space, Formulation::GPTS, schedule, cfg);
    REQUIRE(sr.trace.success);
    // Accumulated load factors include each original step boundary exactly.
    for (double target : schedule) {
        bool hit = false;
        for (const auto& st : sr.trace.steps)
            if (st.load_factor == target && st.at_target) hit = true;
        CHECK(hit);
    }
    bool bisected = false;
    for (const auto& st : sr.trace.steps) bisected |= (st.bisections > 0);
    CHECK(bisected);
}

TEST_CASE("bisection exhaustion reports a step failure with trace") {
    Model m = compression_model(5, 400.0, 0.03);
    ProblemSpace space(m);
    SolveConfig cfg;
    cfg.max_iter = 0;
    cfg.max_bisections = 2;
    SolveResult sr = solve(m, space, Formulation::GPTS, uniform_schedule(2), cfg);
    CHECK_FALSE(sr.trace.success);
    CHECK(!sr.trace.failure.empty());
}

TEST_CASE("inadmissible trial states trigger bisection instead of aborting") {
    // A soft neo-Hookean block driven hard in one step inverts at the first
    // Newton trial; the solver must cut the increment and finish.
    Model m;
    Body b;
    b.patch = make_rectangle(KnotVector::open_uniform(2, 4), KnotVector::open_uniform(2, 4),
                             0, 0, 1, 1);
    b.material = Material::neo_hookean(1.0, 0.5);
    b.side(Side::South).set_dirichlet_const(0, 0.0);
    b.side(Side::South).set_dirichlet_const(1, 0.0);
    b.side(Side::North).set_dirichlet_const(0, 0.0);
    b.side(Side::North).set_dirichlet_ramp(1, -0.9);
    m.bodies = {b};
    ProblemSpace space(m);
    SolveConfig cfg;
    cfg.max_bisections = 12;
    SolveResult sr = solve(m, space, Formulation::GPTS, uniform_schedule(1), cfg);
    REQUIRE(sr.trace.success);
    CHECK(sr.trace.steps.back().load_factor == 1.0);
    bool bisected = false;
    for (const auto& st : sr.trace.steps) bisected |= (st.bisections > 0);
    CHECK(bisected);
}
