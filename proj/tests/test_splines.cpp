#include <catch2/catch_amalgamated.hpp>

#include <igacontact/splines.hpp>

#include <random>

using namespace iga;

namespace {

KnotVector bezier2() { return KnotVector(2, {0, 0, 0, 1, 1, 1}); }

NurbsPatch2D unit_square(int degree, int ncp) {
    return make_rectangle(KnotVector::open_uniform(degree, ncp),
                          KnotVector::open_uniform(degree, ncp), 0, 0, 1, 1);
}

NurbsPatch2D quarter_annulus(double rin, double rout, int degree = 2) {
    return make_annulus(Vec2(0, 0), rin, rout, 0.0, M_PI / 2.0, degree, degree + 1, 1);
}

}  // namespace

TEST_CASE("basis values on a single quadratic element") {
    KnotVector kv = bezier2();
    auto be = kv.eval_basis(0.0, 0);
    CHECK(be.ders(0, 0) == Catch::Approx(1.0));
    CHECK(be.ders(0, 1) == Catch::Approx(0.0).margin(1e-15));
    CHECK(be.ders(0, 2) == Catch::Approx(0.0).margin(1e-15));

    // Bernstein values at midspan, hand-unrolled recursion.
    be = kv.eval_basis(0.5, 0);
    CHECK(be.ders(0, 0) == Catch::Approx(0.25));
    CHECK(be.ders(0, 1) == Catch::Approx(0.5));
    CHECK(be.ders(0, 2) == Catch::Approx(0.25));

    // Right endpoint belongs to the last span.
    be = kv.eval_basis(1.0, 0);
    CHECK(be.ders(0, 2) == Catch::Approx(1.0));
    CHECK(be.span == kv.num_basis() - 1);

    CHECK_THROWS_AS(kv.eval_basis(1.5, 0), DomainError);
}

TEST_CASE("partition of unity and non-negativity") {
    KnotVector kv = KnotVector::open_with_breaks(3, {0.1, 0.2, 0.55, 0.7}, 0.0, 1.0);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        double x = dist(rng);
        auto be = kv.eval_basis(x, 1);
        double sum = 0.0, dsum = 0.0;
        for (int j = 0; j <= kv.degree(); ++j) {
            CHECK(be.ders(0, j) >= -1e-15);
            sum += be.ders(0, j);
            dsum += be.ders(1, j);
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(dsum) < 1e-12);
    }
}

TEST_CASE("basis derivatives match central finite differences") {
    KnotVector kv = KnotVector::open_with_breaks(4, {0.3, 0.6, 0.8}, 0.0, 1.0);
    const double h = 1e-6;
    for (double x : {0.12, 0.45, 0.71, 0.93}) {
        auto b0 = kv.eval_basis(x - h, 1);
        auto b1 = kv.eval_basis(x + h, 1);
        auto bc = kv.eval_basis(x, 2);
        REQUIRE(b0.span == b1.span);
        REQUIRE(b0.span == bc.span);
        for (int j = 0; j <= kv.degree(); ++j) {
            double fd1 = (b1.ders(0, j) - b0.ders(0, j)) / (2 * h);
            double fd2 = (b1.ders(1, j) - b0.ders(1, j)) / (2 * h);
            CHECK(bc.ders(1, j) == Catch::Approx(fd1).margin(1e-6 * (1 + std::abs(fd1))));
            CHECK(bc.ders(2, j) == Catch::Approx(fd2).margin(1e-5 * (1 + std::abs(fd2))));
        }
    }
}

TEST_CASE("greville abscissae") {
    CHECK(greville_points(bezier2()) == std::vector<double>{0.0, 0.5, 1.0});

    KnotVector kv(2, {0, 0, 0, 0.5, 1, 1, 1});
    CHECK(greville_points(kv) == std::vector<double>{0.0, 0.25, 0.75, 1.0});

    KnotVector kv3(3, {0, 0, 0, 0, 1, 2, 3, 3, 3, 3});
    auto g = greville_points(kv3);
    REQUIRE(g.size() == 6);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == Catch::Approx(1.0 / 3.0));
    CHECK(g[2] == Catch::Approx(1.0));
    CHECK(g[3] == Catch::Approx(2.0));
    CHECK(g[4] == Catch::Approx(8.0 / 3.0));
    CHECK(g[5] == 3.0);

    // Endpoint Greville points coincide with the knot endpoints exactly.
    KnotVector kvg = KnotVector::open_with_breaks(3, {0.637, 1.38}, 0.25, 1.75);
    auto gg = greville_points(kvg);
    CHECK(gg.front() == 0.25);
    CHECK(gg.back() == 1.75);
}

TEST_CASE("knot vector invariants are enforced") {
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0, 0.6, 0.4, 1, 1, 1}), ConfigError);  // decreasing
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1, 1, 1}), ConfigError);            // not open
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1}), ConfigError);  // mult > p
}

TEST_CASE("identity surface map on the unit square") {
    NurbsPatch2D patch = unit_square(2, 6);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        double xi = dist(rng), eta = dist(rng);
        SurfacePoint s = patch.eval_surface(xi, eta, 2);
        CHECK(s.x.x() == Catch::Approx(xi).margin(1e-14));
        CHECK(s.x.y() == Catch::Approx(eta).margin(1e-14));
        // Partition of unity of the rational basis.
        PatchBasis pb = patch.basis(xi, eta, 0);
        double sum = 0.0;
        for (double v : pb.val) sum += v;
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("quarter annulus is an exact circle") {
    NurbsPatch2D patch = quarter_annulus(0.5, 2.0);
    for (int i = 0; i <= 40; ++i) {
        double eta = double(i) / 40;
        CHECK(patch.eval_surface(1.0, eta, 0).x.norm() == Catch::Approx(2.0).margin(1e-14));
        CHECK(patch.eval_surface(0.0, eta, 0).x.norm() == Catch::Approx(0.5).margin(1e-14));
    }
    // Elevated-degree arcs stay on the circle.
    for (int p : {3, 4, 5}) {
        NurbsCurve2D arc = make_circular_arc(Vec2(1, 2), 1.5, 0.2, 1.5, p);
        for (int i = 0; i <= 30; ++i) {
            double xi = double(i) / 30;
            CHECK((arc.eval(xi, 0).x - Vec2(1, 2)).norm() == Catch::Approx(1.5).margin(1e-13));
        }
    }
}

TEST_CASE("boundary curves agree with the surface restriction") {
    NurbsPatch2D sq = unit_square(2, 5);
    NurbsCurve2D south = sq.boundary_curve(Side::South);
    CHECK((south.eval(0.0, 0).x - Vec2(0, 0)).norm() < 1e-15);
    CHECK((south.eval(1.0, 0).x - Vec2(1, 0)).norm() < 1e-15);

    NurbsPatch2D ann = quarter_annulus(0.4, 1.0);
    NurbsCurve2D inner = ann.boundary_curve(Side::West);
    for (int i = 0; i <= 20; ++i) {
        double t = double(i) / 20;
        CHECK(inner.eval(t, 0).x.norm() == Catch::Approx(0.4).margin(1e-14));
        Vec2 on_patch = ann.eval_surface(0.0, t, 0).x;
        CHECK((inner.eval(t, 0).x - on_patch).norm() < 1e-14);
    }

    // Curve Greville points map to the patch edge Greville maps.
    auto ids = ann.boundary_indices(Side::East);
    auto gv = ann.knots_v().greville();
    NurbsCurve2D outer = ann.boundary_curve(Side::East);
    for (std::size_t k = 0; k < gv.size(); ++k) {
        Vec2 a = outer.eval(gv[k], 0).x;
        Vec2 b = ann.eval_surface(1.0, gv[k], 0).x;
        CHECK((a - b).norm() < 1e-14);
    }
    CHECK(ids.size() == gv.size());
}

TEST_CASE("knot refinement preserves the geometry map") {
    NurbsPatch2D patch = quarter_annulus(0.3, 1.2, 2);
    NurbsPatch2D fine = patch.refine_knots(1, {0.5});
    fine = fine.refine_knots(0, {0.25, 0.5, 0.9});
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        double xi = dist(rng), eta = dist(rng);
        Vec2 a = patch.eval_surface(xi, eta, 0).x;
        Vec2 b = fine.eval_surface(xi, eta, 0).x;
        CHECK((a - b).norm() < 1e-12);
    }

    // Repeated insertion up to multiplicity p is accepted, beyond is an error.
    NurbsPatch2D sq = unit_square(2, 3);
    sq = sq.refine_knots(0, {0.5, 0.5});
    CHECK(sq.knots_u().multiplicity(0.5) == 2);
    CHECK_THROWS_AS(sq.refine_knots(0, std::vector<double>{0.5}), ConfigError);
}

TEST_CASE("graded breaks place elements by the 80/10 rule") {
    auto breaks = graded_breaks(50, 0.8, 0.1, true);
    KnotVector kv = KnotVector::open_with_breaks(3, breaks, 0.0, 1.0);
    int fine = 0, total = 0;
    for (auto [a, b] : kv.spans()) {
        ++total;
        if (b <= 0.1 + 1e-12) ++fine;
    }
    CHECK(total == 50);
    CHECK(fine == 40);

    auto rev = graded_breaks(50, 0.8, 0.1, false);
    KnotVector kvr = KnotVector::open_with_breaks(3, rev, 0.0, 1.0);
    int fine_hi = 0;
    for (auto [a, b] : kvr.spans())
        if (a >= 0.9 - 1e-12) ++fine_hi;
    CHECK(fine_hi == 40);
}
