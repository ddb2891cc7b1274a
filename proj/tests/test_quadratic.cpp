#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "quadmorph/quadratic.hpp"

using namespace qm;

namespace {

QuadraticMap random_quadratic(std::mt19937_64& rng, double quad_scale = 0.3) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    QuadraticMap q;
    q.a = {unif(rng), 1.0 + 0.3 * unif(rng), 0.3 * unif(rng), quad_scale * unif(rng),
           quad_scale * unif(rng), quad_scale * unif(rng)};
    q.b = {unif(rng), 0.3 * unif(rng), 1.0 + 0.3 * unif(rng), quad_scale * unif(rng),
           quad_scale * unif(rng), quad_scale * unif(rng)};
    return q;
}

}  // namespace

TEST_CASE("quad_eval: identity map") {
    QuadraticMap q = QuadraticMap::identity();
    Jet2 j = q.eval({3, 4});
    CHECK(j.value.x == 3.0);
    CHECK(j.value.y == 4.0);
    CHECK(j.D.m[0][0] == 1.0);
    CHECK(j.D.m[1][1] == 1.0);
    CHECK(j.D.m[0][1] == 0.0);
    CHECK(j.D2.entry_abs_sum() == 0.0);
    CHECK(j.jacobian() == 1.0);
}

TEST_CASE("quad_eval: identity plus x^2 in first component") {
    QuadraticMap q = QuadraticMap::identity();
    q.a[3] = 1.0;  // a4 = 1
    Jet2 j = q.eval({1, 0});
    CHECK(j.value.x == 2.0);
    CHECK(j.value.y == 0.0);
    CHECK(j.D.m[0][0] == 3.0);  // 1 + 2*1
    CHECK(j.D2(0, 0, 0) == 2.0);
}

TEST_CASE("quad_eval under a rotated chart matches finite differences") {
    std::mt19937_64 rng(7);
    QuadraticMap q = random_quadratic(rng);
    q.chart.origin = {0.4, -0.7};
    q.chart.rot = Mat2::rotation(0.73);
    auto f = [&](Point2 p) { return q.eval_value(p); };
    Point2 p{0.9, 0.2};
    Jet2 ana = q.eval(p);
    Jet2 num = fd_jet(f, p, 1e-5);
    CHECK(ana.value.x == doctest::Approx(num.value.x));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(ana.D.m[i][j] == doctest::Approx(num.D.m[i][j]).epsilon(1e-8).scale(1.0));
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(ana.D2(c, i, j) == doctest::Approx(num.D2(c, i, j)).epsilon(1e-4).scale(1.0));
}

TEST_CASE("rechart preserves the polynomial exactly") {
    std::mt19937_64 rng(11);
    QuadraticMap q = random_quadratic(rng);
    q.chart.origin = {1.0, 2.0};
    q.chart.rot = Mat2::rotation(-0.31);
    Chart target;
    target.origin = {-0.4, 0.9};
    target.rot = Mat2::rotation(1.2);
    QuadraticMap r = q.recharted(target);
    for (Point2 p : {Point2{0, 0}, Point2{1.7, -2.2}, Point2{0.3, 0.35}}) {
        Jet2 a = q.eval(p), b = r.eval(p);
        CHECK((a.value - b.value).norm() < 1e-12);
        CHECK((a.D - b.D).entry_abs_sum() < 1e-12);
        CHECK((a.D2 - b.D2).entry_abs_sum() < 1e-11);
    }
}

TEST_CASE("mixed partials structurally symmetric") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        QuadraticMap q = random_quadratic(rng);
        q.chart.rot = Mat2::rotation(t * 0.37);
        Jet2 j = q.eval({0.2, 0.6});
        CHECK(j.D2.mixed_symmetry_gap() < 1e-13);
    }
}

TEST_CASE("solve_coefficients round-trips an exact quadratic target") {
    std::mt19937_64 rng(23);
    double r = 0.35;
    TriangleConditions cond = TriangleConditions::reference(r);
    QuadraticMap target = random_quadratic(rng);
    // condition values computed analytically (pointwise, no averaging: the
    // conditions of the system are pointwise in the interpolant)
    std::array<double, 6> c1{}, c2{};
    for (int j = 0; j < 3; ++j) {
        Vec2 v = target.eval_value(cond.vertex[j]);
        c1[j] = v.x;
        c2[j] = v.y;
    }
    for (int k = 0; k < 3; ++k) {
        Vec2 d = target.eval(cond.deriv[k].anchor).dir_derivative(cond.deriv[k].direction);
        c1[3 + k] = d.x;
        c2[3 + k] = d.y;
    }
    QuadraticMap got = solve_coefficients(cond, c1, c2);
    QuadraticMap ref = target.recharted(got.chart);
    for (int i = 0; i < 6; ++i) {
        CHECK(got.a[i] == doctest::Approx(ref.a[i]).epsilon(1e-10).scale(1.0));
        CHECK(got.b[i] == doctest::Approx(ref.b[i]).epsilon(1e-10).scale(1.0));
    }
    InterpolationSystem sys = InterpolationSystem::assemble(cond);
    CHECK(sys.residual(got.a, c1) < 1e-10 * 10.0);
}

TEST_CASE("reference inverse rows: a2 = c4 and a4 = c2 - c1 - c4 at r=1") {
    TriangleConditions cond = TriangleConditions::reference(1.0);
    std::array<double, 6> c1{0.3, 1.9, -0.4, 0.8, 0.1, 0.2};
    std::array<double, 6> zero{};
    QuadraticMap q = solve_coefficients(cond, c1, zero);
    CHECK(q.a[1] == doctest::Approx(c1[3]).epsilon(1e-12));              // a2 = c4
    CHECK(q.a[3] == doctest::Approx(c1[1] - c1[0] - c1[3]).epsilon(1e-12));  // a4 = c2-c1-c4
}

TEST_CASE("assembled system consistent with the reference inverse on rows 1,2,3,4,6") {
    for (double r : {1.0, 0.25, 0.015625}) {
        InterpolationSystem sys = InterpolationSystem::assemble(TriangleConditions::reference(r));
        auto inv = reference_inverse_rows(r);
        // row_i(inv) . M = e_i for the rows the averaged-data conditions pin
        // down unambiguously (all but the a5 row).
        for (int i : {0, 1, 2, 3, 5}) {
            for (int j = 0; j < 6; ++j) {
                double s = 0.0;
                for (int k = 0; k < 6; ++k) s += inv[i][k] * sys.M[k][j];
                double expect = (i == j) ? 1.0 : 0.0;
                CHECK(s == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
            }
        }
    }
}

TEST_CASE("interpolation system condition number stays moderate after scaling") {
    for (double r : {1.0, 1.0 / 8, 1.0 / 128, 1.0 / 1024}) {
        InterpolationSystem sys = InterpolationSystem::assemble(TriangleConditions::reference(r));
        CHECK(sys.condition_estimate() < 1e8);
    }
}

TEST_CASE("build_interpolant: linear sources are reproduced exactly") {
    Mat2 A{{{1.3, -0.2}, {0.4, 0.9}}};
    MapSource src = QuadraticMap::linear(A, {0.7, -1.1}).as_source();
    TriangleConditions cond = TriangleConditions::reference(0.2);
    QuadraticMap q = build_interpolant(src, cond);
    QuadraticMap expect = QuadraticMap::linear(A, {0.7, -1.1}).recharted(q.chart);
    for (int i = 0; i < 6; ++i) {
        CHECK(q.a[i] == doctest::Approx(expect.a[i]).epsilon(1e-10).scale(1.0));
        CHECK(q.b[i] == doctest::Approx(expect.b[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("build_interpolant: identity stays identity") {
    MapSource src = QuadraticMap::identity().as_source();
    TriangleConditions cond = TriangleConditions::reference(0.5);
    QuadraticMap q = build_interpolant(src, cond);
    for (Point2 p : {Point2{0.1, 0.1}, Point2{0.45, 0.02}}) {
        CHECK((q.eval_value(p) - p).norm() < 1e-12);
    }
}

TEST_CASE("build_interpolant: quadratic source shifts by the disk-average offset") {
    // For an exactly quadratic source the averaged vertex values exceed the
    // pointwise ones by (rho^2/8) * laplacian per component, rho = r/10, so
    // the interpolant is the source plus that constant.
    std::mt19937_64 rng(31);
    QuadraticMap src = random_quadratic(rng, 0.5);
    double r = 0.4;
    TriangleConditions cond = TriangleConditions::reference(r);
    QuadraticMap q = build_interpolant(src.as_source(), cond);
    double rho = cond.avg_radius();
    Vec2 lap{2 * src.a[3] + 2 * src.a[5], 2 * src.b[3] + 2 * src.b[5]};
    Vec2 offset = lap * (rho * rho / 8.0);
    QuadraticMap expect = src.shifted_value(offset).recharted(q.chart);
    for (int i = 0; i < 6; ++i) {
        CHECK(q.a[i] == doctest::Approx(expect.a[i]).epsilon(1e-9).scale(1.0));
        CHECK(q.b[i] == doctest::Approx(expect.b[i]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("edge continuity of interpolants on adjacent triangles") {
    // Two grid triangles sharing the diagonal of the unit-cell square, both
    // built with the shared anchor scheme; restrictions to the shared edge
    // satisfy identical conditions, so they coincide.
    auto src = make_builtin_map("shear", {0.2});
    double r = 0.25;
    // lower triangle: ll=(0,0), lr=(r,0), ul=(0,r)
    TriangleConditions lower = TriangleConditions::reference(r);
    // upper triangle: ur=(r,r), ul=(0,r), lr=(r,0); world anchors:
    // top edge (ul,+x), right edge (ur,-y), diagonal (ul,(-1,1))
    TriangleConditions upper;
    upper.vertex = {Point2{r, r}, Point2{0, r}, Point2{r, 0}};
    upper.deriv = {DerivCondition{{0, r}, {1, 0}}, DerivCondition{{0, r}, {-1, 1}},
                   DerivCondition{{r, r}, {0, -1}}};
    upper.leg = r;
    QuadraticMap q1 = build_interpolant(src, lower);
    QuadraticMap q2 = build_interpolant(src, upper);
    Segment diag{{r, 0}, {0, r}};
    double mismatch = verify_edge_continuity(q1, q2, diag, 100);
    CHECK(mismatch < 1e-10);

    // tangential derivatives along the shared edge agree as well
    Vec2 t = diag.tangent();
    double worst_tan = 0.0;
    for (int i = 0; i <= 100; ++i) {
        Point2 p = diag.at(i / 100.0);
        worst_tan = std::max(worst_tan,
                             (q1.eval(p).dir_derivative(t) - q2.eval(p).dir_derivative(t)).norm());
    }
    CHECK(worst_tan < 1e-10);
}

TEST_CASE("deliberately mismatched anchors break edge continuity") {
    auto src = make_builtin_map("shear", {0.35});
    double r = 0.25;
    TriangleConditions lower = TriangleConditions::reference(r);
    TriangleConditions upper;
    upper.vertex = {Point2{r, r}, Point2{0, r}, Point2{r, 0}};
    // wrong diagonal anchor: lower-right endpoint instead of upper-left
    upper.deriv = {DerivCondition{{0, r}, {1, 0}}, DerivCondition{{r, 0}, {-1, 1}},
                   DerivCondition{{r, r}, {0, -1}}};
    upper.leg = r;
    QuadraticMap q1 = build_interpolant(src, lower);
    QuadraticMap q2 = build_interpolant(src, upper);
    double mismatch = verify_edge_continuity(q1, q2, Segment{{r, 0}, {0, r}}, 100);
    CHECK(mismatch > 1e-8);
}

TEST_CASE("edge continuity mismatch does not grow as r shrinks") {
    auto src = make_builtin_map("radial", {0.3});
    auto mismatch_at = [&](double r) {
        TriangleConditions lower;
        lower.vertex = {Point2{0.3, 0.4}, Point2{0.3 + r, 0.4}, Point2{0.3, 0.4 + r}};
        lower.deriv = {DerivCondition{{0.3, 0.4}, {1, 0}},
                       DerivCondition{{0.3, 0.4 + r}, {-1, 1}},
                       DerivCondition{{0.3, 0.4 + r}, {0, -1}}};
        lower.leg = r;
        TriangleConditions upper;
        upper.vertex = {Point2{0.3 + r, 0.4 + r}, Point2{0.3, 0.4 + r}, Point2{0.3 + r, 0.4}};
        upper.deriv = {DerivCondition{{0.3, 0.4 + r}, {1, 0}},
                       DerivCondition{{0.3, 0.4 + r}, {-1, 1}},
                       DerivCondition{{0.3 + r, 0.4 + r}, {0, -1}}};
        upper.leg = r;
        QuadraticMap q1 = build_interpolant(src, lower);
        QuadraticMap q2 = build_interpolant(src, upper);
        return verify_edge_continuity(q1, q2, Segment{{0.3 + r, 0.4}, {0.3, 0.4 + r}}, 64);
    };
    double m1 = mismatch_at(0.1);
    double m2 = mismatch_at(0.05);
    CHECK(m1 < 1e-11);
    CHECK(m2 < 2 * m1 + 1e-13);
}

TEST_CASE("edge_jump: zero for equal maps, c*l for constant jumps") {
    QuadraticMap q = QuadraticMap::identity();
    Segment edge{{0, 0}, {0, 1}};
    CHECK(edge_jump(q, q, edge).integral == 0.0);

    // Q2 = ((1+c)x, y): same values on {x=0}, constant normal jump c
    double c = 0.37;
    QuadraticMap q2 = QuadraticMap::identity();
    q2.a[1] = 1.0 + c;
    double len = 1.0;
    EdgeJump j = edge_jump(q, q2, edge);
    CHECK(j.integral == doctest::Approx(c * len).epsilon(1e-12));
    CHECK(j.pointwise(0.5) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("edge_jump of an affine jump integrates |affine| accurately") {
    QuadraticMap q1 = QuadraticMap::identity();
    QuadraticMap q2 = QuadraticMap::identity();
    q2.a[1] = 1.0 + 0.2;   // jump (0.2 + 0.4 y, 0) along x=0
    q2.a[4] = 0.4;
    Segment edge{{0, 0}, {0, 1}};
    double expect = 0.2 + 0.4 / 2;  // int_0^1 (0.2 + 0.4 y) dy
    CHECK(edge_jump(q1, q2, edge).integral == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("round-trip property: interpolate(eval(Q)) recovers Q up to the offset") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 10; ++t) {
        QuadraticMap src = random_quadratic(rng, 0.4);
        double r = 0.1 + 0.2 * (t % 3);
        TriangleConditions cond = TriangleConditions::reference(r);
        QuadraticMap q = build_interpolant(src.as_source(), cond);
        double rho = cond.avg_radius();
        Vec2 lap{2 * src.a[3] + 2 * src.a[5], 2 * src.b[3] + 2 * src.b[5]};
        QuadraticMap expect = src.shifted_value(lap * (rho * rho / 8.0)).recharted(q.chart);
        for (int i = 0; i < 6; ++i) {
            CHECK(q.a[i] == doctest::Approx(expect.a[i]).epsilon(1e-9).scale(1.0));
            CHECK(q.b[i] == doctest::Approx(expect.b[i]).epsilon(1e-9).scale(1.0));
        }
    }
}
