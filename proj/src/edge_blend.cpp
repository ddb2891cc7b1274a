#include "quadmorph/edge_blend.hpp"

#include <algorithm>
#include <cmath>

namespace qm {

void EdgeBlend::rect_frame(long i, Vec2& u, Vec2& v) const {
    Point2 anchor = chart.to_world({0.0, (2.0 * i - 1.0) * rho});
    v = q1.eval(anchor).dir_derivative(chart.ey).normalized();
    u = v.perp_cw();
}

bool classify_rect_type(const EdgeBlend& eb, long i) {
    Vec2 u, v;
    eb.rect_frame(i, u, v);
    Point2 anchor = eb.chart.to_world({0.0, (2.0 * i - 1.0) * eb.rho});
    double lhs = dot(eb.q2.eval(anchor).dir_derivative(eb.chart.ex), u);
    double rhs = dot(eb.q1.eval(anchor).dir_derivative(eb.chart.ex), u);
    return lhs >= rhs;
}

ScalarJet EdgeBlend::blend_weight(double x, double y) const {
    // Gradients of the chart coordinates in world coordinates are the
    // constant frame vectors.
    ScalarJet xj{x, chart.ex, Mat2::zero()};

    long i = std::clamp(static_cast<long>(std::floor(y / (2.0 * rho))) + 1, 1L, N);
    long m = static_cast<long>(std::floor(y / rho));
    bool a_here = type_a[static_cast<size_t>(i)] != 0;

    if (m >= 2 && m % 2 == 0 && m / 2 <= N - 1) {
        long k = m / 2;  // transition band [2k rho, (2k+1) rho] between rects k, k+1
        bool a_lo = type_a[static_cast<size_t>(k)] != 0;
        bool a_hi = type_a[static_cast<size_t>(k + 1)] != 0;
        if (a_lo != a_hi) {
            ScalarJet yj{y / rho - 2.0 * k, chart.ey * (1.0 / rho), Mat2::zero()};
            ScalarJet ey_eta = chain(eta_jet(yj.v), yj);
            if (a_lo) {
                // a) -> b): eta(x/r + eta(y/rho - 2k))
                ScalarJet u = xj * (1.0 / r) + ey_eta;
                return chain(eta_jet(u.v), u);
            }
            // b) -> a): eta((x+r)/r - eta(y/rho - 2k))
            ScalarJet u = (xj + ScalarJet::constant(r)) * (1.0 / r) - ey_eta;
            return chain(eta_jet(u.v), u);
        }
    }
    ScalarJet u = a_here ? xj * (1.0 / r) : (xj + ScalarJet::constant(r)) * (1.0 / r);
    return chain(eta_jet(u.v), u);
}

Jet2 EdgeBlend::eval_chart(double x, double y) const {
    Point2 p = chart.to_world({x, y});
    // Fast exits keep the map bit-identical to the inputs off the strip.
    if (x <= -r) return q1.eval(p);
    if (x >= r) return q2.eval(p);
    ScalarJet lam = blend_weight(x, y);
    if (lam.v == 0.0 && lam.g.x == 0.0 && lam.g.y == 0.0) return q1.eval(p);
    if (lam.v == 1.0 && lam.g.x == 0.0 && lam.g.y == 0.0) return q2.eval(p);
    return apply_blend(q1.eval(p), dq.eval(p), lam);
}

Jet2 EdgeBlend::eval_world(Point2 p) const {
    Vec2 xy = chart.to_chart(p);
    if (std::fabs(xy.x) > rho0 || xy.y < -rho0 || xy.y > ell + rho0)
        throw OutOfChart("edge chart query at x=" + std::to_string(xy.x) +
                         " y=" + std::to_string(xy.y));
    return eval_chart(xy.x, xy.y);
}

namespace {

double polyline_min_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : a)
        for (const Vec2& q : b) best = std::min(best, (p - q).norm2());
    return std::sqrt(best);
}

}  // namespace

EdgeBlend select_edge_params(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge,
                             const ConstantsEstimate& consts, double rho0,
                             const EdgeBlendOptions& opts) {
    consts.validate();
    double ell = edge.length();
    if (!(ell > 0)) throw InvalidParams("degenerate edge");
    if (!(rho0 > 0)) throw InvalidParams("edge chart half-width must be positive");

    double scale = std::max({1.0, q1.eval_value(edge.p0).norm(), q1.eval_value(edge.p1).norm()});
    double mismatch = verify_edge_continuity(q1, q2, edge, 100);
    if (mismatch > opts.continuity_tol * scale)
        throw EdgeMismatch("maps differ on the edge by " + std::to_string(mismatch));

    EdgeBlend eb;
    eb.chart = EdgeChart::from_segment(edge);
    eb.q1 = q1;
    eb.q2 = q2;
    eb.consts = consts;
    eb.ell = ell;
    eb.rho0 = rho0;

    const double d = consts.d, L = consts.L, M = consts.M;
    double rho_bound = std::min(rho0, d / (1000.0 * (M + 1.0) * (L + 1.0)));
    if (M > 0) rho_bound = std::min(rho_bound, d * d / (320.0 * M * L * L * L));

    long n = std::max<long>(4, static_cast<long>(std::floor(ell / (2.0 * rho_bound))) + 1);
    while (!(ell / (2.0 * n) < rho_bound)) {
        ++n;
        if (n > opts.n_cap)
            throw ConstraintUnsatisfiable("no admissible N below the cap (constants too degenerate)");
    }
    if (n > opts.n_cap)
        throw ConstraintUnsatisfiable("no admissible N below the cap (constants too degenerate)");
    eb.N = n;
    eb.rho = ell / (2.0 * n);

    // Chart-local difference polynomial; evaluating it avoids cancellation
    // when the two quadratics nearly coincide.
    Chart ec;
    ec.origin = eb.chart.origin;
    ec.rot = Mat2{{{eb.chart.ex.x, eb.chart.ey.x}, {eb.chart.ex.y, eb.chart.ey.y}}};
    eb.dq = q1.recharted(ec).diff_in_chart(q2.recharted(ec));

    eb.type_a.assign(static_cast<size_t>(n) + 1, 0);
    for (long i = 1; i <= n; ++i) eb.type_a[static_cast<size_t>(i)] = classify_rect_type(eb, i) ? 1 : 0;

    double r_tent = std::min(eb.rho * eb.rho / (2.0 * (L + 1.0)), eb.rho / 40.0);
    if (M > 0) r_tent = std::min(r_tent, 2.0 * M * eb.rho * eb.rho / L);
    r_tent = std::min(r_tent, opts.r_cap);
    if (!(r_tent > 0)) throw ConstraintUnsatisfiable("no positive blend width");

    // Geometric admissibility: the images of the strip's short ends must
    // stay clear of the image of the rest of the chart boundary.
    int ns = std::max(2, opts.boundary_samples);
    auto f_of_chart = [&](double x, double y) {
        Point2 p = eb.chart.to_world({x, y});
        return x < 0.0 ? q1.eval_value(p) : q2.eval_value(p);
    };
    auto sample_line = [&](Vec2 a, Vec2 b) {
        std::vector<Vec2> pts(static_cast<size_t>(ns));
        for (int k = 0; k < ns; ++k) {
            double t = static_cast<double>(k) / (ns - 1);
            pts[static_cast<size_t>(k)] = f_of_chart(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
        }
        return pts;
    };
    std::vector<Vec2> end0 = sample_line({-r_tent, 0}, {r_tent, 0});
    std::vector<Vec2> end1 = sample_line({-r_tent, ell}, {r_tent, ell});
    std::vector<Vec2> left = sample_line({-rho0, 0}, {-rho0, ell});
    std::vector<Vec2> right = sample_line({rho0, 0}, {rho0, ell});
    std::vector<Vec2> top = sample_line({-rho0, ell}, {rho0, ell});
    std::vector<Vec2> bottom = sample_line({-rho0, 0}, {rho0, 0});
    double d0 = std::min({polyline_min_distance(end0, left), polyline_min_distance(end0, right),
                          polyline_min_distance(end0, top)});
    double d1 = std::min({polyline_min_distance(end1, left), polyline_min_distance(end1, right),
                          polyline_min_distance(end1, bottom)});
    eb.r0_geom = std::min(d0, d1) / (2.0 * L);

    eb.r = opts.safety * std::min(r_tent, eb.r0_geom);
    if (!(eb.r > 0) || !std::isfinite(eb.r))
        throw ConstraintUnsatisfiable("geometric radius collapsed to zero");
    return eb;
}

void EdgeDiagnostics::require_ok() const {
    if (!jacobian_ok)
        throw BoundViolation("strip jacobian " + std::to_string(min_jacobian.value) + " below " +
                                 std::to_string(jac_threshold),
                             min_jacobian.at.x, min_jacobian.at.y);
    if (!dxg_ok)
        throw BoundViolation("strip <D_x g, u> " + std::to_string(min_dxg_u.value) + " below " +
                                 std::to_string(dxu_threshold),
                             min_dxg_u.at.x, min_dxg_u.at.y);
    if (!dg_ok) throw BoundViolation("strip |Dg| above 8L", min_jacobian.at.x, min_jacobian.at.y);
    if (!seams_ok)
        throw BoundViolation("seam mismatch " + std::to_string(seam_mismatch), min_jacobian.at.x,
                             min_jacobian.at.y);
}

EdgeDiagnostics verify_edge(const EdgeBlend& eb, int grid_res, double slack) {
    EdgeDiagnostics d;
    d.min_jacobian.value = std::numeric_limits<double>::infinity();
    d.min_dxg_u.value = std::numeric_limits<double>::infinity();

    double cell_x = 2.0 * eb.r / grid_res;
    double cell_y = eb.ell / grid_res;
    for (int j = 0; j < grid_res; ++j) {
        double y = (j + 0.5) * cell_y;
        Vec2 u, v;
        {
            Point2 on_edge = eb.chart.to_world({0.0, y});
            v = eb.q1.eval(on_edge).dir_derivative(eb.chart.ey).normalized();
            u = v.perp_cw();
        }
        for (int i = 0; i < grid_res; ++i) {
            double x = -eb.r + (i + 0.5) * cell_x;
            Jet2 g = eb.eval_chart(x, y);
            Point2 p = eb.chart.to_world({x, y});
            double jac = g.jacobian();
            if (jac < d.min_jacobian.value) d.min_jacobian = {jac, p};
            double dxu = dot(g.dir_derivative(eb.chart.ex), u);
            if (dxu < d.min_dxg_u.value) d.min_dxg_u = {dxu, p};
            d.max_dg = std::max(d.max_dg, g.D.opnorm());
            d.d2_integral += g.D2.entry_abs_sum() * cell_x * cell_y;
        }
    }

    d.jump_integral = edge_jump(eb.q1, eb.q2, Segment{eb.chart.origin,
                                                      eb.chart.to_world({0.0, eb.ell})})
                          .integral;
    double denom = d.jump_integral + eb.consts.M * eb.ell * eb.r;
    d.budget_ratio = denom > 0 ? d.d2_integral / denom : 0.0;

    // Seams: strip boundary against the pure quadratics, and transition-band
    // boundaries against the pure rectangle formulas.
    double worst = 0.0;
    int ns = 40;
    for (int k = 0; k <= ns; ++k) {
        double y = eb.ell * k / ns;
        Point2 pl = eb.chart.to_world({-eb.r, y});
        Point2 pr = eb.chart.to_world({eb.r, y});
        worst = std::max(worst, (eb.eval_chart(-eb.r, y).value - eb.q1.eval_value(pl)).norm());
        worst = std::max(worst, (eb.eval_chart(eb.r, y).value - eb.q2.eval_value(pr)).norm());
    }
    long bands_checked = 0;
    for (long k = 1; k <= eb.N - 1 && bands_checked < 12; ++k) {
        if (eb.type_a[static_cast<size_t>(k)] == eb.type_a[static_cast<size_t>(k + 1)]) continue;
        ++bands_checked;
        for (int i = 0; i <= 24; ++i) {
            double x = -eb.r + 2.0 * eb.r * i / 24;
            // band entry (y = 2k rho): composed formula vs pure rect k
            double ylo = 2.0 * k * eb.rho;
            double yhi = (2.0 * k + 1.0) * eb.rho;
            Vec2 below = eb.eval_chart(x, std::nextafter(ylo, 0.0)).value;
            Vec2 inside = eb.eval_chart(x, ylo).value;
            worst = std::max(worst, (below - inside).norm());
            Vec2 above = eb.eval_chart(x, std::nextafter(yhi, eb.ell)).value;
            Vec2 inside2 = eb.eval_chart(x, yhi).value;
            worst = std::max(worst, (above - inside2).norm());
        }
    }
    d.seam_mismatch = worst;

    d.jac_threshold = 0.8 * eb.consts.d * (1.0 - slack);
    d.dxu_threshold = 0.9 * eb.consts.d / eb.consts.L * (1.0 - slack);
    d.dg_threshold = 8.0 * eb.consts.L * (1.0 + slack);
    d.jacobian_ok = d.min_jacobian.value >= d.jac_threshold;
    d.dxg_ok = d.min_dxg_u.value >= d.dxu_threshold;
    d.dg_ok = d.max_dg <= d.dg_threshold;
    d.seams_ok = d.seam_mismatch < 1e-9;
    return d;
}

}  // namespace qm
