#include "quadmorph/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qm {

namespace {

// g(t) = exp(-1/t) for t > 0, else 0, with derivatives.
// g'(t) = g(t)/t^2, g''(t) = g(t)(1 - 2t)/t^4.
struct GJet {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

GJet g_jet(double t) {
    GJet r;
    if (t <= 0.0) return r;
    double v = std::exp(-1.0 / t);
    if (v == 0.0) return r;  // underflow: flat to machine precision
    double t2 = t * t;
    r.v = v;
    r.d1 = v / t2;
    r.d2 = v * (1.0 - 2.0 * t) / (t2 * t2);
    return r;
}

}  // namespace

Val3 eta_jet(double x) {
    if (!(std::isfinite(x))) throw NonFiniteValue("eta argument");
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0, 0.0};
    GJet a = g_jet(x);
    GJet b = g_jet(1.0 - x);
    double bv = b.v, bd1 = -b.d1, bd2 = b.d2;  // derivatives of g(1-x) in x
    double s = a.v + bv;
    if (s == 0.0) return {x < 0.5 ? 0.0 : 1.0, 0.0, 0.0};  // deep flats, both underflow
    double s1 = a.d1 + bd1;
    double s2 = a.d2 + bd2;
    double v = a.v / s;
    double d1 = (a.d1 * s - a.v * s1) / (s * s);
    double d2 = (a.d2 * s - a.v * s2) / (s * s) - 2.0 * s1 * (a.d1 * s - a.v * s1) / (s * s * s);
    return {v, d1, d2};
}

double eta(double x, int order) {
    Val3 j = eta_jet(x);
    switch (order) {
        case 0: return j.v;
        case 1: return j.d1;
        case 2: return j.d2;
        default: throw InvalidParams("eta order must be 0, 1 or 2");
    }
}

namespace {

double measured_sup(int order) {
    // Dense scan plus local refinement; the function is smooth so this is
    // accurate to ~1e-10 on the refined grid.
    const int n = 200000;
    double best = 0.0, bestx = 0.5;
    for (int i = 1; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        double v = std::fabs(eta(x, order));
        if (v > best) {
            best = v;
            bestx = x;
        }
    }
    double lo = bestx - 2.0 / n, hi = bestx + 2.0 / n;
    for (int pass = 0; pass < 60; ++pass) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (std::fabs(eta(m1, order)) < std::fabs(eta(m2, order)))
            lo = m1;
        else
            hi = m2;
    }
    return std::fabs(eta(0.5 * (lo + hi), order));
}

}  // namespace

double transition_second_derivative_bound() {
    static const double bound = measured_sup(2);
    return bound;
}

double transition_first_derivative_bound() {
    static const double bound = measured_sup(1);
    return bound;
}

namespace {

// 4-point Gauss-Legendre nodes/weights on [0,1].
constexpr double kGlNode[4] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                               0.9305681557970263};
constexpr double kGlWeight[4] = {0.17392742256872692, 0.3260725774312731, 0.3260725774312731,
                                 0.17392742256872692};
constexpr int kAngular = 8;

template <typename T>
T disk_average_impl(const std::function<T(Point2)>& field, Point2 center, double radius) {
    if (!(radius > 0.0)) throw InvalidParams("disk_average radius must be positive");
    if (!center.finite()) throw NonFiniteValue("disk_average center");
    // mean = (1/pi) * sum_angles (2pi/8) * sum_radial w_j * u_j * f(c + R u_j w_k)
    T acc{};
    for (int k = 0; k < kAngular; ++k) {
        double th = 2.0 * M_PI * k / kAngular;
        double c = std::cos(th), s = std::sin(th);
        for (int j = 0; j < 4; ++j) {
            double u = kGlNode[j];
            Point2 p{center.x + radius * u * c, center.y + radius * u * s};
            acc = acc + field(p) * (kGlWeight[j] * u);
        }
    }
    acc = acc * (2.0 / kAngular);
    return acc;
}

}  // namespace

double disk_average(const std::function<double(Point2)>& field, Point2 center, double radius) {
    double r = disk_average_impl<double>(field, center, radius);
    ensure_finite(r, "disk_average result");
    return r;
}

Vec2 disk_average(const std::function<Vec2(Point2)>& field, Point2 center, double radius) {
    Vec2 r = disk_average_impl<Vec2>(field, center, radius);
    ensure_finite(r, "disk_average result");
    return r;
}

Jet2 fd_jet(const std::function<Vec2(Point2)>& map, Point2 p, double h) {
    if (!(h > 0.0)) throw InvalidParams("fd_jet step must be positive");
    Jet2 j;
    Vec2 f00 = map(p);
    Vec2 fpx = map({p.x + h, p.y});
    Vec2 fmx = map({p.x - h, p.y});
    Vec2 fpy = map({p.x, p.y + h});
    Vec2 fmy = map({p.x, p.y - h});
    Vec2 fpp = map({p.x + h, p.y + h});
    Vec2 fpm = map({p.x + h, p.y - h});
    Vec2 fmp = map({p.x - h, p.y + h});
    Vec2 fmm = map({p.x - h, p.y - h});

    j.value = f00;
    Vec2 dx = (fpx - fmx) / (2.0 * h);
    Vec2 dy = (fpy - fmy) / (2.0 * h);
    j.D.m[0][0] = dx.x;
    j.D.m[1][0] = dx.y;
    j.D.m[0][1] = dy.x;
    j.D.m[1][1] = dy.y;

    Vec2 dxx = (fpx - f00 * 2.0 + fmx) / (h * h);
    Vec2 dyy = (fpy - f00 * 2.0 + fmy) / (h * h);
    Vec2 dxy = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    for (int c = 0; c < 2; ++c) {
        double xx = c == 0 ? dxx.x : dxx.y;
        double yy = c == 0 ? dyy.x : dyy.y;
        double xy = c == 0 ? dxy.x : dxy.y;
        j.D2(c, 0, 0) = xx;
        j.D2(c, 1, 1) = yy;
        j.D2(c, 0, 1) = xy;
        j.D2(c, 1, 0) = xy;
    }
    ensure_finite(j, "fd_jet result");
    return j;
}

Jet2 fd_jet_auto(const std::function<Vec2(Point2)>& map, Point2 p, const FdOptions& opts) {
    double h = std::clamp(opts.rel_step * opts.scale, opts.min_step, opts.max_step);
    return fd_jet(map, p, h);
}

double det_in_bases(const Mat2& D, Vec2 u, Vec2 v, Vec2 ub, Vec2 vb) {
    Vec2 du = D.apply(u);
    Vec2 dv = D.apply(v);
    return dot(du, ub) * dot(dv, vb) - dot(du, vb) * dot(dv, ub);
}

}  // namespace qm
