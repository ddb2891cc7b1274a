#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "quadmorph/errors.hpp"

namespace qm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double px, double py) : x(px), y(py) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    /// Rotation by +90 degrees (anti-clockwise).
    Vec2 perp() const { return {-y, x}; }
    /// Rotation by -90 degrees (clockwise).
    Vec2 perp_cw() const { return {y, -x}; }
    Vec2 normalized() const {
        double n = norm();
        if (!(n > 0.0)) throw NonFiniteValue("normalizing zero/NaN vector");
        return {x / n, y / n};
    }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

using Point2 = Vec2;

struct Mat2 {
    // m[i][j] = entry in row i, column j.
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    static Mat2 identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }
    static Mat2 rotation(double angle) {
        double c = std::cos(angle), s = std::sin(angle);
        return Mat2{{{c, -s}, {s, c}}};
    }
    static Mat2 zero() { return Mat2{}; }

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    Vec2 apply(Vec2 v) const {
        return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
    }
    Vec2 apply_transposed(Vec2 v) const {
        return {m[0][0] * v.x + m[1][0] * v.y, m[0][1] * v.x + m[1][1] * v.y};
    }
    Mat2 transposed() const { return Mat2{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }
    Mat2 operator*(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }
    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat2 operator*(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }

    /// Largest singular value.
    double opnorm() const {
        double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
        double t1 = a * a + b * b + c * c + d * d;
        double t2 = std::hypot(a * a + b * b - c * c - d * d, 2.0 * (a * c + b * d));
        return std::sqrt(0.5 * (t1 + t2));
    }
    double frobenius() const {
        return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                         m[1][1] * m[1][1]);
    }
    double entry_abs_sum() const {
        return std::fabs(m[0][0]) + std::fabs(m[0][1]) + std::fabs(m[1][0]) + std::fabs(m[1][1]);
    }
    bool finite() const {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (!std::isfinite(m[i][j])) return false;
        return true;
    }
};

/// Second-derivative tensor of a planar map: t[c][i][j] = d^2 f_c / dx_i dx_j.
struct Tensor222 {
    double t[2][2][2] = {};

    double& operator()(int c, int i, int j) { return t[c][i][j]; }
    double operator()(int c, int i, int j) const { return t[c][i][j]; }

    Tensor222 operator+(const Tensor222& o) const {
        Tensor222 r;
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) r.t[c][i][j] = t[c][i][j] + o.t[c][i][j];
        return r;
    }
    Tensor222 operator-(const Tensor222& o) const {
        Tensor222 r;
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) r.t[c][i][j] = t[c][i][j] - o.t[c][i][j];
        return r;
    }
    Tensor222 operator*(double s) const {
        Tensor222 r;
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) r.t[c][i][j] = t[c][i][j] * s;
        return r;
    }
    /// Sum of the absolute values of all 8 entries; the |D^2| convention
    /// used for every second-derivative integrand in this project.
    double entry_abs_sum() const {
        double s = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) s += std::fabs(t[c][i][j]);
        return s;
    }
    double mixed_symmetry_gap() const {
        return std::max(std::fabs(t[0][0][1] - t[0][1][0]), std::fabs(t[1][0][1] - t[1][1][0]));
    }
    bool finite() const {
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (!std::isfinite(t[c][i][j])) return false;
        return true;
    }
    /// Directional second derivative D^2 f (u, v) as a vector in R^2.
    Vec2 bilinear(Vec2 u, Vec2 v) const {
        Vec2 r;
        double uu[2] = {u.x, u.y}, vv[2] = {v.x, v.y};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                r.x += t[0][i][j] * uu[i] * vv[j];
                r.y += t[1][i][j] * uu[i] * vv[j];
            }
        return r;
    }
};

/// Two-jet of a planar map at a point: value, first and second derivative.
struct Jet2 {
    Vec2 value;
    Mat2 D;
    Tensor222 D2;

    double jacobian() const { return D.det(); }
    Vec2 dir_derivative(Vec2 u) const { return D.apply(u); }
    bool finite() const { return value.finite() && D.finite() && D2.finite(); }
};

/// Two-jet of a scalar field: value, gradient, Hessian.
struct ScalarJet {
    double v = 0.0;
    Vec2 g;
    Mat2 h;

    ScalarJet() = default;
    ScalarJet(double val, Vec2 grad, Mat2 hess) : v(val), g(grad), h(hess) {}
    static ScalarJet constant(double c) { return {c, {0, 0}, Mat2::zero()}; }

    ScalarJet operator+(const ScalarJet& o) const { return {v + o.v, g + o.g, h + o.h}; }
    ScalarJet operator-(const ScalarJet& o) const { return {v - o.v, g - o.g, h - o.h}; }
    ScalarJet operator*(double s) const { return {v * s, g * s, h * s}; }
    ScalarJet operator*(const ScalarJet& o) const {
        Mat2 hh = h * o.v + o.h * v;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                hh.m[i][j] += gi(i) * o.gi(j) + gi(j) * o.gi(i);
        return {v * o.v, g * o.v + o.g * v, hh};
    }
    double gi(int i) const { return i == 0 ? g.x : g.y; }
};

/// Value/derivative triple of a one-variable function, for chain rules.
struct Val3 {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

/// Chain rule: outer(inner(p)) for a scalar field inner and 1-D outer jet.
inline ScalarJet chain(const Val3& outer, const ScalarJet& inner) {
    ScalarJet r;
    r.v = outer.v;
    r.g = inner.g * outer.d1;
    r.h = inner.h * outer.d1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.h.m[i][j] += outer.d2 * inner.gi(i) * inner.gi(j);
    return r;
}

/// Jet of base + lam * diff for a scalar blend weight lam with spatial
/// dependence (product and chain rule expanded through second order).
inline Jet2 apply_blend(const Jet2& base, const Jet2& diff, const ScalarJet& lam) {
    Jet2 g;
    g.value = base.value + diff.value * lam.v;
    double dv[2] = {diff.value.x, diff.value.y};
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            g.D.m[c][i] = base.D.m[c][i] + lam.v * diff.D.m[c][i] + dv[c] * lam.gi(i);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                g.D2(c, i, j) = base.D2(c, i, j) + lam.v * diff.D2(c, i, j) +
                                lam.gi(i) * diff.D.m[c][j] + lam.gi(j) * diff.D.m[c][i] +
                                dv[c] * lam.h.m[i][j];
    return g;
}

// ---------------------------------------------------------------------------
// Transition function eta.
//
// The fixed smooth ramp used by every blend in the project:
//   eta(x) = 0 for x <= 0, 1 for x >= 1, strictly increasing in between,
// realized as g(x)/(g(x)+g(1-x)) with g(t) = exp(-1/t).
// eta'(1/2) = 2 exactly by symmetry; the measured sup of |eta''| is
// available from transition_second_derivative_bound().
// ---------------------------------------------------------------------------

/// eta and derivatives; order must be 0, 1 or 2.
double eta(double x, int order);

/// eta, eta', eta'' at x in one call.
Val3 eta_jet(double x);

/// Numerically measured sup over [0,1] of |eta''| (dense scan, cached).
double transition_second_derivative_bound();

/// Numerically measured sup over [0,1] of eta' (dense scan, cached).
double transition_first_derivative_bound();

// ---------------------------------------------------------------------------
// Quadrature and finite differences.
// ---------------------------------------------------------------------------

/// Mean value of a scalar field over the disk B(center, radius).
/// Fixed 4 (Gauss-Legendre radial) x 8 (uniform angular) product rule,
/// exact for polynomials of total degree <= 4.
double disk_average(const std::function<double(Point2)>& field, Point2 center, double radius);

/// Mean value of a vector field over the disk B(center, radius).
Vec2 disk_average(const std::function<Vec2(Point2)>& field, Point2 center, double radius);

struct FdOptions {
    double scale = 1.0;          // local length scale r
    double rel_step = 1e-5;      // h = rel_step * scale, clamped below
    double min_step = 1e-9;
    double max_step = 1e-2;
};

/// Central-difference two-jet of a planar map (O(h^2) first and second
/// derivatives, mixed partials symmetrized).
Jet2 fd_jet(const std::function<Vec2(Point2)>& map, Point2 p, double h);

/// fd_jet with the default step policy h = 1e-5 * scale clamped to
/// [1e-9, 1e-2].
Jet2 fd_jet_auto(const std::function<Vec2(Point2)>& map, Point2 p, const FdOptions& opts = {});

/// Determinant through an arbitrary pair of positively oriented orthonormal
/// bases {u, v} (domain) and {ub, vb} (image):
///   <D_u f, ub><D_v f, vb> - <D_u f, vb><D_v f, ub>.
/// Equals det D for any such bases.
double det_in_bases(const Mat2& D, Vec2 u, Vec2 v, Vec2 ub, Vec2 vb);

inline void ensure_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteValue(what);
}
inline void ensure_finite(Vec2 v, const char* what) {
    if (!v.finite()) throw NonFiniteValue(what);
}
inline void ensure_finite(const Jet2& j, const char* what) {
    if (!j.finite()) throw NonFiniteValue(what);
}

}  // namespace qm
