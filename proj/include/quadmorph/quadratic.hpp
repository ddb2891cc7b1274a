#pragma once

#include <array>
#include <optional>
#include <vector>

#include "quadmorph/geometry.hpp"
#include "quadmorph/map_source.hpp"

namespace qm {

/// Affine chart placement: world p = origin + rot * q for local coords q.
struct Chart {
    Vec2 origin;
    Mat2 rot = Mat2::identity();

    Vec2 to_local(Point2 p) const { return rot.apply_transposed(p - origin); }
    Point2 to_world(Vec2 q) const { return origin + rot.apply(q); }
};

/// One component pair of quadratic polynomials
///   f(q) = [a1 + a2 qx + a3 qy + a4 qx^2 + a5 qx qy + a6 qy^2,  b1 + ...]
/// expressed in a local chart; evaluation returns world-coordinate jets.
struct QuadraticMap {
    std::array<double, 6> a{};  // first component
    std::array<double, 6> b{};  // second component
    Chart chart;

    static QuadraticMap identity();
    static QuadraticMap linear(const Mat2& A, Vec2 offset);

    /// Exact value, derivative and (constant) second derivative at world p.
    Jet2 eval(Point2 p) const;
    Vec2 value(Point2 p) const { return eval_value(p); }
    Vec2 eval_value(Point2 p) const;

    /// The same polynomial re-expressed in another chart (exact coefficient
    /// transformation, no refitting).
    QuadraticMap recharted(const Chart& target) const;

    /// Coefficient-wise difference; both maps must share the same chart.
    QuadraticMap diff_in_chart(const QuadraticMap& other) const;

    QuadraticMap shifted_value(Vec2 offset) const;  // adds offset to the map value

    MapSource as_source() const;
};

/// One derivative interpolation condition: directional derivative along
/// `direction` (unnormalized) matched at `anchor`.
struct DerivCondition {
    Point2 anchor;
    Vec2 direction;
};

/// The six interpolation conditions for one triangle: averaged values at the
/// three vertices plus one averaged tangential derivative per edge at that
/// edge's canonical anchor.
struct TriangleConditions {
    std::array<Point2, 3> vertex;  // v1 = right-angle vertex for grid triangles
    std::array<DerivCondition, 3> deriv;
    double leg = 0.0;              // leg length r
    double avg_radius_factor = 0.1;  // averaging radius = factor * leg

    double avg_radius() const { return avg_radius_factor * leg; }

    /// Reference triangle v1=(0,0), v2=(r,0), v3=(0,r) with the canonical
    /// scheme: D_x at v1, (-D_x+D_y) at v3, -D_y at v3.
    static TriangleConditions reference(double r);
};

/// The 6x6 interpolation system M a = c assembled from conditions in the
/// chart with origin at v1 (rows in condition order: three values, then the
/// three derivative conditions).
struct InterpolationSystem {
    double M[6][6] = {};
    Chart chart;  // assembly chart (translation to v1, identity rotation)
    double leg = 0.0;

    static InterpolationSystem assemble(const TriangleConditions& cond);

    /// Solve M a = c for one component (partial-pivot elimination).
    std::array<double, 6> solve(const std::array<double, 6>& c) const;

    /// max |M a - c|_inf for a given candidate solution.
    double residual(const std::array<double, 6>& coeff, const std::array<double, 6>& c) const;

    /// 1-norm condition estimate ||M||_1 * ||M^-1||_1 after row scaling.
    double condition_estimate() const;
};

/// Solve the six interpolation conditions per component and return the
/// quadratic map in the system's chart. Throws SingularSystem if the
/// assembled matrix is numerically singular.
QuadraticMap solve_coefficients(const TriangleConditions& cond, const std::array<double, 6>& c1,
                                const std::array<double, 6>& c2);

/// Build the averaged-data interpolant of `src` on a triangle: vertex values
/// and anchored tangential derivatives are disk averages of radius
/// leg * avg_radius_factor, matched exactly by the quadratic.
QuadraticMap build_interpolant(const MapSource& src, const TriangleConditions& cond);

/// Condition values (disk averages of src) in system row order, per component.
void interpolation_rhs(const MapSource& src, const TriangleConditions& cond,
                       std::array<double, 6>& c1, std::array<double, 6>& c2);

struct Segment {
    Point2 p0;
    Point2 p1;

    double length() const { return (p1 - p0).norm(); }
    Vec2 tangent() const { return (p1 - p0).normalized(); }
    /// Unit normal (clockwise from the tangent).
    Vec2 normal() const { return tangent().perp_cw(); }
    Point2 at(double s) const { return p0 + (p1 - p0) * s; }  // s in [0,1]
};

struct EdgeJump {
    double integral = 0.0;                // int_edge |D_n Q2 - D_n Q1| ds
    std::function<double(double)> pointwise;  // jump magnitude at arclength parameter in [0,1]
};

/// Normal-derivative jump across a shared edge; the integral uses a 32-node
/// Gauss rule on the |affine| integrand.
EdgeJump edge_jump(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge);

/// Max |Q1 - Q2| over uniformly spaced samples of the edge.
double verify_edge_continuity(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge,
                              int samples);

/// Paper-form reference inverse of the reference-triangle system at leg r,
/// rows ordered (a1..a6); row 5 (a5) is the one the printed system leaves
/// ambiguous and is excluded from consistency checks.
std::array<std::array<double, 6>, 6> reference_inverse_rows(double r);

}  // namespace qm
