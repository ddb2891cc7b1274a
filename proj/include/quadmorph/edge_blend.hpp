#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "quadmorph/mesh.hpp"
#include "quadmorph/quadratic.hpp"

namespace qm {

/// Orthonormal chart attached to an edge: world p = origin + x ex + y ey,
/// ey along the edge, ex = ey rotated clockwise (so {ex, ey} is positively
/// oriented and x > 0 is the right-hand side of the edge direction).
struct EdgeChart {
    Vec2 origin;
    Vec2 ex, ey;
    double len = 0;

    static EdgeChart from_segment(const Segment& s) {
        EdgeChart c;
        c.origin = s.p0;
        c.ey = s.tangent();
        c.ex = c.ey.perp_cw();
        c.len = s.length();
        return c;
    }
    Vec2 to_chart(Point2 p) const {
        Vec2 rel = p - origin;
        return {dot(rel, ex), dot(rel, ey)};
    }
    Point2 to_world(Vec2 xy) const { return origin + ex * xy.x + ey * xy.y; }
};

struct EdgeBlendOptions {
    double safety = 0.9;          // applied to the maximal admissible r
    long n_cap = 1000000;         // hard cap of the admissible-N search
    double r_cap = std::numeric_limits<double>::infinity();  // external cap (vertex constraints)
    int boundary_samples = 512;   // polyline resolution of the r0 estimate
    double continuity_tol = 1e-10;
};

/// Smooth replacement of the normal-derivative jump across one edge:
/// a transition blend of the two adjacent quadratics on the strip
/// |x| <= r, with per-rectangle direction of the blend and composed
/// transitions where the direction flips.
struct EdgeBlend {
    EdgeChart chart;
    QuadraticMap q1, q2;   // original adjacent quadratics (q1 on x<0)
    QuadraticMap dq;       // q2 - q1 expressed in the edge chart
    ConstantsEstimate consts;
    double ell = 0;        // edge length
    double rho0 = 0;       // chart half width
    double rho = 0;        // rectangle half height, ell/(2N)
    long N = 0;
    double r = 0;          // blend half width
    double r0_geom = 0;    // geometric admissibility radius
    std::vector<uint8_t> type_a;  // 1-indexed: type_a[i] for rectangle i in 1..N

    /// Blend weight with world-coordinate gradient/Hessian at chart (x, y).
    ScalarJet blend_weight(double x, double y) const;

    /// World-coordinate jet of the blended map at chart point (x, y).
    /// Outside |x| > r this is exactly the jet of q1 (x < 0) or q2.
    Jet2 eval_chart(double x, double y) const;

    /// Same through world coordinates; throws OutOfChart outside the chart
    /// rectangle [-rho0, rho0] x [0, ell].
    Jet2 eval_world(Point2 p) const;

    bool in_strip_chart(double x, double y) const {
        return std::fabs(x) <= r && y >= 0.0 && y <= ell;
    }
    bool in_strip_world(Point2 p) const {
        Vec2 xy = chart.to_chart(p);
        return in_strip_chart(xy.x, xy.y);
    }

    /// Image direction frame of rectangle i: v = D_y q1 at the rectangle
    /// anchor (0, (2i-1) rho), normalized; u = clockwise perpendicular.
    void rect_frame(long i, Vec2& u, Vec2& v) const;
};

/// Parameter selection: smallest admissible N (>= 4), then the largest
/// admissible r scaled by `safety`. The geometric radius is estimated from
/// image polylines of the strip's short ends against the rest of the chart
/// boundary, divided by 2L.
EdgeBlend select_edge_params(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge,
                             const ConstantsEstimate& consts, double rho0,
                             const EdgeBlendOptions& opts = {});

/// Type of rectangle i (1-based): true for type a, i.e. the normal
/// derivative of q2 at the anchor dominates in the u direction (ties -> a).
bool classify_rect_type(const EdgeBlend& eb, long i);

struct Witness {
    double value = 0;
    Point2 at;
};

struct EdgeDiagnostics {
    Witness min_jacobian;     // over the strip
    Witness min_dxg_u;        // <D_x g, u> over the strip
    double max_dg = 0;        // sup |Dg| (operator norm)
    double d2_integral = 0;   // int over the strip of |D^2 g|
    double jump_integral = 0; // int over the edge of |D_xx f(0,y)|
    double budget_ratio = 0;  // d2_integral / (jump_integral + M ell r)
    double seam_mismatch = 0; // worst value mismatch across internal seams
    double jac_threshold = 0, dxu_threshold = 0, dg_threshold = 0;
    bool jacobian_ok = false, dxg_ok = false, dg_ok = false, seams_ok = false;

    bool ok() const { return jacobian_ok && dxg_ok && dg_ok && seams_ok; }
    void require_ok() const;
};

/// Samples the strip on a grid_res^2 midpoint grid; thresholds carry a 5%
/// sampling slack by default.
EdgeDiagnostics verify_edge(const EdgeBlend& eb, int grid_res, double slack = 0.05);

}  // namespace qm
