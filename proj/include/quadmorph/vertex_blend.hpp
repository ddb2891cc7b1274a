#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "quadmorph/edge_blend.hpp"
#include "quadmorph/mesh.hpp"
#include "quadmorph/quadratic.hpp"

namespace qm {

/// A fan of quadratics around a center point: quad[i] acts on the angular
/// sector between ray i and ray i+1 (indices mod count). Values are stored
/// centered: the common value at the center is split off into image_offset
/// so the centered fan maps the center to the origin.
struct VertexFan {
    Point2 center;
    Vec2 image_offset;
    int count = 0;
    std::vector<double> angle;      // strictly increasing, in [0, 2pi)
    std::vector<Vec2> ray;          // unit vectors
    std::vector<QuadraticMap> quad; // centered
    double rho0 = 0;                // radius on which the fan is trusted

    double omega_star() const;
    int sector_of(double theta) const;
    /// Centered piecewise evaluation (the raw fan map f).
    Jet2 eval_fan(Point2 p) const;
    Vec2 value_fan(Point2 p) const { return eval_fan(p).value; }
    /// Piecewise linear comparison map h(z) = DQ_sector(center) (z - center).
    Jet2 eval_tangent_fan(Point2 p) const;

    /// Validates angles and ray continuity (consecutive quadratics must
    /// agree along shared rays to 1e-10 relative).
    static VertexFan build(Point2 center, const std::vector<double>& angles,
                           const std::vector<QuadraticMap>& quads, double rho0);
};

struct VertexOptions {
    double safety = 0.9;
    double R_cap = std::numeric_limits<double>::infinity();
    double continuity_tol = 1e-10;
};

/// Per-ray strip blend inside the fan (the rotated edge construction).
struct RayBlend {
    Vec2 dir;        // the ray
    Vec2 ex, ey;     // pseudo-edge chart: ey = dir, ex clockwise perp
    bool type_a = true;
    double r = 0;    // half width r_i
    double rho = 0;  // outer reach rho_i
    int cw = 0, ccw = 0;  // fan sector indices on each side of the ray
    QuadraticMap dq;      // Q_cw - Q_ccw in the ray chart
};

/// The vertex smoothing: ray blends on the bands O_i (active for
/// t in [R/2, rho_i], |s| <= r_i) and the polar radius/angle interpolation
/// to the linear core lambda * z on B(center, 6R/8).
struct VertexBlend {
    VertexFan fan;
    ConstantsEstimate consts;
    double R = 0;
    double lambda = 0;  // d / (4 L)
    std::vector<RayBlend> rays;
    std::vector<double> r_caps;  // the per-ray admissibility list
    bool rho_chain_ok = true;    // the parameter-chain inequality on rho_i (recorded)

    /// Centered blended fan (f with the ray bands smoothed).
    Jet2 tilde_f(Point2 p) const;

    /// The smoothed map: equals image_offset + tilde_f outside B(center, R),
    /// image_offset + lambda (p - center) on B(center, 6R/8), and the polar
    /// radius/angle blend in between. Valid for |p - center| <= 2R.
    Jet2 eval(Point2 p) const;

    /// Radial derivative of the blended radius and angular derivative of the
    /// lifted blended angle at polar coordinates (t, theta); the computable
    /// diffeomorphism surrogate.
    void polar_derivatives(double t, double theta, double& dRg_dt, double& dphig_dtheta) const;
};

/// Parameter selection for a vertex: R = safety * min(rho_i)/2 (capped),
/// lambda = d/(4L), per-ray r_i validated against the admissibility list
/// min{d^2 R/(432 L^4), R d/(1200 L^2), rho_i^2/(2(L+1)), (R/2) tan(w*/3)}.
VertexBlend select_vertex_params(const VertexFan& fan, const ConstantsEstimate& consts,
                                 const std::vector<double>& rho_i, const std::vector<double>& r_i,
                                 const VertexOptions& opts = {});

/// The admissibility caps for candidate half-widths at a given R.
std::vector<double> vertex_r_caps(const ConstantsEstimate& consts, double R,
                                  const std::vector<double>& rho_i, double omega_star);

struct VertexDiagnostics {
    Witness min_dRg_dt;          // over t in (0, R]
    Witness min_dphig_dtheta;    // over t in (0, R]
    Witness min_jacobian;        // over B(center, 2R)
    double d2_integral = 0;      // int_{B(center,R)} |D^2 g|
    double d2_over_R = 0;
    double angle_lift_total = 0; // unwrapped angle increase over one ring (expect 2pi)
    double core_mismatch = 0;    // worst |g - (offset + lambda z)| on t <= 6R/8 (exact-zero check)
    double seam_mismatch = 0;    // continuity at t = 6R/8, 7R/8, R
    double phi_norm_gap = 0;     // | |phi_g| - 1 | worst case
    // Fan inequality suite (worst margins; negative = violated):
    double andrea_margin = 0, becca_margin = 0, dolly_margin = 0, ella_margin = 0,
           simona_margin = 0;
    double partials_rel_err = 0;  // radius/angle product-rule identity
    bool monotone_ok = false, jacobian_ok = false, seams_ok = false, fan_ok = false,
         partials_ok = false;

    bool ok() const { return monotone_ok && jacobian_ok && seams_ok && fan_ok && partials_ok; }
    void require_ok() const;
};

/// Polar sampling with nt radial and ntheta angular samples.
VertexDiagnostics verify_vertex(const VertexBlend& vb, int nt, int ntheta);

}  // namespace qm
