#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quadmorph/map_source.hpp"
#include "quadmorph/quadratic.hpp"

namespace qm {

struct Rect {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    Rect shrunk(double margin) const { return {x0 + margin, y0 + margin, x1 - margin, y1 - margin}; }
    bool empty() const { return !(x1 > x0 && y1 > y0); }
};

/// Numerically estimated bounds on a region: J_f >= d, |Df| <= L (operator
/// norm), |D^2 f| <= M (entry-sum norm), with a 5% safety margin applied.
struct ConstantsEstimate {
    double d = 0;
    double L = 0;
    double M = 0;
    long samples = 0;
    std::string region_id;

    void validate() const;
};

/// Parameters of the good/bad square classification.
struct ClassificationParams {
    double nu = 0.1;          // target bad measure
    double eta_margin = 0.0;  // boundary shrink
    double delta = 0.5;       // Jacobian / derivative threshold
    double epsilon = 0.0;     // Lebesgue-point tolerance; 0 = derive from chain
    double r0 = 1.0 / 64;     // half side of a grid square
    double C0 = 1e-2;         // configurable absolute constants
    double C1 = 3.0;
    int klic_res = 32;        // sampling resolution of the Taylor-bound test
    int klic2_res = 48;       // midpoint cells for the mean-oscillation tests
    bool relax_epsilon_chain = false;  // allow epsilon above the chain bound (recorded)

    /// min{C0 delta^2, eta_margin (if > 0), delta^2/8, delta^2/(4 C1)}.
    double epsilon_chain_bound() const;
    bool epsilon_chain_satisfied() const;
    /// Throws InvalidParams unless the parameter set is usable; the epsilon
    /// chain is enforced unless relax_epsilon_chain is set.
    void validate() const;
    /// Fill epsilon from the chain bound if unset.
    ClassificationParams with_derived_epsilon() const;
};

/// Axis-aligned shifted grid of squares of side 2 r0 split into two
/// triangles each by the (-1,1) diagonal joining lower-right to upper-left.
struct TriGrid {
    Vec2 z0;           // shift, in Q(0, r0) = [-r0, r0]^2
    double r0 = 0;     // half side
    Rect domain;       // original domain
    double eta_margin = 0;
    int kx0 = 0, ky0 = 0, nx = 0, ny = 0;  // included cell index window
    std::vector<uint8_t> included;         // nx*ny mask

    int cell_count = 0;

    bool cell_included(int kx, int ky) const {
        if (kx < kx0 || ky < ky0 || kx >= kx0 + nx || ky >= ky0 + ny) return false;
        return included[static_cast<size_t>(ky - ky0) * nx + (kx - kx0)] != 0;
    }
    /// Lower-left corner of cell (kx, ky).
    Point2 cell_corner(int kx, int ky) const {
        return {z0.x + 2.0 * r0 * kx, z0.y + 2.0 * r0 * ky};
    }
    double side() const { return 2.0 * r0; }
    /// Cell index containing p (by floor); may be outside the window.
    void locate(Point2 p, int& kx, int& ky) const {
        kx = static_cast<int>(std::floor((p.x - z0.x) / side()));
        ky = static_cast<int>(std::floor((p.y - z0.y) / side()));
    }

    /// Vertices of one of the two triangles of a cell. which=0: lower
    /// triangle (right angle at the lower-left corner); which=1: upper
    /// triangle (right angle at the upper-right corner). Both have the
    /// hypotenuse on the (-1,1) diagonal.
    std::array<Point2, 3> triangle_vertices(int kx, int ky, int which) const;

    /// Interpolation conditions of a triangle under the global anchor
    /// scheme: horizontal edges anchor at the left endpoint with +x,
    /// vertical edges at the upper endpoint with -y, diagonals at the
    /// upper-left endpoint with (-1,1).
    TriangleConditions triangle_conditions(int kx, int ky, int which) const;

    std::vector<std::pair<int, int>> included_cells() const;
};

/// All squares of the shifted lattice whose interior meets the eta-shrunk
/// domain. Throws EmptyDomain when the shrunk domain is empty.
TriGrid build_grid(const Rect& domain, double r0, Vec2 z0, double eta_margin = 0.0);

/// Sampled (d, L, M) bounds over a rectangle; `samples` is the per-axis
/// resolution. Throws NonPositiveJacobian when a sample has J <= 0.
ConstantsEstimate estimate_constants(const MapSource& src, const Rect& region, int samples);

struct SquareLabel {
    int kx = 0, ky = 0;
    bool good = false;
};

struct Classification {
    std::vector<SquareLabel> labels;        // in deterministic cell order
    std::vector<uint8_t> corner_good;       // (nx+1)*(ny+1) mask of corner verdicts
    int good_count = 0;
    int bad_count = 0;
    double bad_measure = 0.0;
    int good_corner_count = 0;

    bool square_good(const TriGrid& g, int kx, int ky) const;
};

/// Corner-based classification: a square is good iff all four corners pass
/// the Jacobian/derivative thresholds, the pointwise first-order Taylor
/// bound on Q(z, 3 r0), and both mean-oscillation bounds. Evaluation
/// failures mark the corner bad.
Classification classify_squares(const MapSource& src, const TriGrid& grid,
                                const ClassificationParams& params);

/// Among `trials` uniform candidate shifts in Q(0, r0), the one whose grid
/// has the most good corners (ties resolved to the lowest trial index).
Vec2 select_shift(const MapSource& src, const Rect& domain, double r0,
                  const ClassificationParams& params, int trials, uint64_t seed);

}  // namespace qm
