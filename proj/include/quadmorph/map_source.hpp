#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "quadmorph/geometry.hpp"

namespace qm {

/// A planar map with point values and (analytic or finite-difference) jets.
/// The value accessor must be defined on the query domain padded by the
/// largest averaging radius in use.
struct MapSource {
    std::function<Vec2(Point2)> value;
    std::function<Jet2(Point2)> jet;   // never null; falls back to fd_jet
    bool analytic_jets = false;
    std::string name;

    Vec2 operator()(Point2 p) const { return value(p); }

    /// Wrap a value-only map; jets by central differences at the given scale.
    static MapSource from_value(std::function<Vec2(Point2)> f, double fd_scale,
                                std::string name = "sampled");

    /// Wrap a map with analytic jets.
    static MapSource from_jet(std::function<Jet2(Point2)> f, std::string name = "analytic");
};

/// Builtin registry (documented in the README):
///   identity
///   linear(a11,a12,a21,a22,b1,b2)     f(z) = Az + b
///   shear(amp)                        f(x,y) = (x + amp sin(pi y), y)
///   radial(c)                         f(z) = (1 + c |z|^2) z
///   quadratic(a1..a6,b1..b6)          componentwise quadratic polynomial
///   degenerate(x0)                    f(x,y) = (x0 + s|s| + 0.01 s, y), s = x - x0
MapSource make_builtin_map(const std::string& name, const std::vector<double>& params);

/// Sampled-grid input: text header "nx ny x0 y0 dx dy" followed by nx*ny
/// lines "fx fy" in row-major order (x fastest). Values are interpolated
/// bicubically; jets come from finite differences.
MapSource load_grid_map(const std::string& path);

/// Write a map sampled on a uniform grid in the same format.
void save_grid_map(const std::string& path, const MapSource& src, Point2 origin, double dx,
                   double dy, int nx, int ny);

}  // namespace qm
