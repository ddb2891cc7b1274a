#include "quadmorph/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qm {

void ConstantsEstimate::validate() const {
    if (!(d > 0)) throw DegenerateConstants("d must be positive, got " + std::to_string(d));
    if (!(L > 0)) throw DegenerateConstants("L must be positive");
    if (!(d <= L * L * (1.0 + 1e-12)))
        throw DegenerateConstants("inconsistent bounds: d > L^2");
    if (M < 0) throw DegenerateConstants("M must be nonnegative");
}

double ClassificationParams::epsilon_chain_bound() const {
    double bound = std::min(C0 * delta * delta, delta * delta / 8.0);
    bound = std::min(bound, delta * delta / (4.0 * C1));
    if (eta_margin > 0) bound = std::min(bound, eta_margin);
    return bound;
}

bool ClassificationParams::epsilon_chain_satisfied() const {
    return epsilon > 0 && epsilon < epsilon_chain_bound();
}

void ClassificationParams::validate() const {
    if (!(r0 > 0)) throw InvalidParams("r0 must be positive");
    if (!(delta > 0 && delta < 1)) throw InvalidParams("delta must lie in (0,1)");
    if (!(nu > 0)) throw InvalidParams("nu must be positive");
    if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive (or derived)");
    if (klic_res < 32) throw InvalidParams("klic_res must be at least 32");
    if (klic2_res < 2) throw InvalidParams("klic2_res too small");
    if (!epsilon_chain_satisfied() && !relax_epsilon_chain)
        throw InvalidParams("epsilon " + std::to_string(epsilon) +
                            " violates the chain bound " + std::to_string(epsilon_chain_bound()) +
                            " (set relax_epsilon_chain to accept; the report records the flag)");
}

ClassificationParams ClassificationParams::with_derived_epsilon() const {
    ClassificationParams p = *this;
    if (p.epsilon <= 0) p.epsilon = 0.999 * p.epsilon_chain_bound();
    return p;
}

TriGrid build_grid(const Rect& domain, double r0, Vec2 z0, double eta_margin) {
    if (!(r0 > 0)) throw InvalidParams("build_grid: r0 must be positive");
    if (std::fabs(z0.x) > r0 || std::fabs(z0.y) > r0)
        throw InvalidParams("build_grid: z0 must lie in Q(0, r0)");
    Rect shrunk = domain.shrunk(eta_margin);
    if (shrunk.empty()) throw EmptyDomain("eta-shrunk domain is empty");

    TriGrid g;
    g.z0 = z0;
    g.r0 = r0;
    g.domain = domain;
    g.eta_margin = eta_margin;
    double side = 2.0 * r0;
    // Cells whose open interior meets the open shrunk domain.
    g.kx0 = static_cast<int>(std::floor((shrunk.x0 - z0.x) / side));
    g.ky0 = static_cast<int>(std::floor((shrunk.y0 - z0.y) / side));
    int kx1 = static_cast<int>(std::ceil((shrunk.x1 - z0.x) / side));
    int ky1 = static_cast<int>(std::ceil((shrunk.y1 - z0.y) / side));
    g.nx = kx1 - g.kx0;
    g.ny = ky1 - g.ky0;
    g.included.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    for (int ky = g.ky0; ky < ky1; ++ky)
        for (int kx = g.kx0; kx < kx1; ++kx) {
            Point2 c = g.cell_corner(kx, ky);
            double ox = std::min(c.x + side, shrunk.x1) - std::max(c.x, shrunk.x0);
            double oy = std::min(c.y + side, shrunk.y1) - std::max(c.y, shrunk.y0);
            if (ox > 0 && oy > 0) {
                g.included[static_cast<size_t>(ky - g.ky0) * g.nx + (kx - g.kx0)] = 1;
                ++g.cell_count;
            }
        }
    if (g.cell_count == 0) throw EmptyDomain("no grid squares meet the shrunk domain");
    return g;
}

std::array<Point2, 3> TriGrid::triangle_vertices(int kx, int ky, int which) const {
    Point2 ll = cell_corner(kx, ky);
    double s = side();
    Point2 lr{ll.x + s, ll.y}, ul{ll.x, ll.y + s}, ur{ll.x + s, ll.y + s};
    if (which == 0) return {ll, lr, ul};
    return {ur, ul, lr};
}

TriangleConditions TriGrid::triangle_conditions(int kx, int ky, int which) const {
    TriangleConditions c;
    c.vertex = triangle_vertices(kx, ky, which);
    c.leg = side();
    Point2 ll = cell_corner(kx, ky);
    double s = side();
    Point2 lr{ll.x + s, ll.y}, ul{ll.x, ll.y + s}, ur{ll.x + s, ll.y + s};
    if (which == 0) {
        // bottom edge: left endpoint, +x; diagonal: upper-left endpoint,
        // (-1,1); left edge: upper endpoint, -y
        c.deriv = {DerivCondition{ll, {1, 0}}, DerivCondition{ul, {-1, 1}},
                   DerivCondition{ul, {0, -1}}};
    } else {
        // top edge: left endpoint, +x; diagonal: upper-left endpoint,
        // (-1,1); right edge: upper endpoint, -y
        c.deriv = {DerivCondition{ul, {1, 0}}, DerivCondition{ul, {-1, 1}},
                   DerivCondition{ur, {0, -1}}};
    }
    return c;
}

std::vector<std::pair<int, int>> TriGrid::included_cells() const {
    std::vector<std::pair<int, int>> cells;
    cells.reserve(cell_count);
    for (int ky = ky0; ky < ky0 + ny; ++ky)
        for (int kx = kx0; kx < kx0 + nx; ++kx)
            if (cell_included(kx, ky)) cells.emplace_back(kx, ky);
    return cells;
}

ConstantsEstimate estimate_constants(const MapSource& src, const Rect& region, int samples) {
    if (samples < 2) throw InvalidParams("estimate_constants: need at least 2 samples per axis");
    double min_j = std::numeric_limits<double>::infinity();
    double max_l = 0.0, max_m = 0.0;
    for (int j = 0; j < samples; ++j)
        for (int i = 0; i < samples; ++i) {
            Point2 p{region.x0 + region.width() * i / (samples - 1.0),
                     region.y0 + region.height() * j / (samples - 1.0)};
            Jet2 jet = src.jet(p);
            double jac = jet.jacobian();
            if (!(jac > 0)) throw NonPositiveJacobian(jac, p.x, p.y);
            min_j = std::min(min_j, jac);
            max_l = std::max(max_l, jet.D.opnorm());
            max_m = std::max(max_m, jet.D2.entry_abs_sum());
        }
    const double safety = 0.05;
    ConstantsEstimate c;
    c.d = min_j * (1.0 - safety);
    c.L = max_l * (1.0 + safety);
    c.M = max_m < 1e-12 ? 0.0 : max_m * (1.0 + safety);
    c.samples = static_cast<long>(samples) * samples;
    return c;
}

namespace {

struct CornerTester {
    const MapSource& src;
    const ClassificationParams& params;

    bool corner_good(Point2 z) const {
        try {
            Jet2 jz = src.jet(z);
            if (!(jz.jacobian() > params.delta)) return false;
            if (!(jz.D.opnorm() < 1.0 / params.delta)) return false;

            double h = 3.0 * params.r0;  // half side of the test square
            // Pointwise first-order Taylor bound on Q(z, 3 r0).
            int n = params.klic_res;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    Point2 w{z.x - h + (i + 0.5) * 2 * h / n, z.y - h + (j + 0.5) * 2 * h / n};
                    Vec2 dv = w - z;
                    double dist = dv.norm();
                    if (dist == 0.0) continue;
                    Vec2 rem = src.value(w) - jz.value - jz.D.apply(dv);
                    if (!(rem.norm() < params.epsilon * dist)) return false;
                }
            // Mean oscillation of Df (operator norm) and D^2 f (entry sum),
            // midpoint rule.
            int m = params.klic2_res;
            double acc1 = 0.0, acc2 = 0.0;
            for (int j = 0; j < m; ++j)
                for (int i = 0; i < m; ++i) {
                    Point2 w{z.x - h + (i + 0.5) * 2 * h / m, z.y - h + (j + 0.5) * 2 * h / m};
                    Jet2 jw = src.jet(w);
                    acc1 += (jw.D - jz.D).opnorm();
                    acc2 += (jw.D2 - jz.D2).entry_abs_sum();
                }
            double cells = static_cast<double>(m) * m;
            if (!(acc1 / cells < params.epsilon)) return false;
            if (!(acc2 / cells < params.epsilon)) return false;
            return true;
        } catch (const Error&) {
            return false;  // bad by default on evaluation failure
        }
    }
};

}  // namespace

bool Classification::square_good(const TriGrid& g, int kx, int ky) const {
    if (!g.cell_included(kx, ky)) return false;
    int nxc = g.nx + 1;
    auto corner = [&](int cx, int cy) {
        return corner_good[static_cast<size_t>(cy - g.ky0) * nxc + (cx - g.kx0)] != 0;
    };
    return corner(kx, ky) && corner(kx + 1, ky) && corner(kx, ky + 1) && corner(kx + 1, ky + 1);
}

Classification classify_squares(const MapSource& src, const TriGrid& grid,
                                const ClassificationParams& params) {
    CornerTester tester{src, params};
    Classification result;
    int nxc = grid.nx + 1, nyc = grid.ny + 1;
    result.corner_good.assign(static_cast<size_t>(nxc) * nyc, 0);

    // Test only corners adjacent to at least one included cell.
    std::vector<uint8_t> needed(static_cast<size_t>(nxc) * nyc, 0);
    for (int ky = grid.ky0; ky < grid.ky0 + grid.ny; ++ky)
        for (int kx = grid.kx0; kx < grid.kx0 + grid.nx; ++kx) {
            if (!grid.cell_included(kx, ky)) continue;
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx)
                    needed[static_cast<size_t>(ky + dy - grid.ky0) * nxc + (kx + dx - grid.kx0)] = 1;
        }
    for (int cy = 0; cy < nyc; ++cy)
        for (int cx = 0; cx < nxc; ++cx) {
            size_t idx = static_cast<size_t>(cy) * nxc + cx;
            if (!needed[idx]) continue;
            Point2 z = grid.cell_corner(grid.kx0 + cx, grid.ky0 + cy);
            bool ok = tester.corner_good(z);
            result.corner_good[idx] = ok ? 1 : 0;
            if (ok) ++result.good_corner_count;
        }

    double cell_area = grid.side() * grid.side();
    for (auto [kx, ky] : grid.included_cells()) {
        SquareLabel lab;
        lab.kx = kx;
        lab.ky = ky;
        lab.good = result.square_good(grid, kx, ky);
        result.labels.push_back(lab);
        if (lab.good)
            ++result.good_count;
        else
            ++result.bad_count;
    }
    result.bad_measure = result.bad_count * cell_area;
    return result;
}

Vec2 select_shift(const MapSource& src, const Rect& domain, double r0,
                  const ClassificationParams& params, int trials, uint64_t seed) {
    if (trials < 1) throw InvalidParams("select_shift: trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-r0, r0);
    Vec2 best_shift{0, 0};
    long best_count = -1;
    for (int t = 0; t < trials; ++t) {
        Vec2 z0{unif(rng), unif(rng)};
        TriGrid grid = build_grid(domain, r0, z0, params.eta_margin);
        Classification cls = classify_squares(src, grid, params);
        if (cls.good_corner_count > best_count) {  // strict: lowest index wins ties
            best_count = cls.good_corner_count;
            best_shift = z0;
        }
    }
    return best_shift;
}

}  // namespace qm
