#include "quadmorph/map_source.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "quadmorph/quadratic.hpp"

namespace qm {

MapSource MapSource::from_value(std::function<Vec2(Point2)> f, double fd_scale, std::string name) {
    MapSource src;
    src.value = f;
    FdOptions opts;
    opts.scale = fd_scale;
    src.jet = [f, opts](Point2 p) { return fd_jet_auto(f, p, opts); };
    src.analytic_jets = false;
    src.name = std::move(name);
    return src;
}

MapSource MapSource::from_jet(std::function<Jet2(Point2)> f, std::string name) {
    MapSource src;
    src.jet = f;
    src.value = [f](Point2 p) { return f(p).value; };
    src.analytic_jets = true;
    src.name = std::move(name);
    return src;
}

namespace {

void require_params(const std::string& name, const std::vector<double>& p, size_t n) {
    if (p.size() != n)
        throw InvalidParams("builtin map '" + name + "' expects " + std::to_string(n) +
                            " parameters, got " + std::to_string(p.size()));
}

}  // namespace

MapSource make_builtin_map(const std::string& name, const std::vector<double>& params) {
    if (name == "identity") {
        require_params(name, params, 0);
        return QuadraticMap::identity().as_source();
    }
    if (name == "linear") {
        require_params(name, params, 6);
        Mat2 A{{{params[0], params[1]}, {params[2], params[3]}}};
        return QuadraticMap::linear(A, {params[4], params[5]}).as_source();
    }
    if (name == "quadratic") {
        require_params(name, params, 12);
        QuadraticMap q;
        for (int i = 0; i < 6; ++i) {
            q.a[i] = params[i];
            q.b[i] = params[6 + i];
        }
        return q.as_source();
    }
    if (name == "shear") {
        require_params(name, params, 1);
        double amp = params[0];
        auto jet = [amp](Point2 p) {
            Jet2 j;
            double s = std::sin(M_PI * p.y), c = std::cos(M_PI * p.y);
            j.value = {p.x + amp * s, p.y};
            j.D.m[0][0] = 1.0;
            j.D.m[0][1] = amp * M_PI * c;
            j.D.m[1][0] = 0.0;
            j.D.m[1][1] = 1.0;
            j.D2(0, 1, 1) = -amp * M_PI * M_PI * s;
            return j;
        };
        MapSource src = MapSource::from_jet(jet, "shear");
        return src;
    }
    if (name == "radial") {
        require_params(name, params, 1);
        double c = params[0];
        auto jet = [c](Point2 p) {
            Jet2 j;
            double r2 = p.norm2();
            double s = 1.0 + c * r2;
            j.value = p * s;
            // f_i = x_i (1 + c r^2); df_i/dx_j = s delta_ij + 2 c x_i x_j
            double xv[2] = {p.x, p.y};
            for (int i = 0; i < 2; ++i)
                for (int jj = 0; jj < 2; ++jj)
                    j.D.m[i][jj] = (i == jj ? s : 0.0) + 2.0 * c * xv[i] * xv[jj];
            // d2 f_i / dx_j dx_k = 2c (delta_ij x_k + delta_ik x_j + delta_jk x_i)
            for (int i = 0; i < 2; ++i)
                for (int jj = 0; jj < 2; ++jj)
                    for (int k = 0; k < 2; ++k)
                        j.D2(i, jj, k) = 2.0 * c *
                                         ((i == jj ? xv[k] : 0.0) + (i == k ? xv[jj] : 0.0) +
                                          (jj == k ? xv[i] : 0.0));
            return j;
        };
        return MapSource::from_jet(jet, "radial");
    }
    if (name == "degenerate") {
        // Near-degenerate line x = x0: J = 2|x - x0| + 0.01.
        require_params(name, params, 1);
        double x0 = params[0];
        auto jet = [x0](Point2 p) {
            Jet2 j;
            double s = p.x - x0;
            j.value = {x0 + s * std::fabs(s) + 0.01 * s, p.y};
            j.D.m[0][0] = 2.0 * std::fabs(s) + 0.01;
            j.D.m[1][1] = 1.0;
            j.D2(0, 0, 0) = s >= 0.0 ? 2.0 : -2.0;
            return j;
        };
        return MapSource::from_jet(jet, "degenerate");
    }
    throw InvalidParams("unknown builtin map '" + name + "'");
}

namespace {

struct GridData {
    int nx = 0, ny = 0;
    Point2 origin;
    double dx = 0, dy = 0;
    std::vector<Vec2> values;  // row-major, x fastest

    Vec2 at(int ix, int iy) const {
        ix = std::clamp(ix, 0, nx - 1);
        iy = std::clamp(iy, 0, ny - 1);
        return values[static_cast<size_t>(iy) * nx + ix];
    }
};

double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
    return p0 + 0.5 * t * (p1 - pm1 + t * (2 * pm1 - 5 * p0 + 4 * p1 - p2 +
                                           t * (3 * (p0 - p1) + p2 - pm1)));
}

Vec2 interp_grid(const GridData& g, Point2 p) {
    double fx = (p.x - g.origin.x) / g.dx;
    double fy = (p.y - g.origin.y) / g.dy;
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    double tx = fx - ix, ty = fy - iy;
    double col[4][2];
    for (int j = -1; j <= 2; ++j) {
        Vec2 q[4];
        for (int i = -1; i <= 2; ++i) q[i + 1] = g.at(ix + i, iy + j);
        col[j + 1][0] = catmull_rom(q[0].x, q[1].x, q[2].x, q[3].x, tx);
        col[j + 1][1] = catmull_rom(q[0].y, q[1].y, q[2].y, q[3].y, tx);
    }
    return {catmull_rom(col[0][0], col[1][0], col[2][0], col[3][0], ty),
            catmull_rom(col[0][1], col[1][1], col[2][1], col[3][1], ty)};
}

}  // namespace

MapSource load_grid_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grid map '" + path + "'");
    auto g = std::make_shared<GridData>();
    if (!(in >> g->nx >> g->ny >> g->origin.x >> g->origin.y >> g->dx >> g->dy))
        throw IoError("malformed grid map header in '" + path + "'");
    if (g->nx < 4 || g->ny < 4 || !(g->dx > 0) || !(g->dy > 0))
        throw IoError("grid map '" + path + "' needs nx,ny >= 4 and positive spacing");
    g->values.resize(static_cast<size_t>(g->nx) * g->ny);
    for (auto& v : g->values)
        if (!(in >> v.x >> v.y)) throw IoError("grid map '" + path + "' is truncated");
    auto value = [g](Point2 p) { return interp_grid(*g, p); };
    double scale = std::min(g->dx, g->dy);
    return MapSource::from_value(value, scale, "grid:" + path);
}

void save_grid_map(const std::string& path, const MapSource& src, Point2 origin, double dx,
                   double dy, int nx, int ny) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write grid map '" + path + "'");
    out.precision(17);
    out << nx << " " << ny << " " << origin.x << " " << origin.y << " " << dx << " " << dy << "\n";
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Vec2 v = src.value({origin.x + i * dx, origin.y + j * dy});
            out << v.x << " " << v.y << "\n";
        }
}

}  // namespace qm
