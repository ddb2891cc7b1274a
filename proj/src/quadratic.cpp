#include "quadmorph/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qm {

namespace {

struct PolyJet {
    Vec2 value;
    Mat2 D;        // local derivatives
    Tensor222 D2;  // local second derivatives
};

PolyJet eval_local(const std::array<double, 6>& a, const std::array<double, 6>& b, Vec2 q) {
    PolyJet r;
    double x = q.x, y = q.y;
    r.value = {a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * x * y + a[5] * y * y,
               b[0] + b[1] * x + b[2] * y + b[3] * x * x + b[4] * x * y + b[5] * y * y};
    r.D.m[0][0] = a[1] + 2.0 * a[3] * x + a[4] * y;
    r.D.m[0][1] = a[2] + a[4] * x + 2.0 * a[5] * y;
    r.D.m[1][0] = b[1] + 2.0 * b[3] * x + b[4] * y;
    r.D.m[1][1] = b[2] + b[4] * x + 2.0 * b[5] * y;
    r.D2(0, 0, 0) = 2.0 * a[3];
    r.D2(0, 0, 1) = a[4];
    r.D2(0, 1, 0) = a[4];
    r.D2(0, 1, 1) = 2.0 * a[5];
    r.D2(1, 0, 0) = 2.0 * b[3];
    r.D2(1, 0, 1) = b[4];
    r.D2(1, 1, 0) = b[4];
    r.D2(1, 1, 1) = 2.0 * b[5];
    return r;
}

// Coefficients of p(t + S q) given coefficients of p(q1) under q1 = t + S q.
std::array<double, 6> compose_affine(const std::array<double, 6>& a, Vec2 t, const Mat2& S) {
    double t1 = t.x, t2 = t.y;
    double s11 = S.m[0][0], s12 = S.m[0][1], s21 = S.m[1][0], s22 = S.m[1][1];
    std::array<double, 6> r{};
    r[0] = a[0] + a[1] * t1 + a[2] * t2 + a[3] * t1 * t1 + a[4] * t1 * t2 + a[5] * t2 * t2;
    r[1] = a[1] * s11 + a[2] * s21 + 2.0 * a[3] * t1 * s11 + a[4] * (t1 * s21 + t2 * s11) +
           2.0 * a[5] * t2 * s21;
    r[2] = a[1] * s12 + a[2] * s22 + 2.0 * a[3] * t1 * s12 + a[4] * (t1 * s22 + t2 * s12) +
           2.0 * a[5] * t2 * s22;
    r[3] = a[3] * s11 * s11 + a[4] * s11 * s21 + a[5] * s21 * s21;
    r[4] = 2.0 * a[3] * s11 * s12 + a[4] * (s11 * s22 + s12 * s21) + 2.0 * a[5] * s21 * s22;
    r[5] = a[3] * s12 * s12 + a[4] * s12 * s22 + a[5] * s22 * s22;
    return r;
}

}  // namespace

QuadraticMap QuadraticMap::identity() {
    QuadraticMap q;
    q.a = {0, 1, 0, 0, 0, 0};
    q.b = {0, 0, 1, 0, 0, 0};
    return q;
}

QuadraticMap QuadraticMap::linear(const Mat2& A, Vec2 offset) {
    QuadraticMap q;
    q.a = {offset.x, A.m[0][0], A.m[0][1], 0, 0, 0};
    q.b = {offset.y, A.m[1][0], A.m[1][1], 0, 0, 0};
    return q;
}

Vec2 QuadraticMap::eval_value(Point2 p) const {
    Vec2 q = chart.to_local(p);
    double x = q.x, y = q.y;
    return {a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * x * y + a[5] * y * y,
            b[0] + b[1] * x + b[2] * y + b[3] * x * x + b[4] * x * y + b[5] * y * y};
}

Jet2 QuadraticMap::eval(Point2 p) const {
    PolyJet local = eval_local(a, b, chart.to_local(p));
    Jet2 j;
    j.value = local.value;
    const Mat2& R = chart.rot;
    // d q_k / d p_i = R[i][k]
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            j.D.m[c][i] = local.D.m[c][0] * R.m[i][0] + local.D.m[c][1] * R.m[i][1];
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            for (int jj = 0; jj < 2; ++jj) {
                double s = 0.0;
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        s += local.D2(c, k, l) * R.m[i][k] * R.m[jj][l];
                j.D2(c, i, jj) = s;
            }
    return j;
}

QuadraticMap QuadraticMap::recharted(const Chart& target) const {
    // q_old = t + S q_new with S = R_old^T R_new, t = R_old^T (o_new - o_old).
    Mat2 S = chart.rot.transposed() * target.rot;
    Vec2 t = chart.rot.apply_transposed(target.origin - chart.origin);
    QuadraticMap r;
    r.a = compose_affine(a, t, S);
    r.b = compose_affine(b, t, S);
    r.chart = target;
    return r;
}

QuadraticMap QuadraticMap::diff_in_chart(const QuadraticMap& other) const {
    QuadraticMap r;
    r.chart = chart;
    for (int i = 0; i < 6; ++i) {
        r.a[i] = other.a[i] - a[i];
        r.b[i] = other.b[i] - b[i];
    }
    return r;
}

QuadraticMap QuadraticMap::shifted_value(Vec2 offset) const {
    QuadraticMap r = *this;
    r.a[0] += offset.x;
    r.b[0] += offset.y;
    return r;
}

MapSource QuadraticMap::as_source() const {
    QuadraticMap q = *this;
    MapSource src;
    src.value = [q](Point2 p) { return q.eval_value(p); };
    src.jet = [q](Point2 p) { return q.eval(p); };
    src.analytic_jets = true;
    src.name = "quadratic";
    return src;
}

TriangleConditions TriangleConditions::reference(double r) {
    TriangleConditions c;
    c.vertex = {Point2{0, 0}, Point2{r, 0}, Point2{0, r}};
    c.deriv = {DerivCondition{{0, 0}, {1, 0}},    // D_x at v1
               DerivCondition{{0, r}, {-1, 1}},   // (-D_x + D_y) at v3
               DerivCondition{{0, r}, {0, -1}}};  // -D_y at v3
    c.leg = r;
    return c;
}

InterpolationSystem InterpolationSystem::assemble(const TriangleConditions& cond) {
    InterpolationSystem sys;
    sys.chart.origin = cond.vertex[0];
    sys.chart.rot = Mat2::identity();
    sys.leg = cond.leg;
    for (int row = 0; row < 3; ++row) {
        Vec2 v = cond.vertex[row] - cond.vertex[0];
        sys.M[row][0] = 1.0;
        sys.M[row][1] = v.x;
        sys.M[row][2] = v.y;
        sys.M[row][3] = v.x * v.x;
        sys.M[row][4] = v.x * v.y;
        sys.M[row][5] = v.y * v.y;
    }
    for (int k = 0; k < 3; ++k) {
        Vec2 v = cond.deriv[k].anchor - cond.vertex[0];
        Vec2 d = cond.deriv[k].direction;
        int row = 3 + k;
        sys.M[row][0] = 0.0;
        sys.M[row][1] = d.x;
        sys.M[row][2] = d.y;
        sys.M[row][3] = 2.0 * v.x * d.x;
        sys.M[row][4] = v.x * d.y + v.y * d.x;
        sys.M[row][5] = 2.0 * v.y * d.y;
    }
    return sys;
}

std::array<double, 6> InterpolationSystem::solve(const std::array<double, 6>& c) const {
    double A[6][7];
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) A[i][j] = M[i][j];
        A[i][6] = c[i];
    }
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int i = col + 1; i < 6; ++i)
            if (std::fabs(A[i][col]) > std::fabs(A[piv][col])) piv = i;
        if (std::fabs(A[piv][col]) < 1e-14 * std::max(1.0, leg * leg))
            throw SingularSystem("interpolation matrix (broken anchor scheme?)");
        if (piv != col)
            for (int j = col; j < 7; ++j) std::swap(A[piv][j], A[col][j]);
        for (int i = col + 1; i < 6; ++i) {
            double f = A[i][col] / A[col][col];
            for (int j = col; j < 7; ++j) A[i][j] -= f * A[col][j];
        }
    }
    std::array<double, 6> x{};
    for (int i = 5; i >= 0; --i) {
        double s = A[i][6];
        for (int j = i + 1; j < 6; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    for (double v : x) ensure_finite(v, "interpolation coefficients");
    return x;
}

double InterpolationSystem::residual(const std::array<double, 6>& coeff,
                                     const std::array<double, 6>& c) const {
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        double s = -c[i];
        for (int j = 0; j < 6; ++j) s += M[i][j] * coeff[j];
        worst = std::max(worst, std::fabs(s));
    }
    return worst;
}

double InterpolationSystem::condition_estimate() const {
    // Row scaling: value rows by 1, derivative rows by leg.
    double S[6][6];
    for (int i = 0; i < 6; ++i) {
        double scale = (i < 3) ? 1.0 : leg;
        for (int j = 0; j < 6; ++j) S[i][j] = M[i][j] * scale;
    }
    auto norm1 = [](double A[6][6]) {
        double best = 0.0;
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int i = 0; i < 6; ++i) s += std::fabs(A[i][j]);
            best = std::max(best, s);
        }
        return best;
    };
    // Invert the scaled matrix by solving against unit vectors.
    double inv[6][6];
    for (int col = 0; col < 6; ++col) {
        double A[6][7];
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) A[i][j] = S[i][j];
            A[i][6] = (i == col) ? 1.0 : 0.0;
        }
        for (int c = 0; c < 6; ++c) {
            int piv = c;
            for (int i = c + 1; i < 6; ++i)
                if (std::fabs(A[i][c]) > std::fabs(A[piv][c])) piv = i;
            if (A[piv][c] == 0.0) return std::numeric_limits<double>::infinity();
            if (piv != c)
                for (int j = c; j < 7; ++j) std::swap(A[piv][j], A[c][j]);
            for (int i = c + 1; i < 6; ++i) {
                double f = A[i][c] / A[c][c];
                for (int j = c; j < 7; ++j) A[i][j] -= f * A[c][j];
            }
        }
        for (int i = 5; i >= 0; --i) {
            double s = A[i][6];
            for (int j = i + 1; j < 6; ++j) s -= A[i][j] * inv[j][col];
            inv[i][col] = s / A[i][i];
        }
    }
    return norm1(S) * norm1(inv);
}

QuadraticMap solve_coefficients(const TriangleConditions& cond, const std::array<double, 6>& c1,
                                const std::array<double, 6>& c2) {
    InterpolationSystem sys = InterpolationSystem::assemble(cond);
    QuadraticMap q;
    q.chart = sys.chart;
    q.a = sys.solve(c1);
    q.b = sys.solve(c2);
    return q;
}

void interpolation_rhs(const MapSource& src, const TriangleConditions& cond,
                       std::array<double, 6>& c1, std::array<double, 6>& c2) {
    double radius = cond.avg_radius();
    for (int j = 0; j < 3; ++j) {
        Vec2 avg = disk_average(std::function<Vec2(Point2)>(src.value), cond.vertex[j], radius);
        c1[j] = avg.x;
        c2[j] = avg.y;
    }
    for (int k = 0; k < 3; ++k) {
        Vec2 dir = cond.deriv[k].direction;
        auto field = [&](Point2 p) { return src.jet(p).dir_derivative(dir); };
        Vec2 avg = disk_average(std::function<Vec2(Point2)>(field), cond.deriv[k].anchor, radius);
        c1[3 + k] = avg.x;
        c2[3 + k] = avg.y;
    }
}

QuadraticMap build_interpolant(const MapSource& src, const TriangleConditions& cond) {
    std::array<double, 6> c1{}, c2{};
    interpolation_rhs(src, cond, c1, c2);
    return solve_coefficients(cond, c1, c2);
}

EdgeJump edge_jump(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge) {
    Vec2 n = edge.normal();
    double len = edge.length();
    // D_n Q is affine along the edge: evaluate the jump at both ends and
    // interpolate. (Derivatives of a quadratic are affine in position.)
    Vec2 j0 = q2.eval(edge.p0).dir_derivative(n) - q1.eval(edge.p0).dir_derivative(n);
    Vec2 j1 = q2.eval(edge.p1).dir_derivative(n) - q1.eval(edge.p1).dir_derivative(n);
    auto pointwise = [j0, j1](double s) { return (j0 + (j1 - j0) * s).norm(); };

    // 32-node composite Gauss-Legendre (two 16-node panels) on |affine|.
    static const double gl16_x[8] = {0.0950125098376375, 0.2816035507792589, 0.4580167776572274,
                                     0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
    static const double gl16_w[8] = {0.1894506104550686, 0.1826034150449236, 0.1691565193950026,
                                     0.1495959888165768, 0.1246289712555340, 0.0951585116824926,
                                     0.0622535239386477, 0.0271524594117540};
    double integral = 0.0;
    for (int panel = 0; panel < 2; ++panel) {
        double a = panel * 0.5, b = a + 0.5;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < 8; ++k) {
            integral += gl16_w[k] * half * (pointwise(mid + half * gl16_x[k]) +
                                            pointwise(mid - half * gl16_x[k]));
        }
    }
    integral *= len;
    EdgeJump r;
    r.integral = integral;
    r.pointwise = pointwise;
    return r;
}

double verify_edge_continuity(const QuadraticMap& q1, const QuadraticMap& q2, const Segment& edge,
                              int samples) {
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        double s = static_cast<double>(i) / samples;
        Point2 p = edge.at(s);
        worst = std::max(worst, (q1.eval_value(p) - q2.eval_value(p)).norm());
    }
    return worst;
}

std::array<std::array<double, 6>, 6> reference_inverse_rows(double r) {
    return {{{1, 0, 0, 0, 0, 0},
             {0, 0, 0, 1, 0, 0},
             {-2 / r, 0, 2 / r, 0, 0, 1},
             {-1 / (r * r), 1 / (r * r), 0, -1 / r, 0, 0},
             {0, 1 / (r * r), -1 / (r * r), -1 / (2 * r), 1 / (2 * r), -1 / (2 * r)},
             {1 / (r * r), 0, -1 / (r * r), 0, 0, -1 / r}}};
}

}  // namespace qm
