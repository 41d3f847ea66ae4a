#include "hmpii/contour_quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hmpii {

namespace {

struct GLTable {
    std::vector<double> x, w;
};

const GLTable& table(int n) {
    static std::mutex mu;
    static std::map<int, GLTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GLTable t;
    gauss_legendre(n, t.x, t.w);
    return cache.emplace(n, std::move(t)).first->second;
}

cplx gl_panel(const std::function<cplx(double)>& g, double a, double b, const GLTable& t) {
    double m = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx s = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        cplx v = g(m + h * t.x[i]);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::NonFinite, "integrand not finite at quadrature node");
        s += t.w[i] * v;
    }
    return s * h;
}

cplx adapt(const std::function<cplx(double)>& g, double a, double b, cplx whole, const GLTable& t,
           int depth, const QuadratureRule& rule, double scale) {
    double m = 0.5 * (a + b);
    cplx l = gl_panel(g, a, m, t), r = gl_panel(g, m, b, t);
    double err = std::abs(l + r - whole);
    double tol = std::max(rule.abs_tol, rule.rel_tol * scale);
    if (err <= tol) return l + r;
    if (depth >= rule.max_depth) {
        if (err <= 1e3 * tol) return l + r;
        throw Error(ErrorKind::NonConvergence, "bisection depth limit reached");
    }
    return adapt(g, a, m, l, t, depth + 1, rule, scale) + adapt(g, m, b, r, t, depth + 1, rule, scale);
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

cplx integrate_real(const std::function<cplx(double)>& g, double t0, double t1, const QuadratureRule& rule) {
    const GLTable& t = table(rule.nodes_per_segment);
    cplx whole = gl_panel(g, t0, t1, t);
    // Scale by the integral of |g| so cancelling integrands do not demand sub-roundoff accuracy.
    double m = 0.5 * (t0 + t1), h = 0.5 * std::abs(t1 - t0), mag = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i) mag += t.w[i] * std::abs(g(m + h * t.x[i]));
    return adapt(g, t0, t1, whole, t, 0, rule, std::max(std::abs(whole), mag * h));
}

cplx integrate_segment(const CFun& f, cplx p, cplx q, const QuadratureRule& rule, EndSing sing) {
    cplx d = q - p;
    switch (sing) {
    case EndSing::None:
        return integrate_real([&](double s) { return f(p + d * s) * d; }, 0.0, 1.0, rule);
    case EndSing::Start:
        return integrate_real([&](double u) { return f(p + d * (u * u)) * d * (2.0 * u); }, 0.0, 1.0, rule);
    case EndSing::End:
        return integrate_real([&](double u) { return f(q - d * (u * u)) * d * (2.0 * u); }, 0.0, 1.0, rule);
    case EndSing::Both:
        return integrate_real(
            [&](double th) {
                double sh = std::sin(0.5 * th), ch = std::cos(0.5 * th);
                cplx w = th < 0.5 * std::numbers::pi ? p + d * (sh * sh) : q - d * (ch * ch);
                return f(w) * d * (0.5 * std::sin(th));
            },
            0.0, std::numbers::pi, rule);
    }
    return 0.0;
}

Path Path::segment(cplx a, cplx b) { return polyline({a, b}); }

Path Path::polyline(std::vector<cplx> pts, bool closed) {
    if (closed && (pts.empty() || pts.front() != pts.back())) pts.push_back(pts.front());
    if (pts.size() < 2) throw std::invalid_argument("path needs at least two vertices");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] == pts[i - 1]) throw std::invalid_argument("consecutive path vertices coincide");
    Path p;
    p.vertices = std::move(pts);
    p.closed = closed;
    return p;
}

Path Path::reversed() const {
    Path p = *this;
    std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
}

double Path::length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) s += std::abs(vertices[i] - vertices[i - 1]);
    return s;
}

cplx integrate_path(const CFun& f, const Path& p, const QuadratureRule& rule) {
    cplx s = 0.0;
    for (std::size_t i = 1; i < p.vertices.size(); ++i) s += integrate_segment(f, p.vertices[i - 1], p.vertices[i], rule);
    return s;
}

cplx integrate_tail(const CFun& f, cplx ray_start, cplx direction, const QuadratureRule& rule) {
    cplx d = direction / std::abs(direction);
    // t = u/(1-u) maps [0,1) onto the ray; O(1/w^2) decay keeps the integrand bounded at u = 1.
    auto g = [&](double u) -> cplx {
        double om = 1.0 - u;
        if (om <= 0.0) return 0.0;
        double t = u / om;
        return f(ray_start + d * t) * d / (om * om);
    };
    cplx v = integrate_real(g, 0.0, 1.0, rule);
    return -v;
}

cplx loop_around_segment(const CFun& f, cplx a, cplx b, double clearance, const QuadratureRule& rule) {
    cplx d = b - a;
    double len = std::abs(d);
    cplx e = d / len;
    double rad = clearance * len;
    const double pi = std::numbers::pi;
    cplx n = cplx(0, 1) * e;
    // bottom side a->b, arc around b, top side b->a, arc around a
    cplx s = integrate_segment(f, a - rad * n, b - rad * n, rule);
    s += integrate_real(
        [&](double t) {
            cplx u = std::exp(cplx(0, t));
            return f(b + rad * e * u) * rad * e * cplx(0, 1) * u;
        },
        -pi / 2, pi / 2, rule);
    s += integrate_segment(f, b + rad * n, a + rad * n, rule);
    s += integrate_real(
        [&](double t) {
            cplx u = std::exp(cplx(0, t));
            return f(a + rad * e * u) * rad * e * cplx(0, 1) * u;
        },
        pi / 2, 3 * pi / 2, rule);
    return s;
}

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
    auto cr = [](cplx u, cplx v) { return (std::conj(u) * v).imag(); };
    double d1 = cr(p2 - p1, q1 - p1), d2 = cr(p2 - p1, q2 - p1);
    double d3 = cr(q2 - q1, p1 - q1), d4 = cr(q2 - q1, p2 - q1);
    return d1 * d2 < 0 && d3 * d4 < 0;
}

double dist_to_segment(cplx z, cplx a, cplx b) {
    cplx d = b - a;
    double t = std::real((z - a) * std::conj(d)) / std::norm(d);
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

}  // namespace hmpii
