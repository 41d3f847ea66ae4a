#include "hmpii/genus0.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>

namespace hmpii {

namespace {

const double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx ray_dir(bool upper) { return std::polar(1.0, (upper ? 2.0 : -2.0) * pi / 3.0); }

double cubic_res(cplx S, cplx x) { return std::abs(S * S * S + x * S - 2.0 * I); }

cplx newton_S(cplx S, cplx x, bool& ok) {
    ok = false;
    for (int it = 0; it < 40; ++it) {
        cplx f = S * S * S + x * S - 2.0 * I;
        cplx fp = 3.0 * S * S + x;
        cplx step = f / fp;
        S -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(S))) {
            ok = true;
            break;
        }
    }
    return S;
}

// Bisection for a sign change of g on [lo, hi].
double bisect(const std::function<double(double)>& g, double lo, double hi, double tol) {
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double m = 0.5 * (lo + hi);
        double gm = g(m);
        if ((gm > 0) == (glo > 0)) {
            lo = m;
            glo = gm;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Region r) {
    switch (r) {
    case Region::PoleFreeLeft: return "PoleFreeLeft";
    case Region::PoleFreeRight: return "PoleFreeRight";
    case Region::PoleRegionUp: return "PoleRegionUp";
    case Region::PoleRegionDown: return "PoleRegionDown";
    case Region::BoundaryPoint: return "BoundaryPoint";
    case Region::ApexPoint: return "ApexPoint";
    }
    return "Unknown";
}

bool is_pole_region(Region r) { return r == Region::PoleRegionUp || r == Region::PoleRegionDown; }

cplx apex_point(bool upper) { return 3.0 * ray_dir(upper); }

double sigma_S_distance(cplx x) {
    double best = 1e300;
    for (bool up : {false, true}) {
        cplx d = ray_dir(up);
        cplx w = x * std::conj(d);
        double t = w.real(), s = w.imag();
        double dist = t >= 3.0 ? std::abs(s) : std::abs(w - 3.0);
        best = std::min(best, dist);
    }
    return best;
}

cplx continue_S(cplx S0, cplx x0, cplx x1) {
    cplx S = S0;
    double t = 0.0, dt = 0.05;
    const double len = std::abs(x1 - x0);
    while (t < 1.0) {
        // keep each step small relative to the local scale |x|
        double cap = 0.25 * std::max(1.0, std::abs(x0 + (x1 - x0) * t)) / std::max(len, 1e-300);
        double tn = std::min(1.0, t + std::min(dt, cap));
        cplx xt = x0 + (x1 - x0) * tn;
        bool ok;
        cplx Sn = newton_S(S, xt, ok);
        // other two roots solve z^2 + Sn z + Sn^2 + xt = 0
        cplx disc = std::sqrt(Sn * Sn - 4.0 * (Sn * Sn + xt));
        cplx o1 = (-Sn + disc) / 2.0, o2 = (-Sn - disc) / 2.0;
        double sep = std::min(std::abs(Sn - o1), std::abs(Sn - o2));
        if (!ok || std::abs(Sn - S) > 0.3 * sep) {
            dt *= 0.5;
            if (dt < 1e-13) throw Error(ErrorKind::NonConvergence, "S continuation stalled");
            continue;
        }
        S = Sn;
        t = tn;
        dt = std::min(dt * 1.5, 0.1);
    }
    return S;
}

cplx solve_S(cplx x, bool* on_cut) {
    if (on_cut) *on_cut = sigma_S_distance(x) < 1e-10;
    const cplx S0 = -I * std::cbrt(2.0);
    for (bool up : {false, true}) {
        cplx d = ray_dir(up);
        cplx w = x * std::conj(d);
        double t = w.real(), s = w.imag();
        if (t > 2.5 && std::abs(s) < 0.3 * t) {
            // Detour on the side of x (left of the outward ray when on it).
            double sg = s >= 0.0 ? 1.0 : -1.0;
            cplx W1 = cplx(2.5, sg) * d, W2 = cplx(t, sg) * d;
            cplx S = continue_S(S0, 0.0, W1);
            S = continue_S(S, W1, W2);
            return continue_S(S, W2, x);
        }
    }
    return continue_S(S0, 0.0, x);
}

Genus0Data genus0_data_from_S(cplx x, cplx S) {
    Genus0Data d;
    d.x = x;
    d.S = S;
    d.Delta = std::sqrt(-4.0 * I / S);
    d.a = (S - d.Delta) / 2.0;
    d.b = (S + d.Delta) / 2.0;
    d.c = -S / 2.0;
    cplx lam0 = -2.0 * (I * x * S / 6.0 + std::log(-4.0 / d.Delta) + 1.0 / 3.0);
    // Integer shift of the logarithm so that 2h(b) + lambda vanishes.
    d.lambda = lam0;
    cplx v = 2.0 * h_eval(d.b, d) + lam0;
    double m = std::round(-v.imag() / (2.0 * pi));
    d.lambda = lam0 + 2.0 * pi * m * I;
    return d;
}

Genus0Data genus0_data(cplx x) { return genus0_data_from_S(x, solve_S(x)); }

cplx r_eval(cplx z, const Genus0Data& d) {
    if (z != d.b && z != d.a && dist_to_segment(z, d.a, d.b) < 1e-10)
        throw Error(ErrorKind::OnCut, "r evaluated on the band");
    if (z == d.a) return 0.0;
    return (z - d.a) * std::sqrt((z - d.b) / (z - d.a));
}

namespace {

cplx eta(cplx z) {
    if (z == 1.0 || z == -1.0) return 0.0;
    return I * (z - 1.0) * std::sqrt((z + 1.0) / (z - 1.0));
}

cplx arcsin_branch(cplx z) { return -I * std::log(I * z + eta(z)); }

}  // namespace

cplx h_eval(cplx z, const Genus0Data& d) {
    cplx r = r_eval(z, d);
    cplx w = std::sqrt((d.a - z) / (d.a - d.b));
    return I / 6.0 * r * (4.0 * z * z + 2.0 * d.S * z + 2.0 * d.x) - 2.0 * I * arcsin_branch(w) +
           I * d.x * d.S / 6.0 + std::log(-4.0 / d.Delta) + 1.0 / 3.0;
}

cplx h_prime(cplx z, const Genus0Data& d) { return I * (d.S + 2.0 * z) * r_eval(z, d); }

double frak_c(const Genus0Data& d) {
    // straight path b -> c; it meets the band only at b
    QuadratureRule rule;
    cplx v = integrate_segment([&](cplx w) { return w == d.b ? cplx(0.0) : h_prime(w, d); }, d.b, d.c, rule,
                               EndSing::Start);
    return 2.0 * v.real();
}

double frak_c(cplx x) { return frak_c(genus0_data(x)); }

double frak_c_closed(const Genus0Data& d) { return (2.0 * h_eval(d.c, d) + d.lambda).real(); }

double x0_root() {
    static std::once_flag once;
    static double x0;
    std::call_once(once, [] { x0 = bisect([](double t) { return frak_c(cplx(t, 0.0)); }, -3.0, 0.0, 1e-13); });
    return x0;
}

namespace {

struct TraceState {
    BoundaryTrace trace;
    std::optional<std::string> failure;
};

double ray_re(double im) { return im / std::sqrt(3.0); }

// Solve frak_c(q + s n) = 0 for real s by secant, starting at s = 0.
cplx correct(cplx q, cplx n) {
    double s0 = 0.0, s1 = 1e-3;
    double f0 = frak_c(q), f1 = frak_c(q + s1 * n);
    for (int it = 0; it < 40; ++it) {
        if (std::abs(f1) < 1e-12) return q + s1 * n;
        if (f1 == f0) break;
        double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        if (std::abs(s2 - s1) > 0.2) s2 = s1 + (s2 > s1 ? 0.2 : -0.2);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = frak_c(q + s1 * n);
        if (std::abs(s1 - s0) < 1e-14) return q + s1 * n;
    }
    if (std::abs(f1) < 1e-9) return q + s1 * n;
    throw Error(ErrorKind::TraceFailure, "corrector did not converge");
}

void trace_curve(std::vector<cplx>& pts, cplx prev, cplx cur, double step,
                 const std::function<bool(cplx)>& stop) {
    for (int n = 0; n < 5000; ++n) {
        cplx t = (cur - prev) / std::abs(cur - prev);
        cplx q = cur + step * t;
        cplx next = correct(q, I * t);
        if (std::abs(next - cur) > 3.0 * step || std::abs(next - cur) < 0.2 * step)
            throw Error(ErrorKind::TraceFailure, "trace step out of range");
        pts.push_back(next);
        prev = cur;
        cur = next;
        if (stop(cur)) return;
    }
    throw Error(ErrorKind::TraceFailure, "trace did not terminate");
}

const TraceState& trace_state() {
    static std::once_flag once;
    static TraceState st;
    std::call_once(once, [] {
        try {
            BoundaryTrace& tr = st.trace;
            cplx apex = apex_point(false);
            // right boundary: first point on the line just below the apex
            double im0 = apex.imag() - 0.05;
            double lo = ray_re(im0) + 1e-6, hi = lo + 4.0;
            double re0 = bisect([&](double r) { return frak_c(cplx(r, im0)); }, lo, hi, 1e-13);
            tr.right_lower = {apex, cplx(re0, im0)};
            trace_curve(tr.right_lower, apex, cplx(re0, im0), 0.05, [](cplx p) { return std::abs(p) > 30.0; });
            for (std::size_t i = 1; i < tr.right_lower.size(); ++i) {
                cplx p = tr.right_lower[i];
                if (p.real() <= ray_re(p.imag()) || p.imag() >= tr.right_lower[i - 1].imag())
                    throw Error(ErrorKind::TraceFailure, "right boundary left its expected sector");
            }
            // shared boundary from x0 down to the apex
            tr.x0 = x0_root();
            cplx start(tr.x0, 0.0);
            cplx first = correct(start - 0.05 * I, 1.0);
            tr.shared_lower = {start, first};
            trace_curve(tr.shared_lower, start, first, 0.05,
                        [&](cplx p) { return std::abs(p - apex) < 0.08; });
            tr.shared_lower.push_back(apex);
        } catch (const Error& e) {
            st.failure = e.what();
        }
    });
    return st;
}

}  // namespace

const BoundaryTrace& boundary_trace() {
    const TraceState& st = trace_state();
    if (st.failure) throw Error(ErrorKind::TraceFailure, *st.failure);
    return st.trace;
}

double right_boundary_re(double im) {
    const auto& pts = boundary_trace().right_lower;
    if (im >= pts.front().imag()) return pts.front().real();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (im >= pts[i].imag()) {
            double s = (im - pts[i - 1].imag()) / (pts[i].imag() - pts[i - 1].imag());
            return pts[i - 1].real() + s * (pts[i].real() - pts[i - 1].real());
        }
    }
    cplx p = pts[pts.size() - 1], q = pts[pts.size() - 2];
    double s = (im - p.imag()) / (p.imag() - q.imag());
    return p.real() + s * (p.real() - q.real());
}

Region classify_region(cplx x) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw Error(ErrorKind::NonFinite, "x not finite");
    if (std::abs(x - apex_point(false)) <= 1e-8 || std::abs(x - apex_point(true)) <= 1e-8) return Region::ApexPoint;
    bool up = x.imag() > 0.0;
    cplx xl = up ? std::conj(x) : x;
    Region pole = up ? Region::PoleRegionUp : Region::PoleRegionDown;
    auto by_sign = [&](double c, Region pos) {
        if (std::abs(c) <= 1e-10) return Region::BoundaryPoint;
        return c > 0.0 ? pos : Region::PoleFreeRight;
    };
    if (xl.imag() < apex_point(false).imag()) {
        if (sigma_S_distance(xl) < 1e-10) return Region::BoundaryPoint;
        if (xl.real() > ray_re(xl.imag())) {
            double rb = right_boundary_re(xl.imag());
            if (xl.real() < rb - 0.02) return pole;
            if (xl.real() > rb + 0.02) return Region::PoleFreeRight;
            return by_sign(frak_c(xl), pole);
        }
        // just left of the ray the b -> c segment can graze the band; the ray is the boundary there
        try {
            return by_sign(frak_c(xl), Region::PoleFreeLeft);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OnCut) throw;
            return Region::PoleFreeLeft;
        }
    }
    return by_sign(frak_c(xl), Region::PoleFreeLeft);
}

cplx genus0_value(cplx x) {
    Region r = classify_region(x);
    if (is_pole_region(r) || r == Region::ApexPoint)
        throw Error(ErrorKind::WrongRegion, std::string("x lies in ") + to_string(r), x);
    return -I * solve_S(x) / 2.0;
}

}  // namespace hmpii
