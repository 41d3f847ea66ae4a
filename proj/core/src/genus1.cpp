#include "hmpii/genus1.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>

namespace hmpii {

namespace {

const double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

std::array<double, 8> to_vec(const EndpointSet& e) {
    return {e.A.real(), e.A.imag(), e.B.real(), e.B.imag(), e.C.real(), e.C.imag(), e.D.real(), e.D.imag()};
}

EndpointSet from_vec(const std::array<double, 8>& v, cplx x) {
    return {cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5]), cplx(v[6], v[7]), x};
}

double max_abs(const std::array<double, 8>& r) {
    double m = 0.0;
    for (double t : r) m = std::max(m, std::abs(t));
    return m;
}

}  // namespace

double EndpointSet::min_separation() const {
    auto p = points();
    double m = 1e300;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m = std::min(m, std::abs(p[i] - p[j]));
    return m;
}

SurfaceContours make_contours(const EndpointSet& e) {
    SurfaceContours c{Path::segment(e.A, e.B), Path::segment(e.B, e.C), Path::segment(e.C, e.D),
                      Path::segment(e.A - 1e6, e.A)};
    const std::array<std::pair<cplx, cplx>, 4> segs = {
        std::pair{e.A, e.B}, {e.B, e.C}, {e.C, e.D}, {e.A - 1e6, e.A}};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (segments_cross(segs[i].first, segs[i].second, segs[j].first, segs[j].second))
                throw Error(ErrorKind::AssumptionViolated, "straight contours cross", e.x);
    return c;
}

std::array<cplx, 4> symmetric_functions(const EndpointSet& e) {
    cplx A = e.A, B = e.B, C = e.C, D = e.D;
    return {A + B + C + D, A * B + A * C + A * D + B * C + B * D + C * D,
            A * B * C + A * B * D + A * C * D + B * C * D, A * B * C * D};
}

cplx R_eval(cplx z, const EndpointSet& e, int sheet) {
    double tol = 1e-13 * (1.0 + std::abs(z));
    auto on = [&](cplx p, cplx q) { return z != p && z != q && dist_to_segment(z, p, q) < tol; };
    if (on(e.A, e.B) || on(e.C, e.D)) throw Error(ErrorKind::OnCut, "R evaluated on a band", z);
    if (z == e.A || z == e.B || z == e.C || z == e.D) return 0.0;
    cplx v = (z - e.A) * (z - e.C) * std::sqrt((z - e.B) / (z - e.A)) * std::sqrt((z - e.D) / (z - e.C));
    return sheet >= 0 ? v : -v;
}

cplx R_plus_band(const EndpointSet& e, int band, double s, cplx* wout, double s1) {
    if (s1 < 0.0) s1 = 1.0 - s;
    // (w - start) sqrt(s1/s) = sqrt(s s1) (end - start), formed without the cancelling difference
    double g = std::sqrt(s * s1);
    cplx w, v;
    if (band == 1) {
        w = s < 0.5 ? e.A + s * (e.B - e.A) : e.B - s1 * (e.B - e.A);
        v = g * (e.B - e.A) * (w - e.C) * I * std::sqrt((w - e.D) / (w - e.C));
    } else {
        w = s < 0.5 ? e.C + s * (e.D - e.C) : e.D - s1 * (e.D - e.C);
        v = (w - e.A) * g * (e.D - e.C) * std::sqrt((w - e.B) / (w - e.A)) * I;
    }
    if (wout) *wout = w;
    return v;
}

cplx band_integral(const EndpointSet& e, int band, const CFun& g, int power) {
    cplx p = band == 1 ? e.A : e.C, q = band == 1 ? e.B : e.D;
    auto f = [&](double th) -> cplx {
        // half-angle forms keep s and 1 - s accurate at both ends
        double sh = std::sin(0.5 * th), ch = std::cos(0.5 * th);
        double s = sh * sh, s1 = ch * ch;
        if (s <= 0.0 || s1 <= 0.0) return 0.0;
        cplx w;
        cplx r = R_plus_band(e, band, s, &w, s1);
        return g(w) * std::pow(r, power) * (q - p) * (0.5 * std::sin(th));
    };
    return integrate_real(f, 0.0, pi);
}

cplx gap_integral(const EndpointSet& e, const CFun& g, int power) {
    return integrate_segment(
        [&](cplx w) { return g(w) * std::pow(R_eval(w, e), power); }, e.B, e.C, {}, EndSing::Both);
}

std::array<double, 8> residuals(const EndpointSet& e) {
    if (e.min_separation() < 1e-6) throw Error(ErrorKind::DegenerateEndpoints, "endpoints coincide", e.x);
    auto s = symmetric_functions(e);
    cplx r1 = s[0], r2 = s[1] - e.x / 2.0, r3 = s[2] + I;
    auto one = [](cplx) { return cplx(1.0); };
    double b1 = band_integral(e, 1, one, 1).imag();
    double b2 = gap_integral(e, one, 1).imag();
    return {r1.real(), r1.imag(), r2.real(), r2.imag(), r3.real(), r3.imag(), b1, b2};
}

EndpointSet newton_endpoints(cplx x, const EndpointSet& seed, SolveInfo* info) {
    auto v = to_vec(seed);
    auto F = residuals(from_vec(v, x));
    double nf = max_abs(F);
    int it = 0;
    for (; it < 100 && nf > 1e-13; ++it) {
        Eigen::Matrix<double, 8, 8> J;
        double hscale = 1e-6 * (1.0 + std::abs(seed.A));
        for (int j = 0; j < 8; ++j) {
            auto vp = v, vm = v;
            vp[j] += hscale;
            vm[j] -= hscale;
            auto Fp = residuals(from_vec(vp, x)), Fm = residuals(from_vec(vm, x));
            for (int i = 0; i < 8; ++i) J(i, j) = (Fp[i] - Fm[i]) / (2.0 * hscale);
        }
        Eigen::Matrix<double, 8, 1> rhs;
        for (int i = 0; i < 8; ++i) rhs(i) = -F[i];
        Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(J);
        if (lu.rank() < 8) throw Error(ErrorKind::NonConvergence, "singular endpoint Jacobian", x);
        Eigen::Matrix<double, 8, 1> dv = lu.solve(rhs);
        double lam = 1.0;
        std::array<double, 8> vn{}, Fn{};
        bool accepted = false;
        for (int h = 0; h < 30; ++h, lam *= 0.5) {
            for (int i = 0; i < 8; ++i) vn[i] = v[i] + lam * dv(i);
            try {
                Fn = residuals(from_vec(vn, x));
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::DegenerateEndpoints && err.kind() != ErrorKind::NonConvergence &&
                    err.kind() != ErrorKind::NonFinite)
                    throw;
                continue;
            }
            if (max_abs(Fn) < nf) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (nf <= 1e-10) break;
            throw Error(ErrorKind::NonConvergence, "damped Newton stalled", x);
        }
        v = vn;
        F = Fn;
        nf = max_abs(F);
    }
    if (nf > 1e-10) throw Error(ErrorKind::NonConvergence, "endpoint Newton did not converge", x);
    EndpointSet out = from_vec(v, x);
    if (out.min_separation() < 1e-6) throw Error(ErrorKind::DegenerateEndpoints, "iterates collapsed", x);
    if (info) {
        info->iterations = it;
        info->residual = nf;
    }
    return out;
}

EndpointSet label_endpoints(const EndpointSet& e) {
    auto E = e.points();
    auto poly = [&](cplx z) { return (z - E[0]) * (z - E[1]) * (z - E[2]) * (z - E[3]); };
    double big = 0.0;
    for (auto p : E) big = std::max(big, std::abs(p));
    const double escape = std::max(30.0, 10.0 * big);
    std::set<std::pair<int, int>> edges;
    std::array<std::vector<double>, 4> rays;
    for (int i = 0; i < 4; ++i) {
        cplx p = E[i];
        cplx rho = 1.0;
        double dmin = 1e300;
        for (int j = 0; j < 4; ++j)
            if (j != i) {
                rho *= p - E[j];
                dmin = std::min(dmin, std::abs(p - E[j]));
            }
        rho = std::sqrt(rho);
        for (int m = 0; m < 3; ++m) {
            double th = (m * pi - std::arg(rho)) * 2.0 / 3.0;
            cplx z = p + 1e-3 * dmin * std::polar(1.0, th);
            cplx r = rho * std::sqrt(z - p);
            if ((r * std::polar(1.0, th)).real() < 0) r = -r;
            auto dir = [&](cplx zz, cplx rprev, cplx& rout) {
                cplx rr = std::sqrt(poly(zz));
                if (std::abs(rr - rprev) > std::abs(rr + rprev)) rr = -rr;
                rout = rr;
                cplx d = std::conj(rr);
                return d / std::abs(d);
            };
            int hit = -1;
            for (int it = 0; it < 40000 && hit < 0; ++it) {
                double dnow = 1e300;
                for (auto q : E) dnow = std::max(std::min(dnow, std::abs(z - q)), 0.0);
                double h = std::min(0.02, 0.2 * std::max(dnow, 1e-6)) * std::max(1.0, std::abs(z) / 5.0);
                cplx r1, r2;
                cplx d1 = dir(z, r, r1);
                cplx d2 = dir(z + 0.5 * h * d1, r1, r2);
                z += h * d2;
                dir(z, r2, r);
                for (int j = 0; j < 4; ++j)
                    if (j != i && std::abs(z - E[j]) < 0.01 * dmin) hit = j;
                if (std::abs(z) > escape) break;
            }
            if (hit >= 0)
                edges.insert({std::min(i, hit), std::max(i, hit)});
            else
                rays[i].push_back(std::arg(z));
        }
    }
    std::array<int, 4> deg{};
    for (auto [a, b] : edges) {
        ++deg[a];
        ++deg[b];
    }
    std::vector<int> ends;
    for (int i = 0; i < 4; ++i)
        if (deg[i] == 1) ends.push_back(i);
    if (edges.size() != 3 || ends.size() != 2)
        throw Error(ErrorKind::AssumptionViolated, "critical graph is not a chain", e.x);
    auto score = [&](int i) {
        double s = 1e300;
        for (double a : rays[i]) s = std::min(s, std::abs(std::arg(-std::polar(1.0, a))));
        return s;
    };
    int a = score(ends[0]) <= score(ends[1]) ? ends[0] : ends[1];
    std::vector<int> order{a};
    while (order.size() < 4) {
        int cur = order.back(), nxt = -1;
        for (auto [p, q] : edges) {
            int o = p == cur ? q : (q == cur ? p : -1);
            if (o >= 0 && std::find(order.begin(), order.end(), o) == order.end()) nxt = o;
        }
        if (nxt < 0) throw Error(ErrorKind::AssumptionViolated, "critical graph walk failed", e.x);
        order.push_back(nxt);
    }
    return {E[order[0]], E[order[1]], E[order[2]], E[order[3]], e.x};
}

EndpointSet solve_endpoints(cplx x, const EndpointSet& seed, SolveInfo* info) {
    return label_endpoints(newton_endpoints(x, seed, info));
}

EndpointSet continue_endpoints(const EndpointSet& from, cplx x, double step, int* max_iters) {
    int n = std::max(1, static_cast<int>(std::ceil(std::abs(x - from.x) / step)));
    EndpointSet cur = from;
    int worst = 0;
    for (int j = 1; j <= n; ++j) {
        SolveInfo si;
        cur = newton_endpoints(from.x + (x - from.x) * (double(j) / n), cur, &si);
        worst = std::max(worst, si.iterations);
    }
    if (max_iters) *max_iters = worst;
    return label_endpoints(cur);
}

namespace {

// Zero of frak_c on the horizontal line through im, near the traced boundary.
double refined_boundary(double im) {
    double r0 = right_boundary_re(im);
    double s0 = r0, s1 = r0 + 1e-3;
    double f0 = frak_c(cplx(s0, im)), f1 = frak_c(cplx(s1, im));
    for (int it = 0; it < 50 && std::abs(f1) > 1e-13 && f1 != f0; ++it) {
        double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = frak_c(cplx(s1, im));
    }
    return s1;
}

EndpointSet conj_map(const EndpointSet& e) {
    return {-std::conj(e.A), -std::conj(e.B), -std::conj(e.C), -std::conj(e.D), std::conj(e.x)};
}

}  // namespace

EndpointSet solve_endpoints(cplx x, SolveInfo* info) {
    Region reg = classify_region(x);
    if (!is_pole_region(reg)) throw Error(ErrorKind::WrongRegion, "x is not in the pole region", x);
    if (x.imag() > 0.0) return label_endpoints(conj_map(solve_endpoints(std::conj(x), info)));
    double im = x.imag();
    double rb = refined_boundary(im);
    double ray = im / std::sqrt(3.0);
    double xs_re = std::min(x.real(), rb - 0.1);
    if (xs_re <= ray) xs_re = 0.5 * (ray + rb);
    cplx xs(xs_re, im);
    Genus0Data g = genus0_data(cplx(rb, im));
    const double phis[] = {pi, 0.0, pi / 2, -pi / 2, 3 * pi / 4, -3 * pi / 4, pi / 4, -pi / 4};
    for (double eps : {0.1, 0.05, 0.2}) {
        for (double phi : phis) {
            cplx d = eps * std::polar(1.0, phi);
            EndpointSet seed{g.a, g.b, g.c + d, g.c - d, xs};
            try {
                EndpointSet e = newton_endpoints(xs, seed, info);
                if (e.min_separation() < 1e-3) continue;
                e = label_endpoints(e);
                if (xs == x) return e;
                return continue_endpoints(e, x, 0.05);
            } catch (const Error&) {
                continue;
            }
        }
    }
    throw Error(ErrorKind::NonConvergence, "no genus-0 seed converged", x);
}

cplx H_prime(cplx z, const EndpointSet& e) { return 2.0 * I * R_eval(z, e); }

cplx H_prime_oracle(cplx z, const EndpointSet& e) {
    cplx thp = 4.0 * z * z + e.x;
    auto g = [&](cplx w) { return I * (4.0 * w * w + e.x) / (w - z); };
    cplx cauchy = band_integral(e, 1, g, -1) + band_integral(e, 2, g, -1);
    cplx Gp = R_eval(z, e) / (2.0 * pi * I) * cauchy;
    return I * thp / 2.0 - Gp;
}

namespace {

bool crosses_any(const EndpointSet& e, cplx p, cplx q) {
    return segments_cross(p, q, e.A, e.B) || segments_cross(p, q, e.B, e.C) || segments_cross(p, q, e.C, e.D) ||
           segments_cross(p, q, e.A - 1e6, e.A);
}

}  // namespace

cplx H_eval(cplx z, const EndpointSet& e) {
    auto s = symmetric_functions(e);
    cplx x = e.x;
    // 2iR - i theta'/2 + 1/(w-A), written without cancellation at large w.  The moment
    // conditions e1 = 0, e2 = x/2, e3 = -i are used exactly so the tail decays like 1/w^2.
    auto f = [&](cplx w) {
        cplx r = R_eval(w, e);
        cplx num = I * w + s[3] - x * x / 16.0;
        return 2.0 * I * num / (r + w * w + x / 4.0) + 1.0 / (w - e.A);
    };
    double big = 0.0;
    for (auto p : e.points()) big = std::max(big, std::abs(p));
    double T = 4.0 * big + std::abs(z) + 4.0;
    for (double rad : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        for (int k = 0; k < 16; ++k) {
            cplx d = std::polar(1.0, 2.0 * pi * k / 16.0);
            for (int k2 = 0; k2 < (rad > 0 ? 16 : 1); ++k2) {
                cplx W = z + rad * std::polar(1.0, 2.0 * pi * k2 / 16.0);
                if (crosses_any(e, W, W + d * 1e6) || (rad > 0 && crosses_any(e, z, W))) continue;
                cplx val = integrate_tail(f, W + d * T, d) + integrate_segment(f, W + d * T, W);
                if (rad > 0) val += integrate_segment(f, W, z);
                return I * (4.0 / 3.0 * z * z * z + x * z) / 2.0 - std::log(z - e.A) + val;
            }
        }
    }
    throw Error(ErrorKind::AssumptionViolated, "no cut-free path from infinity", z);
}

SpectralConstants spectral_constants(const EndpointSet& e, bool self_test) {
    SpectralConstants sc;
    auto one = [](cplx) { return cplx(1.0); };
    sc.omega_raw = 4.0 * band_integral(e, 2, one, 1);
    sc.Omega_raw = -4.0 * gap_integral(e, one, 1);
    if (std::abs(sc.omega_raw.imag()) > 1e-8 || std::abs(sc.Omega_raw.imag()) > 1e-8)
        throw Error(ErrorKind::RealityViolation, "omega or Omega not real", e.x);
    sc.omega = sc.omega_raw.real();
    sc.Omega = sc.Omega_raw.real();
    if (!self_test) return sc;
    // one-sided limits by linear extrapolation from offsets eps and 2 eps
    const double eps = 1e-7;
    auto sides = [&](cplx p, cplx q, cplx& hp, cplx& hm) {
        cplx m = 0.5 * (p + q), n = I * (q - p) / std::abs(q - p);
        hp = 2.0 * H_eval(m + eps * n, e) - H_eval(m + 2.0 * eps * n, e);
        hm = 2.0 * H_eval(m - eps * n, e) - H_eval(m - 2.0 * eps * n, e);
    };
    cplx hp, hm;
    sides(e.A, e.B, hp, hm);
    sc.Lambda = -(hp + hm);
    sides(e.B, e.C, hp, hm);
    cplx om_direct = (hp - hm) / (-I);
    sides(e.C, e.D, hp, hm);
    cplx Om_direct = (-(hp + hm) - sc.Lambda) / I;
    // Sign fixed against the direct two-sided difference.
    if (std::abs(-sc.omega - om_direct) < std::abs(sc.omega - om_direct)) sc.omega = -sc.omega;
    if (std::abs(-sc.Omega - Om_direct) < std::abs(sc.Omega - Om_direct)) sc.Omega = -sc.Omega;
    sc.self_test = std::max(std::abs(sc.omega - om_direct), std::abs(sc.Omega - Om_direct));
    return sc;
}

}  // namespace hmpii
