#include "hmpii/theta.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace hmpii {

namespace {

const double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

bool crosses_band(const EndpointSet& e, cplx p, cplx q) {
    return segments_cross(p, q, e.A, e.B) || segments_cross(p, q, e.C, e.D);
}

cplx inv_R(cplx w, const EndpointSet& e) { return 1.0 / R_eval(w, e); }

// w^2/R - 1 = (w^4 - R^2) / (R (w^2 + R)), with the moment conditions used exactly.
cplx upsilon_reg(cplx w, const EndpointSet& e, cplx e4) {
    cplx r = R_eval(w, e);
    cplx num = -(e.x / 2.0) * w * w - I * w - e4;
    return num / (r * (w * w + r));
}

void check_theta(const ThetaParams& p) {
    if (p.B_period.real() >= 0.0) throw Error(ErrorKind::AssumptionViolated, "theta needs Re B < 0");
}

}  // namespace

cplx lattice_reduce(cplx z, cplx B, int* n, int* m) {
    double nn = std::round(z.real() / B.real());
    cplx w = z - nn * B;
    double mm = std::round(w.imag() / (2.0 * pi));
    w -= 2.0 * pi * mm * I;
    if (n) *n = static_cast<int>(nn);
    if (m) *m = static_cast<int>(mm);
    return w;
}

cplx theta(cplx z, const ThetaParams& p) {
    check_theta(p);
    const int N = p.truncation;
    cplx s = 0.0;
    for (int k = -N; k <= N; ++k) s += std::exp(double(k) * z + 0.5 * p.B_period * double(k) * double(k));
    double last = std::max(std::abs(std::exp(double(N) * z + 0.5 * p.B_period * double(N * N))),
                           std::abs(std::exp(-double(N) * z + 0.5 * p.B_period * double(N * N))));
    if (last > 1e-14 * std::max(std::abs(s), 1e-300) && last > 1e-14)
        throw Error(ErrorKind::TruncationInsufficient, "theta tail not negligible", z);
    return s;
}

cplx theta_prime(cplx z, const ThetaParams& p) {
    check_theta(p);
    const int N = p.truncation;
    cplx s = 0.0;
    for (int k = -N; k <= N; ++k) s += double(k) * std::exp(double(k) * z + 0.5 * p.B_period * double(k) * double(k));
    return s;
}

cplx theta_log_derivative(cplx z, const ThetaParams& p) {
    int n;
    cplx w = lattice_reduce(z, p.B_period, &n);
    cplx t = theta(w, p);
    if (std::abs(t) < 1e-12) throw Error(ErrorKind::ThetaZero, "theta vanishes at the argument", z);
    return theta_prime(w, p) / t - double(n);
}

cplx abel_raw(cplx z, const EndpointSet& e) {
    auto f = [&](cplx w) { return inv_R(w, e); };
    if (z == e.A) return 0.0;
    if (!crosses_band(e, e.A, z)) return integrate_segment(f, e.A, z, {}, EndSing::Start);
    for (double rad : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        for (int j = 0; j < 32; ++j) {
            cplx W = e.A + rad * std::polar(1.0, 2.0 * pi * j / 32.0);
            if (crosses_band(e, e.A, W) || crosses_band(e, W, z)) continue;
            if (dist_to_segment(e.B, W, z) < 0.05 || dist_to_segment(e.C, W, z) < 0.05 ||
                dist_to_segment(e.D, W, z) < 0.05)
                continue;
            return integrate_segment(f, e.A, W, {}, EndSing::Start) + integrate_segment(f, W, z);
        }
    }
    throw Error(ErrorKind::AssumptionViolated, "no band-free Abel path", z);
}

cplx abel(cplx z, const EndpointSet& e, const PeriodData& p) { return p.norm * abel_raw(z, e); }

PeriodData compute_periods(const EndpointSet& e, const SpectralConstants& s) {
    PeriodData p;
    auto one = [](cplx) { return cplx(1.0); };
    auto sq = [](cplx w) { return w * w; };
    p.a_period = -2.0 * band_integral(e, 1, one, -1);
    p.norm = 2.0 * pi * I / p.a_period;
    cplx gap_inv = gap_integral(e, one, -1);
    cplx Bp = p.norm * 2.0 * gap_inv;
    if (std::abs(Bp.real()) < 1e-12) throw Error(ErrorKind::NormalizationFailure, "Re B vanishes", e.x);
    p.b_sign = Bp.real() < 0.0 ? 1 : -1;
    p.B_period = double(p.b_sign) * Bp;
    p.A_minus1 = -p.norm;
    p.K = pi * I + p.B_period / 2.0;
    p.kappa = -2.0 * band_integral(e, 1, sq, -1) / (2.0 * pi * I);
    p.U = double(p.b_sign) * 2.0 * gap_integral(e, sq, -1) - p.kappa * p.B_period;
    p.F1 = (I * s.omega * gap_inv + I * s.Omega * band_integral(e, 2, one, -1)) / (2.0 * pi * I);
    p.Q = (e.B * e.D - e.A * e.C) / (e.B + e.D - e.A - e.C);
    // Abel map at infinity: along a ray from A that misses both bands
    const cplx dirs[] = {-1.0, std::polar(1.0, 0.9 * pi), std::polar(1.0, -0.9 * pi), std::polar(1.0, 0.75 * pi),
                         std::polar(1.0, -0.75 * pi), std::polar(1.0, 0.5 * pi), std::polar(1.0, -0.5 * pi)};
    auto s4 = symmetric_functions(e);
    bool found = false;
    for (cplx d : dirs) {
        if (crosses_band(e, e.A, e.A + 1e6 * d)) continue;
        auto f = [&](cplx w) { return inv_R(w, e); };
        auto g = [&](cplx w) { return upsilon_reg(w, e, s4[3]); };
        cplx a1 = integrate_segment(f, e.A, e.A + d, {}, EndSing::Start) + integrate_tail(f, e.A + d, d) * -1.0;
        cplx u1 = integrate_segment(g, e.A, e.A + d, {}, EndSing::Start) + integrate_tail(g, e.A + d, d) * -1.0;
        p.A_inf = p.norm * a1;
        p.Upsilon0_const = e.A - u1 + p.kappa * p.A_inf;
        p.inf_direction = d;
        found = true;
        break;
    }
    if (!found) throw Error(ErrorKind::AssumptionViolated, "no band-free ray from A to infinity", e.x);
    p.Upsilon_minus1 = -e.x / 4.0 + p.kappa * p.A_minus1;
    return p;
}

cplx gamma_fn(cplx z, const EndpointSet& e) {
    return std::pow((z - e.A) / (z - e.B), 0.25) * std::pow((z - e.C) / (z - e.D), 0.25);
}

cplx f_D(cplx z, const EndpointSet& e) {
    cplx g = gamma_fn(z, e);
    return (g + 1.0 / g) / 2.0;
}

cplx f_OD(cplx z, const EndpointSet& e) {
    cplx g = gamma_fn(z, e);
    return (g - 1.0 / g) / (2.0 * I);
}

Genus1State genus1_state(const EndpointSet& e, bool self_test) {
    Genus1State s;
    s.e = e;
    s.sc = spectral_constants(e, self_test);
    s.pd = compute_periods(e, s.sc);
    if (std::abs(f_OD(s.pd.Q, e)) > 1e-8) {
        if (std::abs(f_D(s.pd.Q, e)) < 1e-8)
            throw Error(ErrorKind::AssumptionViolated, "Q is a zero of f^D instead of f^OD", e.x);
        throw Error(ErrorKind::AssumptionViolated, "Q is not a zero of f^OD", e.x);
    }
    s.AQ = abel(s.pd.Q, e, s.pd);
    return s;
}

cplx genus1_formula(const Genus1State& s, double k) {
    const auto& p = s.pd;
    const auto& e = s.e;
    ThetaParams tp{p.B_period, 40};
    cplx sh = k * p.F1 * p.U;
    cplx P = p.A_inf + s.AQ + p.K;
    cplx M = p.A_inf - s.AQ - p.K;
    cplx L22 = theta_log_derivative(P + sh, tp) - theta_log_derivative(P, tp);
    cplx L12 = theta_log_derivative(M + sh, tp) - theta_log_derivative(M, tp);
    cplx ratio = (e.B * e.B + e.D * e.D - e.A * e.A - e.C * e.C) / (2.0 * (e.B + e.D - e.A - e.C));
    return I * (p.A_minus1 * (L22 - L12) - ratio);
}

cplx pole_condition(const Genus1State& s, double k, int family) {
    cplx sh = k * s.pd.F1 * s.pd.U;
    cplx v = s.pd.A_inf + (family == 0 ? s.AQ : -s.AQ) + sh;
    return lattice_reduce(v, s.pd.B_period);
}

namespace {

struct Node {
    bool ok = false;
    EndpointSet e;
    cplx g[2];
};

cplx eval_family(cplx x, const EndpointSet& seed, double k, int fam, EndpointSet* out) {
    EndpointSet e = continue_endpoints(seed, x, 0.05);
    if (out) *out = e;
    return pole_condition(genus1_state(e), k, fam);
}

}  // namespace

std::vector<cplx> predict_poles(const Window& w, double k, const PoleSearch& opt) {
    const double h = opt.spacing;
    int nr = std::max(2, int(std::ceil((w.re_max - w.re_min) / h)) + 1);
    int ni = std::max(2, int(std::ceil((w.im_max - w.im_min) / h)) + 1);
    std::vector<Node> grid(nr * ni);
    auto xat = [&](int i, int j) {
        return cplx(w.re_min + (w.re_max - w.re_min) * i / (nr - 1), w.im_min + (w.im_max - w.im_min) * j / (ni - 1));
    };
    bool any = false;
    for (int j = 0; j < ni; ++j) {
        const Node* prev = nullptr;
        for (int i = 0; i < nr; ++i) {
            cplx x = xat(i, j);
            Node& nd = grid[j * nr + i];
            try {
                if (!is_pole_region(classify_region(x))) {
                    prev = nullptr;
                    continue;
                }
                nd.e = prev ? continue_endpoints(prev->e, x, 0.05) : solve_endpoints(x);
                Genus1State st = genus1_state(nd.e);
                nd.g[0] = pole_condition(st, k, 0);
                nd.g[1] = pole_condition(st, k, 1);
                nd.ok = true;
                any = true;
                prev = &nd;
            } catch (const Error&) {
                prev = nullptr;
            }
        }
    }
    if (!any) throw Error(ErrorKind::WrongRegion, "window does not meet the pole region");
    std::vector<cplx> poles;
    for (int fam = 0; fam < 2; ++fam) {
        for (int j = 0; j < ni; ++j) {
            for (int i = 0; i < nr; ++i) {
                const Node& nd = grid[j * nr + i];
                if (!nd.ok) continue;
                double v = std::abs(nd.g[fam]);
                bool minimum = true;
                for (int dj = -1; dj <= 1 && minimum; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        int ii = i + di, jj = j + dj;
                        if ((di || dj) && ii >= 0 && ii < nr && jj >= 0 && jj < ni && grid[jj * nr + ii].ok &&
                            std::abs(grid[jj * nr + ii].g[fam]) < v)
                            minimum = false;
                    }
                if (!minimum) continue;
                // Newton in the real plane (x -> endpoints is only real-analytic)
                cplx x = xat(i, j);
                EndpointSet e = nd.e;
                cplx g = nd.g[fam];
                bool conv = false;
                for (int it = 0; it < 30; ++it) {
                    if (std::abs(g) < 1e-10) {
                        conv = true;
                        break;
                    }
                    const double d = 1e-6;
                    cplx gr = eval_family(x + d, e, k, fam, nullptr);
                    cplx gi = eval_family(x + cplx(0, d), e, k, fam, nullptr);
                    Eigen::Matrix2d J;
                    J << (gr - g).real() / d, (gi - g).real() / d, (gr - g).imag() / d, (gi - g).imag() / d;
                    Eigen::Vector2d rhs(-g.real(), -g.imag());
                    Eigen::Vector2d dx = J.fullPivLu().solve(rhs);
                    cplx step(dx(0), dx(1));
                    if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
                    x += step;
                    if (std::abs(x - xat(i, j)) > 3.0 * h) break;
                    try {
                        g = eval_family(x, e, k, fam, &e);
                    } catch (const Error&) {
                        break;
                    }
                }
                if (!conv) {
                    if (v < 0.05) throw Error(ErrorKind::GridTooCoarse, "pole refinement failed near a small minimum", x);
                    continue;
                }
                if (x.real() < w.re_min - h || x.real() > w.re_max + h || x.imag() < w.im_min - h ||
                    x.imag() > w.im_max + h)
                    continue;
                bool dup = false;
                for (cplx q : poles) dup = dup || std::abs(q - x) < 1e-6;
                if (!dup) poles.push_back(x);
            }
        }
    }
    std::sort(poles.begin(), poles.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return poles;
}

bool in_Sk(cplx x, double k, double delta, const std::vector<cplx>& poles) {
    double r = delta / std::pow(k, 2.0 / 3.0);
    for (cplx p : poles)
        if (std::abs(x - p) <= r) return false;
    return true;
}

cplx genus1_value(cplx x, double k, double delta) {
    EndpointSet e = solve_endpoints(x);
    Genus1State s = genus1_state(e);
    double r = delta / std::pow(k, 2.0 / 3.0);
    Window w{x.real() - r - 0.1, x.real() + r + 0.1, x.imag() - r - 0.1, x.imag() + r + 0.1};
    auto poles = predict_poles(w, k, {std::min(0.1, r / 2)});
    if (!in_Sk(x, k, delta, poles)) throw Error(ErrorKind::NearPole, "x lies within the excised pole disc", x);
    return genus1_formula(s, k);
}

}  // namespace hmpii
