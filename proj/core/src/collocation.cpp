#include "hmpii/collocation.hpp"

#include <cmath>
#include <numbers>

#include "hmpii/genus0.hpp"

namespace hmpii {

ChebGrid build_grid(int N) {
    if (N < 2) throw std::invalid_argument("Chebyshev grid needs N >= 2");
    ChebGrid g;
    g.N = N;
    g.t.resize(N);
    const double M = N - 1.0, q = std::numbers::pi / (2.0 * M);
    // sine forms keep the nodes symmetric and the differences accurate
    for (int k = 0; k < N; ++k) g.t(k) = std::sin((M - 2.0 * k) * q);
    g.D.resize(N, N);
    auto c = [&](int k) { return (k == 0 || k == N - 1) ? 2.0 : 1.0; };
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            if (k != j) {
                double diff = 2.0 * std::sin((j + k) * q) * std::sin((j - k) * q);
                g.D(k, j) = c(k) * (((j + k) % 2) ? -1.0 : 1.0) / (c(j) * diff);
            }
    // diagonal as minus the off-diagonal row sum; equals the closed form up to rounding
    for (int k = 0; k < N; ++k) {
        double s = 0.0;
        for (int j = 0; j < N; ++j)
            if (j != k) s += g.D(k, j);
        g.D(k, k) = -s;
    }
    return g;
}

cplx BvpSolution::y_at(double t) const {
    return 0.5 * (problem.y1 + problem.y2 + (problem.y2 - problem.y1) * t);
}

namespace {

void check_segment(const BvpProblem& p) {
    double k = p.alpha - 0.5;
    if (k <= 0.0) return;
    double sc = std::pow(k, 2.0 / 3.0) / std::cbrt(2.0);
    for (int i = 0; i <= 200; ++i) {
        cplx y = p.y1 + (p.y2 - p.y1) * (i / 200.0);
        cplx x = -y / sc;
        if (is_pole_region(classify_region(x)))
            throw Error(ErrorKind::RegionViolation, "collocation segment enters the pole region", y);
    }
}

}  // namespace

BvpSolution solve_bvp(const BvpProblem& p) {
    if (p.alpha == 0.0) throw std::invalid_argument("alpha = 0 is not supported");
    if (std::abs(p.y1.imag() - p.y2.imag()) > 1e-14 || p.y1.real() >= p.y2.real())
        throw std::invalid_argument("segment must be horizontal with Re y1 < Re y2");
    if (p.check_region) check_segment(p);
    BvpSolution s;
    s.problem = p;
    s.grid = build_grid(p.N);
    const int N = p.N;
    const Eigen::MatrixXd D2 = s.grid.D * s.grid.D;
    const cplx scale = (p.y2 - p.y1) * (p.y2 - p.y1) / 4.0;
    Eigen::VectorXcd f(N);
    for (int k = 0; k < N; ++k) f(k) = s.y_at(s.grid.t(k));
    const cplx v1 = p.alpha / p.y2, vN = std::sqrt(-p.y1 / 2.0);
    auto residual = [&](const Eigen::VectorXcd& vv) {
        Eigen::VectorXcd F = D2.cast<cplx>() * vv;
        for (int k = 0; k < N; ++k) F(k) -= scale * (2.0 * vv(k) * vv(k) * vv(k) + f(k) * vv(k) - p.alpha);
        F(0) = vv(0) - v1;
        F(N - 1) = vv(N - 1) - vN;
        return F;
    };
    const Eigen::MatrixXd absD2 = D2.cwiseAbs();
    // Residual relative to the size of the terms in each equation.
    auto rel_residual = [&](const Eigen::VectorXcd& vv, const Eigen::VectorXcd& F) {
        Eigen::VectorXd mag = absD2 * vv.cwiseAbs();
        double worst = 0.0;
        for (int k = 1; k < N - 1; ++k) {
            double a = std::abs(vv(k));
            double ref = mag(k) + std::abs(scale) * (2.0 * a * a * a + std::abs(f(k)) * a + std::abs(p.alpha));
            worst = std::max(worst, std::abs(F(k)) / ref);
        }
        worst = std::max(worst, std::abs(F(0)) / std::abs(v1));
        return std::max(worst, std::abs(F(N - 1)) / std::abs(vN));
    };
    // Damped Newton; returns false if it stalls above roundoff level.
    auto newton = [&](Eigen::VectorXcd& v, int& it, double& rel) {
        Eigen::VectorXcd F = residual(v);
        double nf = F.cwiseAbs().maxCoeff();
        for (it = 0; it < 100; ++it) {
            Eigen::MatrixXcd J = D2.cast<cplx>();
            for (int k = 0; k < N; ++k) J(k, k) -= scale * (6.0 * v(k) * v(k) + f(k));
            J.row(0).setZero();
            J(0, 0) = 1.0;
            J.row(N - 1).setZero();
            J(N - 1, N - 1) = 1.0;
            Eigen::VectorXcd dv = J.partialPivLu().solve(-F);
            if (dv.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + v.cwiseAbs().maxCoeff())) break;
            double lam = 1.0;
            bool ok = false;
            Eigen::VectorXcd vn, Fn;
            for (int h = 0; h <= 30; ++h, lam *= 0.5) {
                vn = v + lam * dv;
                Fn = residual(vn);
                if (Fn.cwiseAbs().maxCoeff() < nf) {
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
            v = vn;
            F = Fn;
            nf = F.cwiseAbs().maxCoeff();
        }
        rel = rel_residual(v, F);
        return rel <= 1e-12;
    };
    int it = 0;
    double nf = 0.0;
    Eigen::VectorXcd v(N);
    for (int k = 0; k < N; ++k) v(k) = v1 + (vN - v1) * (1.0 - s.grid.t(k)) / 2.0;
    if (!newton(v, it, nf)) {
        // Linear start failed: restart from the two asymptotic profiles sqrt(-y/2) and alpha/y.
        for (int k = 0; k < N; ++k) v(k) = f(k).real() < 0.0 ? std::sqrt(-f(k) / 2.0) : p.alpha / f(k);
        v(0) = v1;
        v(N - 1) = vN;
        if (!newton(v, it, nf)) throw Error(ErrorKind::NewtonDivergence, "collocation Newton did not converge");
    }
    s.v = v;
    s.dv = s.grid.D.cast<cplx>() * v;
    s.iterations = it;
    s.residual = nf;
    return s;
}

namespace {

cplx bary(const ChebGrid& g, const Eigen::VectorXcd& vals, double t) {
    const int N = g.N;
    cplx num = 0.0;
    double den = 0.0;
    for (int k = 0; k < N; ++k) {
        double d = t - g.t(k);
        if (d == 0.0) return vals(k);
        double w = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == N - 1) ? 0.5 : 1.0);
        num += w * vals(k) / d;
        den += w / d;
    }
    return num / den;
}

double to_t(const BvpSolution& s, cplx y) {
    const auto& p = s.problem;
    double t = ((2.0 * y - p.y1 - p.y2) / (p.y2 - p.y1)).real();
    double resid = std::abs(s.y_at(t) - y);
    if (t < -1.0 - 1e-12 || t > 1.0 + 1e-12 || resid > 1e-9 * (1.0 + std::abs(y)))
        throw Error(ErrorKind::OutOfSegment, "point is not on the collocation segment", y);
    return std::clamp(t, -1.0, 1.0);
}

}  // namespace

std::pair<cplx, cplx> eval_solution(const BvpSolution& s, cplx y) {
    double t = to_t(s, y);
    cplx dtdy = 2.0 / (s.problem.y2 - s.problem.y1);
    return {bary(s.grid, s.v, t), bary(s.grid, s.dv, t) * dtdy};
}

cplx eval_second(const BvpSolution& s, cplx y) {
    double t = to_t(s, y);
    cplx dtdy = 2.0 / (s.problem.y2 - s.problem.y1);
    Eigen::VectorXcd d2 = s.grid.D.cast<cplx>() * s.dv;
    return bary(s.grid, d2, t) * dtdy * dtdy;
}

}  // namespace hmpii
