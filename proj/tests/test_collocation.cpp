#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hmpii/collocation.hpp"

using namespace hmpii;
using std::numbers::pi;

namespace {

const BvpSolution& base() {
    static BvpSolution s = solve_bvp(BvpProblem{});
    return s;
}

}  // namespace

TEST(Collocation, TwoPointMatrix) {
    ChebGrid g = build_grid(2);
    EXPECT_DOUBLE_EQ(g.t(0), 1.0);
    EXPECT_DOUBLE_EQ(g.t(1), -1.0);
    EXPECT_NEAR(g.D(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(g.D(0, 1), -0.5, 1e-15);
    EXPECT_NEAR(g.D(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(g.D(1, 1), -0.5, 1e-15);
}

TEST(Collocation, MatrixEntries) {
    const int N = 9;
    ChebGrid g = build_grid(N);
    const int M = N - 1;
    EXPECT_NEAR(g.D(0, 0), (2.0 * M * M + 1.0) / 6.0, 1e-12 * M * M);
    EXPECT_NEAR(g.D(N - 1, N - 1), -(2.0 * M * M + 1.0) / 6.0, 1e-12 * M * M);
    // an off-diagonal interior entry: c_k (-1)^{j+k} / (c_j (t_k - t_j)), c = 1 inside
    double t2 = std::cos(2.0 * pi / M), t5 = std::cos(5.0 * pi / M);
    EXPECT_NEAR(g.D(2, 5), -1.0 / (t2 - t5), 1e-12);
    double t3 = std::cos(3.0 * pi / M);
    EXPECT_NEAR(g.D(3, 3), -t3 / (2.0 * (1.0 - t3 * t3)), 1e-12 * M * M);
    EXPECT_NEAR(g.t(3), t3, 1e-15);
}

TEST(Collocation, DifferentiatesPolynomials) {
    for (int N : {4, 10, 33, 200}) {
        ChebGrid g = build_grid(N);
        Eigen::VectorXd one = Eigen::VectorXd::Ones(N);
        // absolute for small N; at N = 200 entries reach 1e4 and the product is judged against the row norm
        double rows = (g.D * one).cwiseAbs().maxCoeff();
        if (N <= 33) EXPECT_LE(rows, 1e-12) << N;
        EXPECT_LE(rows / g.D.cwiseAbs().rowwise().sum().maxCoeff(), 1e-12) << N;
        EXPECT_LE((g.D * g.t - one).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::VectorXd t2 = g.t.cwiseProduct(g.t);
        EXPECT_LE((g.D * t2 - 2.0 * g.t).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Collocation, BoundaryValuesAndNodes) {
    const auto& s = base();
    int N = s.grid.N;
    EXPECT_NEAR(std::abs(s.v(0) - 1.5 / 12.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.v(N - 1) - std::sqrt(6.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(eval_solution(s, 12.0).first - 1.5 / 12.0), 0.0, 1e-14);
    cplx yk = s.y_at(s.grid.t(17));
    EXPECT_NEAR(std::abs(eval_solution(s, yk).first - s.v(17)), 0.0, 1e-14);
    EXPECT_LE(s.residual, 1e-10);
}

TEST(Collocation, OffGridResidual) {
    const auto& s = base();
    for (int i = 0; i < 50; ++i) {
        double y = -11.7 + 23.4 * (i + 0.5) / 50.0;
        cplx u = eval_solution(s, y).first;
        cplx upp = eval_second(s, y);
        EXPECT_LE(std::abs(upp - (2.0 * u * u * u + y * u - 1.5)), 1e-6) << y;
    }
}

TEST(Collocation, RealSolution) {
    const auto& s = base();
    EXPECT_LE(s.v.imag().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Collocation, ValueAtZero) {
    auto [u, up] = eval_solution(base(), 0.0);
    EXPECT_NEAR(u.real(), 0.909099054021, 1e-9);
    EXPECT_NEAR(up.real(), -0.180376457113, 1e-9);
    // scaled value at k = 1 is near the genus-0 value -2^{-2/3}
    double p = -std::pow(2.0, -1.0 / 3.0) * u.real();
    EXPECT_LE(std::abs(p + std::pow(2.0, -2.0 / 3.0)), 0.2);
}

TEST(Collocation, DerivativeAgainstDifferences) {
    const auto& s = base();
    cplx y = 0.37;
    double h = 1e-4;
    cplx fd = (eval_solution(s, y + h).first - eval_solution(s, y - h).first) / (2.0 * h);
    EXPECT_LE(std::abs(fd - eval_solution(s, y).second), 1e-5);
}

TEST(Collocation, Refinement) {
    BvpProblem p;
    p.N = 100;
    BvpSolution coarse = solve_bvp(p);
    for (int i = 0; i < 10; ++i) {
        double y = -10.0 + 2.0 * i + 0.3;
        EXPECT_LE(std::abs(eval_solution(coarse, y).first - eval_solution(base(), y).first), 1e-8) << y;
    }
}

TEST(Collocation, Errors) {
    try {
        eval_solution(base(), cplx(0.0, 0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfSegment);
    }
    // preimage segment at Im x = -9 (k = 1) crosses the pole region
    BvpProblem p;
    double ys = std::cbrt(0.5);
    p.y1 = cplx(-12.0, 9.0 * ys);
    p.y2 = cplx(12.0, 9.0 * ys);
    try {
        solve_bvp(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RegionViolation);
    }
}
