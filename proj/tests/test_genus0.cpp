#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hmpii/genus0.hpp"

using namespace hmpii;
const cplx I(0.0, 1.0);

namespace {

// Largest real root of T^3 - xT - 2 by bisection; S = -iT on the real axis.
double largest_root(double x) {
    double lo = 0.0, hi = 2.0 + std::sqrt(std::abs(x)) + 2.0;
    auto f = [x](double t) { return t * t * t - x * t - 2.0; };
    // f(hi) > 0; walk lo up past the local structure so f(lo) < 0 at the last sign change
    double best = lo;
    for (int i = 0; i <= 4000; ++i) {
        double t = hi * i / 4000.0;
        if (f(t) < 0) best = t;
    }
    lo = best;
    hi = best + hi / 4000.0;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        (f(m) < 0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Genus0, SpecialValuesOfS) {
    EXPECT_NEAR(std::abs(solve_S(0.0) + I * std::cbrt(2.0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(solve_S(3.0) + 2.0 * I), 0.0, 1e-12);
    EXPECT_LE(std::abs(solve_S(1e4) + 100.0 * I), 0.01);
    EXPECT_LE(std::abs(solve_S(-1e4) + 2e-4 * I), 1e-6);
}

TEST(Genus0, RealAxisMatchesLargestRoot) {
    for (double x : {-20.0, -3.0, -1.0, 0.5, 2.0, 7.5, 19.0}) {
        cplx S = solve_S(x);
        EXPECT_NEAR(std::abs(S + I * largest_root(x)), 0.0, 1e-10) << x;
        EXPECT_LT(S.imag(), 0.0);
    }
}

TEST(Genus0, CubicResidualOnGrid) {
    int n = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            cplx x(-20.0 + 40.0 * (i + 0.37) / 10.0, -20.0 + 40.0 * (j + 0.61) / 10.0);
            if (sigma_S_distance(x) < 1e-6) continue;
            cplx S = solve_S(x);
            EXPECT_LE(std::abs(S * S * S + x * S - 2.0 * I), 1e-12 * std::max(1.0, std::abs(x * S))) << x;
            ++n;
        }
    EXPECT_GT(n, 90);
}

TEST(Genus0, BranchContinuityAlongPath) {
    // arc from just below the upper ray to just above the lower one, through the positive axis
    cplx prev = solve_S(std::polar(6.0, 0.6 * M_PI));
    for (int i = 1; i <= 400; ++i) {
        cplx x = std::polar(6.0, 0.6 * M_PI - 1.2 * M_PI * i / 400.0);
        cplx S = solve_S(x);
        EXPECT_LT(std::abs(S - prev), 0.2) << x;
        prev = S;
    }
}

TEST(Genus0, DataAtZeroAndThree) {
    Genus0Data d = genus0_data(0.0);
    EXPECT_NEAR(std::abs(d.Delta - std::pow(2.0, 5.0 / 6.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d.a - cplx(-0.8908987181, -0.6299605249)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(d.b - cplx(0.8908987181, -0.6299605249)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(genus0_data(3.0).c - I), 0.0, 1e-12);
}

TEST(Genus0, DataInvariants) {
    for (cplx x : {cplx(-2.0, 0.0), cplx(1.0, 0.0), cplx(0.3, 1.2), cplx(-5.0, -1.0), cplx(4.0, -3.0)}) {
        Genus0Data d = genus0_data(x);
        EXPECT_NEAR(std::abs(d.Delta * d.Delta + 4.0 * I / d.S), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(d.a - (d.S - d.Delta) / 2.0), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(d.c + d.S / 2.0), 0.0, 1e-14);
        EXPECT_LE(d.a.real(), d.b.real());
        if (x.imag() == 0.0) {
            EXPECT_NEAR(std::abs(d.a + std::conj(d.b)), 0.0, 1e-12);
            EXPECT_GT(d.Delta.real(), 0.0);
            EXPECT_NEAR(d.Delta.imag(), 0.0, 1e-12);
            EXPECT_NEAR(d.c.real(), 0.0, 1e-12);
            EXPECT_GT(d.c.imag(), 0.0);
        }
    }
}

TEST(Genus0, REvalBranch) {
    Genus0Data d = genus0_data(1.0);
    EXPECT_NEAR(std::abs(r_eval(1e6, d) / 1e6 - 1.0), 0.0, 1e-5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int i = 0; i < 20; ++i) {
        cplx z(U(rng), U(rng));
        cplx r = r_eval(z, d);
        EXPECT_NEAR(std::abs(r * r - (z - d.a) * (z - d.b)), 0.0, 1e-12 * std::max(1.0, std::norm(z)));
    }
    cplx m = (d.a + d.b) / 2.0, n = I * (d.b - d.a) / std::abs(d.b - d.a);
    EXPECT_NEAR(std::abs(r_eval(m + 1e-9 * n, d) + r_eval(m - 1e-9 * n, d)), 0.0, 1e-7);
}

TEST(Genus0, HAtEndpointAndDerivative) {
    for (cplx x : {cplx(-4.5, 0.0), cplx(-1.0, 0.0), cplx(0.0, 0.0), cplx(1.5, 0.0), cplx(3.0, 0.0), cplx(-3.0, 1.0),
                   cplx(2.0, -1.5), cplx(-6.0, -2.0), cplx(0.5, 0.8), cplx(5.0, 4.0)}) {
        Genus0Data d = genus0_data(x);
        EXPECT_NEAR(std::abs(2.0 * h_eval(d.b, d) + d.lambda), 0.0, 1e-8) << x;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-3.0, 3.0);
        for (int i = 0; i < 10; ++i) {
            cplx z(U(rng), U(rng));
            if (dist_to_segment(z, d.a, d.b) < 0.05) continue;
            double h = 1e-5;
            cplx fd = (h_eval(z + h, d) - h_eval(z - h, d)) / (2.0 * h);
            cplx ex = I * (d.S + 2.0 * z) * r_eval(z, d);
            EXPECT_LE(std::abs(fd - ex), 1e-6 * std::max(1.0, std::abs(ex))) << x << " " << z;
            EXPECT_LE(std::abs(h_prime(z, d) - ex), 1e-12 * std::max(1.0, std::abs(ex)));
        }
    }
}

TEST(Genus0, JumpAcrossBand) {
    for (cplx x : {cplx(0.0, 0.0), cplx(-3.0, 0.0), cplx(2.0, 1.0)}) {
        Genus0Data d = genus0_data(x);
        cplx n = I * (d.b - d.a) / std::abs(d.b - d.a);
        for (double s : {0.2, 0.5, 0.8}) {
            cplx z = d.a + s * (d.b - d.a);
            cplx hp = h_eval(z + 1e-10 * n, d), hm = h_eval(z - 1e-10 * n, d);
            EXPECT_NEAR(std::abs(hp + hm + d.lambda), 0.0, 1e-8) << x << " " << s;
        }
    }
}

TEST(Genus0, SymmetryOnRealAxis) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (double x : {-4.5, -2.0, 0.0, 1.5, 3.0}) {
        Genus0Data d = genus0_data(x);
        for (int i = 0; i < 30; ++i) {
            cplx z(U(rng), U(rng));
            if (dist_to_segment(z, d.a, d.b) < 0.05 || dist_to_segment(-std::conj(z), d.a, d.b) < 0.05) continue;
            double l = (2.0 * h_eval(z, d) + d.lambda).real();
            double r = (2.0 * h_eval(-std::conj(z), d) + d.lambda).real();
            EXPECT_NEAR(l, r, 1e-10);
        }
    }
}

TEST(Genus0, FrakC) {
    double x0 = x0_root();
    EXPECT_NEAR(x0, -1.588, 2e-3);
    EXPECT_GT(frak_c(-4.5), 0.0);
    EXPECT_LT(frak_c(1.5), 0.0);
    EXPECT_NEAR(frak_c(-64.0), std::sqrt(2.0) / 3.0 * 512.0, 10.0);
    // quadrature and the closed form agree
    for (cplx x : {cplx(-4.5, 0.0), cplx(1.5, 0.0), cplx(-3.0, 1.0), cplx(2.0, -4.0)}) {
        Genus0Data d = genus0_data(x);
        EXPECT_NEAR(frak_c(d), frak_c_closed(d), 1e-8) << x;
    }
}

TEST(Genus0, Classification) {
    EXPECT_EQ(classify_region(1.5), Region::PoleFreeRight);
    EXPECT_EQ(classify_region(-4.5), Region::PoleFreeLeft);
    EXPECT_EQ(classify_region(std::polar(3.0, 2.0 * M_PI / 3.0)), Region::ApexPoint);
    EXPECT_EQ(classify_region(std::polar(3.0, -2.0 * M_PI / 3.0)), Region::ApexPoint);
    EXPECT_EQ(classify_region(cplx(-1.5, 6.0)), Region::PoleRegionUp);
    EXPECT_EQ(classify_region(cplx(-1.5, -10.0)), Region::PoleRegionDown);
    EXPECT_EQ(classify_region(cplx(10.0, -3.0)), Region::PoleFreeRight);
}

TEST(Genus0, BoundaryTraceIsAZeroSet) {
    const BoundaryTrace& bt = boundary_trace();
    ASSERT_GT(bt.right_lower.size(), 100u);
    for (std::size_t i = 1; i < bt.right_lower.size(); i += 25) EXPECT_LE(std::abs(frak_c(bt.right_lower[i])), 1e-8);
}

TEST(Genus0, Values) {
    EXPECT_NEAR(std::abs(genus0_value(0.0) + std::pow(2.0, -2.0 / 3.0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(genus0_value(3.0) + 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(genus0_value(1e4) + 50.0), 0.0, 0.01);
    try {
        genus0_value(cplx(-1.5, -10.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongRegion);
    }
}
