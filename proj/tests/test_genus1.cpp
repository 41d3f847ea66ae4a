#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hmpii/genus1.hpp"

using namespace hmpii;
const cplx I(0.0, 1.0);

namespace {

const cplx kSamples[] = {{-1.5, -10.0}, {-4.0, -8.0}, {1.0, -8.0}, {-1.5, -4.0}, {-1.5, 10.0}};

double max_abs(const std::array<double, 8>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

// distance between two unordered 4-point sets
double set_distance(std::array<cplx, 4> a, std::array<cplx, 4> b) {
    double best = 1e300;
    std::sort(b.begin(), b.end(), [](cplx p, cplx q) { return p.real() < q.real(); });
    do {
        double d = 0.0;
        for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
        best = std::min(best, d);
    } while (std::next_permutation(b.begin(), b.end(), [](cplx p, cplx q) { return p.real() < q.real(); }));
    return best;
}

}  // namespace

TEST(Genus1, EndpointResiduals) {
    for (cplx x : kSamples) {
        ASSERT_TRUE(is_pole_region(classify_region(x))) << x;
        SolveInfo info;
        EndpointSet e = solve_endpoints(x, &info);
        EXPECT_LE(max_abs(residuals(e)), 1e-10) << x;
        EXPECT_GT(e.min_separation(), 1e-3);
        // the moment conditions, checked directly on the points
        cplx s1 = e.A + e.B + e.C + e.D;
        cplx s3 = e.A * e.B * e.C + e.A * e.B * e.D + e.A * e.C * e.D + e.B * e.C * e.D;
        EXPECT_LE(std::abs(s1), 1e-10);
        EXPECT_LE(std::abs(s3 + I), 1e-10);
    }
}

TEST(Genus1, ConjugateSymmetry) {
    // z -> -conj(z) maps the system at x to the one at conj(x)
    cplx x(-2.0, -9.0);
    EndpointSet e = solve_endpoints(x), f = solve_endpoints(std::conj(x));
    std::array<cplx, 4> m;
    auto p = e.points();
    for (int i = 0; i < 4; ++i) m[i] = -std::conj(p[i]);
    std::sort(m.begin(), m.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    EXPECT_LE(set_distance(m, f.points()), 1e-9);
}

TEST(Genus1, DegenerateEndpointsDetected) {
    EndpointSet e{1.0, 1.0, cplx(0.0, 1.0), cplx(-2.0, -1.0), cplx(-1.5, -10.0)};
    try {
        residuals(e);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::DegenerateEndpoints);
    }
}

TEST(Genus1, RBranchAtInfinity) {
    EndpointSet e = solve_endpoints(cplx(-1.5, -10.0));
    for (cplx z : {cplx(1e3, 0.0), cplx(0.0, 1e3), cplx(-7e2, -7e2)}) {
        EXPECT_LE(std::abs(R_eval(z, e) / (z * z) - 1.0), 1e-2) << z;
        EXPECT_NEAR(std::abs(R_eval(z, e, -1) + R_eval(z, e)), 0.0, 1e-9 * std::norm(z));
    }
    cplx z(0.37, 2.2);
    cplx r = R_eval(z, e);
    EXPECT_LE(std::abs(r * r - (z - e.A) * (z - e.B) * (z - e.C) * (z - e.D)), 1e-10 * std::max(1.0, std::norm(r)));
}

TEST(Genus1, HPrimeAgainstCauchyOracle) {
    for (cplx x : {cplx(-1.5, -10.0), cplx(-4.0, -8.0)}) {
        EndpointSet e = solve_endpoints(x);
        for (cplx z : {cplx(3.0, 3.0), cplx(-4.0, 1.0), cplx(0.5, -6.0), cplx(6.0, -1.0)}) {
            cplx a = H_prime(z, e), b = H_prime_oracle(z, e);
            EXPECT_LE(std::abs(a - b), 1e-8 * std::max(1.0, std::abs(a))) << x << " " << z;
        }
    }
}

TEST(Genus1, HPrimeMatchesDifferencedH) {
    EndpointSet e = solve_endpoints(cplx(-1.5, -10.0));
    cplx z(3.0, 3.0);
    double h = 1e-5;
    cplx fd = (H_eval(z + h, e) - H_eval(z - h, e)) / (2.0 * h);
    EXPECT_LE(std::abs(fd - H_prime(z, e)), 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST(Genus1, SpectralConstantsAreReal) {
    for (cplx x : kSamples) {
        SpectralConstants s = spectral_constants(solve_endpoints(x), true);
        EXPECT_LE(std::abs(s.omega_raw.imag()), 1e-8) << x;
        EXPECT_LE(std::abs(s.Omega_raw.imag()), 1e-8) << x;
        EXPECT_GE(s.self_test, 0.0);
        EXPECT_LE(s.self_test, 1e-8) << x;
    }
}

TEST(Genus1, ContinuationIsCheap) {
    EndpointSet e = solve_endpoints(cplx(-1.5, -10.0));
    int worst = 0;
    EndpointSet f = continue_endpoints(e, cplx(-1.0, -9.0), 0.05, &worst);
    EXPECT_LE(worst, 10);
    EXPECT_LE(max_abs(residuals(f)), 1e-10);
    EXPECT_LE(set_distance(f.points(), solve_endpoints(cplx(-1.0, -9.0)).points()), 1e-8);
}
