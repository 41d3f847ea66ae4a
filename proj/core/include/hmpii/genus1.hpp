#pragma once

#include <array>

#include "hmpii/genus0.hpp"

namespace hmpii {

struct EndpointSet {
    cplx A, B, C, D;
    cplx x;

    std::array<cplx, 4> points() const { return {A, B, C, D}; }
    double min_separation() const;
};

// Straight bands Sigma1 = A->B, Sigma2 = C->D, gap Gamma = B->C, and L from A to the left.
struct SurfaceContours {
    Path sigma1, gamma, sigma2, L;
};

SurfaceContours make_contours(const EndpointSet& e);

struct SpectralConstants {
    cplx Lambda;
    double omega = 0.0, Omega = 0.0;
    // values before coercion to real
    cplx omega_raw, Omega_raw;
    // |closed form - two-sided H difference|, negative when not evaluated
    double self_test = -1.0;
};

// Elementary symmetric functions e1..e4.
std::array<cplx, 4> symmetric_functions(const EndpointSet& e);

// R(z) with R ~ z^2 at infinity on sheet +1; sheet -1 negates.
cplx R_eval(cplx z, const EndpointSet& e, int sheet = 1);

// Boundary value of R from the left of the band, at parameter s in (0,1).
// band 1 is A->B, band 2 is C->D.  Returns the point through *w.
// s1 = 1 - s may be passed when it is known more accurately than the difference.
cplx R_plus_band(const EndpointSet& e, int band, double s, cplx* w, double s1 = -1.0);

// Integral of g(w) R_+(w)^power over a band, and of g(w) R(w)^power over the gap B->C.
cplx band_integral(const EndpointSet& e, int band, const CFun& g, int power);
cplx gap_integral(const EndpointSet& e, const CFun& g, int power);

std::array<double, 8> residuals(const EndpointSet& e);

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
};

// Damped Newton from the given seed.  Labels are those carried by the seed.
EndpointSet newton_endpoints(cplx x, const EndpointSet& seed, SolveInfo* info = nullptr);

// Order the endpoints along the critical graph of Im int R dz so that Sigma1, Gamma, Sigma2 are
// consecutive trajectories; A is the chain end whose unbounded trajectory points closest to -infinity.
EndpointSet label_endpoints(const EndpointSet& e);

// Solve with an explicit seed (then relabel), or from genus-0 data at the right boundary.
EndpointSet solve_endpoints(cplx x, const EndpointSet& seed, SolveInfo* info = nullptr);
EndpointSet solve_endpoints(cplx x, SolveInfo* info = nullptr);

// Continue a labelled solution along a straight path in steps of at most `step`.
EndpointSet continue_endpoints(const EndpointSet& from, cplx x, double step = 0.05, int* max_iters = nullptr);

cplx H_prime(cplx z, const EndpointSet& e);
// i theta'/2 - G' with G' from the Cauchy integral over both bands.
cplx H_prime_oracle(cplx z, const EndpointSet& e);
cplx H_eval(cplx z, const EndpointSet& e);

SpectralConstants spectral_constants(const EndpointSet& e, bool self_test = true);

}  // namespace hmpii
