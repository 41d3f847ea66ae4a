#pragma once

#include <vector>

#include "hmpii/contour_quad.hpp"

namespace hmpii {

struct Genus0Data {
    cplx x, S, Delta, a, b, c, lambda;
};

enum class Region { PoleFreeLeft, PoleFreeRight, PoleRegionUp, PoleRegionDown, BoundaryPoint, ApexPoint };

const char* to_string(Region r);
bool is_pole_region(Region r);

// Phase theta(z) = 4z^3/3 + xz and its derivative.
struct PhaseParams {
    cplx x;
    cplx theta(cplx z) const { return 4.0 / 3.0 * z * z * z + x * z; }
    cplx theta_prime(cplx z) const { return 4.0 * z * z + x; }
};

// Apex of the pole region, 3 e^{-2 pi i/3} (lower) or its conjugate.
cplx apex_point(bool upper);

// Distance from x to the two rays of Sigma_S.
double sigma_S_distance(cplx x);

// Root of S^3 + xS - 2i = 0 on the branch S ~ -i sqrt(x) at +inf, 2i/x at -inf.
// On the rays the left-of-orientation boundary value is returned and *on_cut is set.
cplx solve_S(cplx x, bool* on_cut = nullptr);

// Continue a root S0 of the cubic at x0 along the straight segment to x1.
cplx continue_S(cplx S0, cplx x0, cplx x1);

Genus0Data genus0_data(cplx x);
Genus0Data genus0_data_from_S(cplx x, cplx S);

cplx r_eval(cplx z, const Genus0Data& d);
cplx h_eval(cplx z, const Genus0Data& d);
cplx h_prime(cplx z, const Genus0Data& d);

double frak_c(cplx x);
double frak_c(const Genus0Data& d);
// Closed-form check value Re(2h(c) + lambda).
double frak_c_closed(const Genus0Data& d);

// Real root of frak_c (the crossing of the Omega_left / Omega_right boundary).
double x0_root();

struct BoundaryTrace {
    // Right boundary of the lower pole region, from the apex downwards to |x| = 30.
    std::vector<cplx> right_lower;
    // Shared Omega_left / Omega_right boundary from x0 down to the lower apex.
    std::vector<cplx> shared_lower;
    double x0 = 0.0;
};

// Traced once per process; throws TraceFailure if the trace did not converge.
const BoundaryTrace& boundary_trace();

// Re x of the lower right boundary at the given Im x (below the apex).
double right_boundary_re(double im);

Region classify_region(cplx x);

cplx genus0_value(cplx x);

}  // namespace hmpii
