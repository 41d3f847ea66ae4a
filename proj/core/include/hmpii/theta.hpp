#pragma once

#include <vector>

#include "hmpii/genus1.hpp"

namespace hmpii {

struct PeriodData {
    cplx A_minus1, A_inf, B_period, K, U, F1, Q, Upsilon0_const, Upsilon_minus1;
    cplx a_period;    // a-cycle integral of dw/R, counterclockwise around Sigma1
    cplx norm;        // 2 pi i / a_period
    int b_sign = 1;   // orientation of the b-cycle relative to 2 int_{B->C}
    cplx kappa;       // a-period of w^2 dw/R over 2 pi i
    cplx inf_direction;  // direction of the ray from A used for the Abel map at infinity
};

struct ThetaParams {
    cplx B_period;
    int truncation = 40;
};

PeriodData compute_periods(const EndpointSet& e, const SpectralConstants& s);

cplx theta(cplx z, const ThetaParams& p);
cplx theta_prime(cplx z, const ThetaParams& p);
// Theta'/Theta after reducing z into the fundamental cell of the lattice 2 pi i Z + B Z.
cplx theta_log_derivative(cplx z, const ThetaParams& p);
// z - n B - 2 pi i m with (n, m) chosen to bring z near the origin.
cplx lattice_reduce(cplx z, cplx B, int* n = nullptr, int* m = nullptr);

// Integral of dw/R from A to z along a path avoiding both bands.
cplx abel_raw(cplx z, const EndpointSet& e);
cplx abel(cplx z, const EndpointSet& e, const PeriodData& p);

cplx gamma_fn(cplx z, const EndpointSet& e);
cplx f_D(cplx z, const EndpointSet& e);
cplx f_OD(cplx z, const EndpointSet& e);

struct Genus1State {
    EndpointSet e;
    SpectralConstants sc;
    PeriodData pd;
    cplx AQ;
};

Genus1State genus1_state(const EndpointSet& e, bool self_test = false);

// Leading-order genus-1 value from a prepared state; no pole-set check.
cplx genus1_formula(const Genus1State& s, double k);

// Residual of the pole condition for the two families (0: A_inf + A_Q, 1: A_inf - A_Q), shifted by kF1U.
cplx pole_condition(const Genus1State& s, double k, int family);

struct PoleSearch {
    double spacing = 0.1;
};

std::vector<cplx> predict_poles(const Window& w, double k, const PoleSearch& opt = {});

bool in_Sk(cplx x, double k, double delta, const std::vector<cplx>& poles);

// Full pipeline: endpoints, periods, local pole set, value.
cplx genus1_value(cplx x, double k, double delta = 0.5);

}  // namespace hmpii
