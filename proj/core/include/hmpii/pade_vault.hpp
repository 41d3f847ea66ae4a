#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hmpii/contour_quad.hpp"

namespace hmpii {

struct TaylorJet {
    cplx y0;
    std::vector<cplx> c;  // c_0..c_n
    double alpha = 0.0;
    int order() const { return static_cast<int>(c.size()) - 1; }
};

// Coefficients of u(y0 + h) for u'' = 2u^3 + yu - alpha.
TaylorJet taylor_from_ivp(cplx y0, cplx u0, cplx u0prime, double alpha, int n = 24);

// Largest relative defect of the coefficient recursion.
double jet_residual(const TaylorJet& j);

struct PadeApprox {
    cplx center;
    std::vector<cplx> a;  // a_0..a_nu
    std::vector<cplx> b;  // b_0 = 1, b_1..b_nu

    int nu() const { return static_cast<int>(b.size()) - 1; }
    cplx numer(cplx h) const;
    cplx denom(cplx h) const;
    cplx eval(cplx h) const;
    cplx deriv(cplx h) const;
    // Roots of the denominator, as offsets from the center.
    std::vector<cplx> denominator_roots() const;
};

// Type (nu, nu) approximant matching the jet; nu defaults to n/2.
PadeApprox pade_from_taylor(const TaylorJet& j, int nu = -1);

struct VaultConfig {
    int n = 24;
    double h = 0.5;
    double grid_spacing = 0.5;
    unsigned long long seed = 1;
    int max_stall = 1000;
};

struct AtlasCenter {
    PadeApprox pade;
    cplx u, up;
    int parent = -1;
};

struct VaultAtlas {
    double alpha = 0.0;
    VaultConfig config;
    Window window{};
    std::vector<AtlasCenter> centers;
    std::vector<cplx> nodes;
    int paths = 0;
};

// Node predicate; grid nodes failing it are never targeted. Empty means the whole window.
using NodeMask = std::function<bool(cplx)>;

VaultAtlas run_vault(const Window& window, cplx y0, cplx u0, cplx u0prime, double alpha,
                     const VaultConfig& config = {}, const NodeMask& mask = {});

// Value of u at y from the nearest center.
cplx evaluate(const VaultAtlas& atlas, cplx y);

// Index of the nearest center, or -1 for an empty atlas.
int nearest_center(const VaultAtlas& atlas, cplx y);

std::string atlas_to_json(const VaultAtlas& atlas);
VaultAtlas atlas_from_json(const std::string& text);

}  // namespace hmpii
