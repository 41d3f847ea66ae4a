#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hmpii/collocation.hpp"
#include "hmpii/pade_vault.hpp"
#include "hmpii/theta.hpp"

namespace hmpii {

// y = -(k^{2/3} / 2^{1/3}) x, alpha = k + 1/2.
double y_scale(double k);
cplx x_to_y(cplx x, double k);
cplx y_to_x(cplx y, double k);
// Scaled value p = -(2k)^{-1/3} u.
cplx scaled_value(cplx u, double k);

struct NumericOptions {
    int n_cheb = 200;
    int taylor_order = 24;
    double step = 0.5;
    unsigned long long seed = 1;
    double delta = 0.5;
};

// Asymptotic value at x: genus 0 off the pole region, genus 1 (with the
// given pole list) inside it. Throws NearPole outside S_k.
cplx asymptotic_value(cplx x, double k, double delta, const std::vector<cplx>& poles);

// Collocation on the real y segment covering [y_min, y_max] (at least [-12, 12]).
BvpSolution real_axis_solution(double k, double y_min, double y_max, const NumericOptions& opt);

// Atlas anchored at y = 0 covering the given y points. Nodes are restricted to the
// pole region, a disc around the anchor and neighbourhoods of the points.
VaultAtlas slice_atlas(double k, const std::vector<cplx>& ys, const NumericOptions& opt);

struct SampleRow {
    cplx x;
    double k = 1.0;
    cplx asym, num;
    double abs_err = 0.0;
    std::string flag;  // "ok" or the failure kind
};

struct SliceJob {
    enum class Mode { RealAxis, Horizontal } mode = Mode::RealAxis;
    double im_offset = 0.0;
    double x_min = -3.0, x_max = 3.0;
    int samples = 61;
    std::vector<double> k_list{1.0, 2.0, 3.0};
};

struct GridJob {
    Window window{-2.0, 2.0, -2.0, 2.0};
    int res_re = 8, res_im = 8;
    double k = 1.0;
};

// Rows ordered by k, then sample. Per-point failures give NaN values and a flag.
std::vector<SampleRow> run_slice(const SliceJob& job, const NumericOptions& opt);
std::vector<SampleRow> run_grid(const GridJob& job, const NumericOptions& opt);

// Pole list for the part of the window inside the pole region (slightly enlarged
// so discs reaching into the window are seen). Empty if the window misses it.
std::vector<cplx> poles_near(const Window& w, double k, double delta);

void write_rows_csv(std::ostream& os, const std::vector<SampleRow>& rows);

}  // namespace hmpii
