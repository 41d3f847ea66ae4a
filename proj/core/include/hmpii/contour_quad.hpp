#pragma once

#include <functional>
#include <vector>

#include "hmpii/errors.hpp"

namespace hmpii {

using CFun = std::function<cplx(cplx)>;

// Oriented polyline. A closed path repeats its first vertex at the end.
struct Path {
    std::vector<cplx> vertices;
    bool closed = false;

    static Path segment(cplx a, cplx b);
    static Path polyline(std::vector<cplx> pts, bool closed = false);
    Path reversed() const;
    double length() const;
};

struct QuadratureRule {
    int nodes_per_segment = 32;
    int max_depth = 12;
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
};

// Square-root behaviour at segment ends, removed by substitution.
enum class EndSing { None, Start, End, Both };

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Adaptive integral of g over the real interval [t0, t1].
cplx integrate_real(const std::function<cplx(double)>& g, double t0, double t1,
                    const QuadratureRule& rule = {});

cplx integrate_segment(const CFun& f, cplx p, cplx q, const QuadratureRule& rule = {},
                       EndSing sing = EndSing::None);

cplx integrate_path(const CFun& f, const Path& p, const QuadratureRule& rule = {});

// Integral from infinity along the ray ray_start + direction*t back to ray_start.
cplx integrate_tail(const CFun& f, cplx ray_start, cplx direction, const QuadratureRule& rule = {});

// Counterclockwise integral over a stadium around the segment [a, b].
// The clearance is a fraction of the segment length.
cplx loop_around_segment(const CFun& f, cplx a, cplx b, double clearance = 0.1,
                         const QuadratureRule& rule = {});

// Axis-aligned rectangle in the complex plane.
struct Window {
    double re_min, re_max, im_min, im_max;
};

// Proper crossing test for the open segments p1p2 and q1q2.
bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2);

// Distance from z to the segment [a, b].
double dist_to_segment(cplx z, cplx a, cplx b);

}  // namespace hmpii
