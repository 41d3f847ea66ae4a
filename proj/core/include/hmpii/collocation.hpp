#pragma once

#include <Eigen/Dense>
#include <utility>

#include "hmpii/errors.hpp"

namespace hmpii {

struct ChebGrid {
    int N = 0;
    Eigen::VectorXd t;  // t_k = cos((k-1) pi / (N-1)), k = 1..N
    Eigen::MatrixXd D;
};

ChebGrid build_grid(int N);

struct BvpProblem {
    double alpha = 1.5;
    cplx y1 = -12.0, y2 = 12.0;
    int N = 200;
    // Check that the scaled preimage of [y1, y2] avoids the pole region.
    bool check_region = true;
};

struct BvpSolution {
    BvpProblem problem;
    ChebGrid grid;
    Eigen::VectorXcd v;   // values at the nodes
    Eigen::VectorXcd dv;  // dv/dt at the nodes
    int iterations = 0;
    double residual = 0.0;

    cplx y_at(double t) const;
};

BvpSolution solve_bvp(const BvpProblem& p);

// u and du/dy at a point of the segment.
std::pair<cplx, cplx> eval_solution(const BvpSolution& s, cplx y);

// Second derivative by differentiating the interpolant twice.
cplx eval_second(const BvpSolution& s, cplx y);

}  // namespace hmpii
