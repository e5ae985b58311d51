#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nomabeam/conic_solver.hpp"

namespace nomabeam::sdp {

/// Standard-form conic program over PSD blocks and a nonnegative tail:
///   minimize c'x  s.t.  A x = b,  x in PSD(p_1) x ... x PSD(p_k) x R+^l,
/// with every PSD block stored in scaled-vectorization (svec) coordinates.
struct StandardForm {
    std::vector<int> psd_dims;  // matrix orders p_i
    int nonneg_dim = 0;
    Eigen::MatrixXd A;          // m x total_dim
    Eigen::VectorXd b;          // m
    Eigen::VectorXd c;          // total_dim
};

struct SolveInfo {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x;          // primal blocks (svec + nonneg tail)
    Eigen::VectorXd y;          // equality multipliers
    double objective = 0.0;     // c'x (minimize convention)
    double dual_objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double rel_gap = 0.0;
};

int svec_dim(int order);
Eigen::VectorXd svec(const Eigen::MatrixXd& S);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int order);

/// Dense primal-dual path-following with Nesterov-Todd scalings and a
/// Mehrotra predictor-corrector, sized for small blocks.
SolveInfo solve(const StandardForm& p, double tol = 1e-8, int max_iter = 100);

}  // namespace nomabeam::sdp
