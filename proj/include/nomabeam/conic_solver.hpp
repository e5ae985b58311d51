#pragma once

#include <Eigen/Dense>

#include "nomabeam/cone_program.hpp"

namespace nomabeam {

enum class SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterLimit,
    NumericalFailure,
};

const char* to_string(SolveStatus status);

struct SolveReport {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x;        // primal point (best iterate on non-optimal exits)
    double objective = 0.0;   // c'x in the maximize convention
    double dual_objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;  // relative
    double dual_residual = 0.0;    // relative
    double rel_gap = 0.0;

    bool usable() const { return status == SolveStatus::Optimal; }
};

struct SolverSettings {
    double tol = 1e-7;
    int max_iter = 100;
    double static_reg = 1e-9;   // regularization of the reduced KKT system
    int refine_steps = 1;       // iterative refinement rounds per Newton solve
    int equil_iters = 3;
};

/// Primal-dual path-following (Mehrotra predictor-corrector, Nesterov-Todd
/// scalings, homogeneous embedding) over nonnegative and second-order cones.
/// Dense factorizations; reentrant and stateless between calls.
SolveReport solve(const ConeProgram& p, double tol = 1e-7, int max_iter = 100);
SolveReport solve(const ConeProgram& p, const SolverSettings& settings);

}  // namespace nomabeam
