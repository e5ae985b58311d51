#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nomabeam/cone_program.hpp"
#include "nomabeam/conic_solver.hpp"
#include "nomabeam/system_model.hpp"

namespace nomabeam {

/// All iterates of the convex-approximation loop: beamformers plus the slack
/// variables of the reformulated problem. Entries (i, k) of `a` and `xi` are
/// meaningful for k <= i only.
struct SlackState {
    Eigen::MatrixXcd w;     // N x K
    Eigen::VectorXd rho;    // rate slacks, K
    Eigen::VectorXd z;      // 1 + SINR slacks feeding the SE chain, K
    Eigen::VectorXd r;      // 1 + SINR slacks feeding the GEE chain, K
    Eigen::MatrixXd a;      // interference amplitude slacks, K x K lower part
    Eigen::MatrixXd xi;     // same for the GEE chain
    double b = 0.0;         // consumed-power amplitude slack
    double gamma1 = 0.0;    // weighted normalized SE slack
    double gamma2 = 0.0;    // weighted normalized GEE slack
};

struct TradeoffConfig {
    double alpha = 0.5;         // weight of the GEE objective, in [0, 1]
    double f1_star = 0.0;       // max SE (from the SE-Max baseline)
    double f2_star = 0.0;       // max GEE (from the GEE-Max baseline)
    double epsilon = 1e-3;      // termination threshold on the objective change
    int max_outer_iters = 100;
    double taylor_guard = 1e-6; // minimum allowed z - 1 and r - 1
    int envelope_pieces = 64;
    SolverSettings solver;
};

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;  // gamma1 + gamma2
    double se = 0.0;
    double gee = 0.0;
    double tx_power = 0.0;
    SolveStatus solver_status = SolveStatus::Optimal;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    int guard_clamps = 0;
    bool converged = false;

    /// columns: iter,objective,se,gee,tx_power,solver_status
    void to_csv(std::ostream& os) const;
};

struct ParetoPoint {
    double alpha = 0.0;
    double se = 0.0;
    double gee = 0.0;
    double tx_power = 0.0;
    bool solved = false;
    bool dominated = false;
    std::string error;
};

/// Normalization constants (f1*, f2*) by solving the SE-Max and GEE-Max
/// baselines on the instance. Both are strictly positive on feasible input.
std::pair<double, double> normalize(const ChannelSet& cs, const SystemParams& params);

/// Feasible starting point: power-minimizing beamformers scaled toward the
/// budget, slacks chosen with strict margin so the first subproblem is
/// feasible by construction. Throws InfeasibleError on infeasible instances.
SlackState initialize(const ChannelSet& cs, const SystemParams& params,
                      const TradeoffConfig& cfg);

/// Assembles the convex subproblem around the current iterate. Throws
/// GuardError when the iterate violates the Taylor guard.
ConeProgram build_subproblem(const SlackState& state, const TradeoffConfig& cfg,
                             const ChannelSet& cs, const SystemParams& params);

/// Closed-form variable/constraint counts for the assembled subproblem with
/// alpha in (0,1) and all SINR thresholds positive:
///   variables         2NK + 2K^2 + 3K + 3
///   nonneg rows       2K(pieces+2) + K(K+1) + K(K-1) + 2
///   SOC blocks        2 + 3K(K+1)/2 + K(K-1)
///   SOC rows          (2NK+1) + (2NK+2) + K(K+1)(2K+1) + 4K(K-1)
struct SubproblemDims {
    int variables = 0;
    int nonneg_rows = 0;
    int soc_blocks = 0;
    int soc_rows = 0;
};
SubproblemDims subproblem_dims(int num_antennas, int num_users, int pieces,
                               double alpha);

/// Algorithm: initialize, then iterate build/solve/update until the objective
/// change drops below epsilon. The returned solution satisfies the original
/// constraints (rates, SIC ordering, power budget).
std::pair<BeamformerSolution, IterationTrace> solve_tradeoff(
    const ChannelSet& cs, const SystemParams& params, double alpha,
    TradeoffConfig cfg);

/// One solve_tradeoff per grid point, annotated with pairwise non-domination
/// flags. Per-point failures are recorded and the sweep continues.
std::vector<ParetoPoint> pareto_sweep(const ChannelSet& cs,
                                      const SystemParams& params,
                                      const std::vector<double>& alpha_grid,
                                      const TradeoffConfig& base_cfg,
                                      double domination_tol = 0.005);

}  // namespace nomabeam
