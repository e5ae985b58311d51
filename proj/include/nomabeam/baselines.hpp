#pragma once

#include <utility>
#include <vector>

#include "nomabeam/conic_solver.hpp"
#include "nomabeam/system_model.hpp"

namespace nomabeam {

struct BaselineConfig {
    int max_sca_iters = 60;
    double sca_rel_tol = 1e-6;     // relative change of the SCA objective
    int envelope_pieces = 64;
    int init_retries = 3;          // random restarts after the deterministic starts
    SolverSettings solver;
};

/// Minimum transmit power meeting every rate threshold and the SIC ordering,
/// via SCA over the linearized ordering chain. The result upper-bounds the
/// true optimum. Throws InfeasibleError when no start leads to a feasible
/// subproblem.
std::pair<double, BeamformerSolution> solve_power_min(
    const ChannelSet& cs, const SystemParams& params,
    const BaselineConfig& cfg = {});

struct FeasibilityResult {
    bool feasible = false;
    double p_star = 0.0;  // +inf when the rate targets are unreachable at any power
    BeamformerSolution solution;
};

/// OP is solvable iff the power-min optimum fits the budget.
FeasibilityResult feasibility_check(const ChannelSet& cs, const SystemParams& params,
                                    const BaselineConfig& cfg = {});

/// Sum-rate maximization under the power budget and SIC ordering; the
/// min-rate variant adds the per-user rate thresholds.
BeamformerSolution solve_se_max(const ChannelSet& cs, const SystemParams& params,
                                bool with_min_rate, const BaselineConfig& cfg = {});

/// GEE maximization: Dinkelbach outer loop on the ratio parameter, the same
/// SCA machinery inside. Requires a feasible instance.
BeamformerSolution solve_gee_max(const ChannelSet& cs, const SystemParams& params,
                                 const BaselineConfig& cfg = {});

struct GreenPowerResult {
    double power = 0.0;   // smallest grid budget where GEE-Max stops using it all
    bool saturated = false;
};

/// Scans an ascending budget grid for the point where the GEE-Max transmit
/// power detaches from the budget (relative slack > 1%).
GreenPowerResult find_green_power(const ChannelSet& cs, const SystemParams& params,
                                  const std::vector<double>& p_grid,
                                  const BaselineConfig& cfg = {});

}  // namespace nomabeam
