#pragma once

#include <stdexcept>
#include <string>

namespace nomabeam {

/// Instance cannot meet its minimum-rate targets (either the required power
/// exceeds the budget or no power level satisfies them). Callers are expected
/// to fall back to the SE-Max design.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double p_star)
        : std::runtime_error(what), p_star_(p_star) {}
    double p_star() const { return p_star_; }

private:
    double p_star_;
};

/// A Taylor expansion base point hit its singularity guard (z or r too close
/// to 1). The caller clamps the iterate and rebuilds.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nomabeam
