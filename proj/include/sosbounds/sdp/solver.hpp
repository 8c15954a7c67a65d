#pragma once

#include "sosbounds/sdp/problem.hpp"

#include <stdexcept>

namespace sosbounds::sdp {

/// Equalities that are inconsistent on their own (no PSD entries involved).
class StructuralInfeasibility : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Infeasible-start primal-dual path following with Nesterov–Todd scaling and
/// Mehrotra predictor-corrector steps, in `settings.mantissa_bits` precision.
SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings);

/// Re-solves at the (higher) precision in `settings`, starting near `warm`;
/// falls back to a cold start when the warm start stalls. Sets `drift` to the
/// absolute change in objective.
SdpSolution refine(const SdpProblem& problem, const SdpSolution& warm, const SolverSettings& settings);

}  // namespace sosbounds::sdp
