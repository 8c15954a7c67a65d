#pragma once

#include "sosbounds/bounds/bounds.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sosbounds::certify {

struct CertifyOptions {
    /// Starting bound; defaults to the optimum moved 10% outward.
    std::optional<Rational> start;
    /// Decimal places kept when rounding V and Q.
    int digits = 12;
    int max_steps = 40;
    /// Stop once the certified and failed bounds are this close (relative).
    double rel_tol = 1e-3;
};

struct CertifyStep {
    Rational bound;
    bool feasible = false;
    bool certified = false;
    /// min over certificates of λ₀ − dim·r.
    double margin = 0;
};

struct CertifyOutcome {
    bool certified = false;
    /// Best certified result (valid when certified).
    bounds::BoundResult result;
    /// Uncertified optimum the search started from, when it was computed.
    std::optional<Rational> optimum;
    std::vector<CertifyStep> steps;
    std::string message;
};

/// Sequence of feasibility solves at fixed bound values. Each solution is
/// rounded to `digits` places, its residual recomputed exactly and checked.
/// The bound moves outward by factors of 1.05 until a point certifies, then
/// golden-section steps pull it back toward the last failure.
CertifyOutcome certify_bound(const bounds::ProblemSpec& spec, bounds::Program program, bounds::Direction direction,
                             const bounds::BoundOptions& options, const CertifyOptions& copts = {});

/// max |V̇ − (φ̄ − φ)| over the states, with V̇ = f·∇V. For the logarithmic
/// programs V = α log(ε + ζ) + P (ε = 0 for the vanishing-noise limit).
/// φ̄ defaults to the mean of φ over the states.
double storage_diagnostic(const bounds::ProblemSpec& spec, const bounds::BoundResult& result,
                          std::span<const std::vector<double>> states, std::optional<double> phibar = std::nullopt);

}  // namespace sosbounds::certify
