#pragma once

#include "sosbounds/bounds/spec.hpp"
#include "sosbounds/certify/certificate.hpp"

#include <string>
#include <vector>

namespace sosbounds::oracles {

enum class AbsorbVerdict { CertifiedNoReentry, Inconclusive };

std::string to_string(AbsorbVerdict v);

struct AbsorbOptions {
    unsigned multiplier_degree = 2;
    bool newton_prune = true;
    /// 0 picks the solver default for the body degree.
    unsigned mantissa_bits = 0;
    /// Snapping of solver output to small rationals before the exact check.
    double snap_tol = 1e-6;
    long snap_denominator = 1000;
};

struct AbsorbResult {
    AbsorbVerdict verdict = AbsorbVerdict::Inconclusive;
    /// s, snapped when `exact`.
    poly::RationalPolynomial multiplier;
    /// f·∇g + s·g for the reported s.
    poly::RationalPolynomial body;
    /// Snapped multiplier and Gram matrices reproduce both constraints with
    /// zero residual and exactly PSD Gram matrices.
    bool exact = false;
    std::vector<certify::SosCertificate> certificates;
    std::string message;
};

/// Looks for s ∈ Σ with f·∇g + s·g ∈ Σ. Then f·∇g ≥ 0 wherever g ≤ 0, so g
/// cannot decrease inside {g ≤ 0} and trajectories starting in {g ≥ 0} never
/// enter {g < 0}. Failure is reported as inconclusive, never thrown.
AbsorbResult absorbing_domain_check(const bounds::ProblemSpec& spec, const AbsorbOptions& options = {});

}  // namespace sosbounds::oracles
