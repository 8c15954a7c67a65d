#pragma once

#include "sosbounds/bounds/spec.hpp"
#include "sosbounds/bounds/zeta.hpp"
#include "sosbounds/certify/certificate.hpp"
#include "sosbounds/sdp/problem.hpp"
#include "sosbounds/sosc/compiler.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sosbounds::bounds {

enum class Direction { Upper, Lower };
enum class Program { DetGlobal, DetLocal, Stoch, WeakNoise, VanishingNoise };

std::string to_string(Direction d);
std::string to_string(Program p);

struct BoundOptions {
    /// Degree of the storage function (V, or P in the logarithmic ansatz).
    unsigned degree = 6;
    /// S-procedure multiplier degree; defaults to the strict rule, which
    /// keeps s·g below the leading degree of the body.
    std::optional<unsigned> multiplier_degree;
    bool newton_prune = true;
    /// 0 picks 256 bits for degree ≥ 10 and 128 otherwise.
    unsigned mantissa_bits = 0;
    int max_iterations = 200;
    /// Solve with the bound held at this value (a feasibility problem).
    std::optional<Rational> fixed_bound;
    /// Drops α from the logarithmic and vanishing-noise programs.
    bool fix_alpha_zero = false;
    bool certificates = true;
    /// Rounds decision values and Gram entries to this many decimal places
    /// before the certificates are built.
    std::optional<int> round_digits;
    /// Re-solves at twice the precision and records the objective drift.
    bool check_drift = false;
    bool verbose = false;

    unsigned effective_mantissa_bits() const;
};

/// A bounding program before compilation.
struct AssembledProgram {
    Program program = Program::DetGlobal;
    Direction direction = Direction::Upper;
    unsigned degree = 0;
    sosc::VarRegistry vars;
    std::vector<sosc::SosConstraint> constraints;
    std::optional<std::size_t> bound_var;
    std::optional<std::size_t> alpha_var;
    sosc::AffinePolynomial storage;
    std::vector<sosc::AffinePolynomial> multipliers;
    /// The polynomial whose sign proves the bound (≥ 0 on the domain).
    sosc::AffinePolynomial inequality;
    std::optional<poly::RationalPolynomial> domain;
    std::vector<std::string> caveats;
    std::vector<std::string> warnings;
};

struct BoundResult {
    Program program = Program::DetGlobal;
    Direction direction = Direction::Upper;
    unsigned degree = 0;
    sdp::Status status = sdp::Status::Stalled;
    std::string message;
    /// U or L.
    Rational value;
    poly::RationalPolynomial storage;
    std::vector<poly::RationalPolynomial> multipliers;
    std::optional<Rational> alpha;
    std::vector<certify::SosCertificate> certificates;
    poly::RationalPolynomial inequality;
    std::optional<poly::RationalPolynomial> domain;
    std::vector<std::string> caveats;
    std::vector<std::string> warnings;
    double primal_residual = 0;
    double dual_residual = 0;
    double gap = 0;
    int iterations = 0;
    unsigned mantissa_bits = 0;
    double drift = 0;
    double seconds = 0;

    bool feasible() const { return status == sdp::Status::Optimal; }
    double bound() const { return to_double(value); }
    /// Largest certificate residual r.
    Rational max_residual() const;
    /// Smallest λ₀ over certificates.
    Real min_lambda0() const;
    bool certified() const;
};

/// Builds the program; throws SpecError for missing or degenerate inputs.
AssembledProgram assemble(const ProblemSpec& spec, Program program, Direction direction, const BoundOptions& options);

/// Compiles, solves and extracts values and certificates.
BoundResult solve(AssembledProgram& program, const BoundOptions& options);

/// min U s.t. −(f·∇V + φ − U) ∈ Σ, or max L s.t. f·∇V + φ − L ∈ Σ.
BoundResult det_global_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options);

/// Same on {g ≥ 0} via the S-procedure.
BoundResult det_local_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options);

/// With the diffusion term ε∇·(D∇V).
BoundResult stoch_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options);

/// Logarithmic ansatz V = α log(ε + ζ) + P, max L s.t. 𝓛₀ + ε𝓛₁ + ε²𝓛₂ + ε³𝓛₃ ∈ Σ.
BoundResult weak_noise_lower_bound(const ProblemSpec& spec, const BoundOptions& options);

/// max L s.t. α f·∇ζ + ζ(f·∇P + φ − L) ∈ Σ.
BoundResult vanishing_noise_lower_bound(const ProblemSpec& spec, const BoundOptions& options);

/// 𝓛₀…𝓛₃ for given α, P and L.
struct LogAnsatzTerms {
    sosc::AffinePolynomial l0, l1, l2, l3;
};
LogAnsatzTerms log_ansatz_terms(const ProblemSpec& spec, const poly::RationalPolynomial& zeta,
                                const sosc::AffinePolynomial& alpha, const sosc::AffinePolynomial& p,
                                const sosc::AffinePolynomial& bound);

struct ZetaSweepEntry {
    ZetaCandidate candidate;
    BoundResult result;
};

/// Runs the vanishing-noise program for each candidate; the best feasible
/// entry comes first.
std::vector<ZetaSweepEntry> zeta_sweep(const ProblemSpec& spec, const std::vector<ZetaCandidate>& candidates,
                                       const BoundOptions& options);

struct SoundnessReport {
    std::size_t points = 0;
    /// Smallest value of inequality/(tolerance scale) seen.
    double worst_margin = 0;
    bool passed = true;
};

/// Evaluates the bound inequality at quasi-random points of the box
/// [−half_width, half_width]ⁿ (inside {g ≥ 0} for local bounds) and the
/// certificate bodies everywhere; each must be ≥ −10·r·max(1, Σ|x^μ|).
SoundnessReport soundness_check(const BoundResult& result, std::size_t points = 10000, double half_width = 10.0);

}  // namespace sosbounds::bounds
