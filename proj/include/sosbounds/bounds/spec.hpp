#pragma once

#include "sosbounds/poly/calculus.hpp"
#include "sosbounds/poly/polynomial.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbounds::bounds {

/// Validation failure; `field()` names the offending part of the spec.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// ẋ = f(x) + √(2ε)σξ with observable φ, optional absorbing domain {g ≥ 0}
/// and optional quadratic form ζ.
struct ProblemSpec {
    std::vector<std::string> vars;
    std::map<std::string, Rational, std::less<>> params;
    std::vector<poly::RationalPolynomial> f;
    poly::RationalPolynomial phi;
    std::optional<poly::RationalMatrix> sigma;
    std::optional<Rational> epsilon;
    std::optional<poly::RationalPolynomial> g;
    std::optional<poly::RationalPolynomial> zeta;

    std::size_t dimension() const { return vars.size(); }
    bool has_noise() const { return sigma.has_value(); }
    /// D = σσᵀ; throws SpecError when σ is absent.
    poly::DiffusionMatrix diffusion() const;
    /// Dimensions, ζ homogeneous quadratic with Z ≻ 0, ε ≥ 0.
    void validate() const;
};

/// ẋ = y, ẏ = μ(1−x²)y − x with φ = x² + y² and σ = (0, 1)ᵀ.
ProblemSpec van_der_pol(const Rational& mu);

/// Exact positive-definiteness test (all leading pivots positive).
bool is_positive_definite(const poly::RationalMatrix& m);

}  // namespace sosbounds::bounds
