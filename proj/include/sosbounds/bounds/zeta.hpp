#pragma once

#include "sosbounds/bounds/spec.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbounds::bounds {

class ZetaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ZetaConstruction {
    poly::RationalPolynomial zeta;
    poly::RationalMatrix z;
    /// "eigenvectors" or "lyapunov".
    std::string method;
};

/// Quadratic ζ = xᵀZx with Z ≻ 0 and J₀ᵀZ + ZJ₀ ≻ 0 for a repelling origin.
/// Tries ζ = |U⁻¹x|² from the eigenvectors U of J₀ first, then the solution
/// of J₀ᵀZ + ZJ₀ = I. Z is scaled so that max |entry| = 1.
ZetaConstruction construct_zeta(std::span<const poly::RationalPolynomial> f);

enum class Admissibility { Positive, Negative, Indefinite };

/// Definiteness of J₀ᵀZ + ZJ₀; Positive admits α > 0, Negative admits α < 0.
Admissibility zeta_admissibility(const poly::RationalMatrix& j0, const poly::RationalMatrix& z);

std::string to_string(Admissibility a);

struct ZetaCandidate {
    std::string id;
    poly::RationalPolynomial zeta;
};

/// The three van der Pol choices of ζ, which depend on whether μ ≤ 2.
std::vector<ZetaCandidate> table1_zetas(const Rational& mu);

}  // namespace sosbounds::bounds
