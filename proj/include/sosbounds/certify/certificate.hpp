#pragma once

#include "sosbounds/numeric.hpp"
#include "sosbounds/poly/calculus.hpp"
#include "sosbounds/poly/polynomial.hpp"
#include "sosbounds/sdp/matrix.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sosbounds::certify {

using poly::Monomial;
using poly::RationalMatrix;
using poly::RationalPolynomial;

/// Gram decomposition backing one SoS constraint. Q and the body are held as
/// exact rationals (solver output is dyadic, so nothing is lost), which makes
/// the residual exact.
struct SosCertificate {
    std::string label;
    std::vector<Monomial> basis;
    RationalMatrix gram;
    RationalPolynomial body;
    /// e = zᵀQz − body.
    RationalPolynomial residual;
    /// Largest |coefficient| of e.
    Rational r;
    Real lambda0;
    /// Off-diagonal Frobenius norm left by the final Jacobi sweep.
    double off_norm = 0;
    /// Precision at which λ₀ settled.
    unsigned mantissa_bits = 0;
    bool certified = false;

    std::size_t dim() const { return basis.size(); }
};

struct Residual {
    RationalPolynomial e;
    Rational r;
};

/// Exact expansion of zᵀQz − body.
Residual residual(const RationalPolynomial& body, const RationalMatrix& q, const std::vector<Monomial>& z);

struct EigenEstimate {
    Real lambda0;
    double off_norm = 0;
    unsigned mantissa_bits = 0;
};

/// Smallest eigenvalue by cyclic Jacobi at the current precision.
EigenEstimate min_eigenvalue(const RealMatrix& q);

/// Jacobi at start_bits, doubling the precision until λ₀ moves by less than 1%
/// (or both estimates are at the rounding floor), up to max_bits.
EigenEstimate min_eigenvalue(const RationalMatrix& q, unsigned start_bits = 128, unsigned max_bits = 2048);

/// Sets and returns the flag λ₀ − dim·r ≥ 0. With r = 0 and Q present the
/// test is whether Q is PSD, decided exactly.
bool check(SosCertificate& cert);

/// Exact PSD test by symmetric elimination over the rationals.
bool is_psd_exact(const RationalMatrix& q);

/// Fills residual, r, λ₀ and the flag.
SosCertificate make_certificate(std::string label, RationalPolynomial body, RationalMatrix gram,
                                std::vector<Monomial> basis, unsigned start_bits = 128);

/// Text format: label, basis exponents, lower-triangular Q and body and
/// residual coefficients as exact decimals.
void write_certificate(std::ostream& os, const SosCertificate& cert);
/// Reads a certificate and recomputes the residual, λ₀ and the flag; throws if
/// the stored residual disagrees with zᵀQz − body.
SosCertificate read_certificate(std::istream& is);

/// λ₀, r, dim Q, verdict and precision, one per line.
std::string report(const SosCertificate& cert);

}  // namespace sosbounds::certify
