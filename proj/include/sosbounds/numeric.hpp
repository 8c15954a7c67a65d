#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace sosbounds {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Variable-precision binary float. New values take the precision installed by
// the innermost PrecisionGuard on the calling thread.
using Real = boost::multiprecision::mpfr_float;

/// Mantissa bits of freshly constructed Real values.
unsigned current_mantissa_bits();

/// Installs a working precision of at least `mantissa_bits` for the lifetime
/// of the guard. The precision is process-global (Boost keeps one default), so
/// solves at different precisions must not overlap in time.
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned mantissa_bits);
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned previous_digits10_;
};

/// Copy of x rounded to the current working precision. Plain copies of Real
/// keep the source precision.
Real at_working_precision(const Real& x);

Real to_real(const Rational& q);
Real to_real(double x);
/// Exact conversion: every finite binary float is a dyadic rational.
Rational to_rational(const Real& x);
Rational to_rational(double x);
double to_double(const Rational& q);
double to_double(const Real& x);

/// Parses "12", "-3.25", "1e-3", "2.5E+4" or "7/3" exactly.
Rational parse_rational(std::string_view text);

/// "p" or "p/q" in lowest terms.
std::string to_string(const Rational& q);

/// Scientific decimal with `digits` significant digits; 0 means enough digits
/// to round-trip the value at its own precision.
std::string to_decimal(const Real& x, int digits = 0);

/// Exact terminating decimal when the denominator has only factors 2 and 5,
/// "p/q" otherwise. parse_rational reads either form back exactly.
std::string to_exact_decimal(const Rational& q);

/// Rounds x to `places` digits after the decimal point, exactly.
Rational round_to_decimal_places(const Rational& x, int places);

/// Smallest rational with denominator <= max_denominator within tol of x
/// (continued-fraction convergents); returns the best convergent otherwise.
Rational rationalize(double x, double tol, long max_denominator);

}  // namespace sosbounds
