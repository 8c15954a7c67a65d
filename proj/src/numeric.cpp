#include "sosbounds/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace sosbounds {

namespace {

unsigned digits10_for_bits(unsigned bits) {
    unsigned d10 = 1;
    while (boost::multiprecision::detail::digits10_2_2(d10) < bits) ++d10;
    return d10;
}

}  // namespace

unsigned current_mantissa_bits() {
    return boost::multiprecision::detail::digits10_2_2(Real::default_precision());
}

PrecisionGuard::PrecisionGuard(unsigned mantissa_bits)
    : previous_digits10_(Real::default_precision()) {
    if (mantissa_bits < 53) mantissa_bits = 53;
    Real::default_precision(digits10_for_bits(mantissa_bits));
}

PrecisionGuard::~PrecisionGuard() { Real::default_precision(previous_digits10_); }

Real at_working_precision(const Real& x) {
    Real r;
    mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

Real to_real(const Rational& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
    return r;
}

Real to_real(double x) { return Real(x); }

Rational to_rational(const Real& x) {
    mpfr_srcptr src = x.backend().data();
    if (!mpfr_number_p(src)) throw std::domain_error("to_rational: non-finite value");
    if (mpfr_zero_p(src)) return Rational(0);
    Integer mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.backend().data(), src);
    Rational q(mant);
    if (e > 0) {
        mpq_mul_2exp(q.backend().data(), q.backend().data(), static_cast<mp_bitcnt_t>(e));
    } else if (e < 0) {
        mpq_div_2exp(q.backend().data(), q.backend().data(), static_cast<mp_bitcnt_t>(-e));
    }
    return q;
}

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw std::domain_error("to_rational: non-finite value");
    Rational q;
    mpq_set_d(q.backend().data(), x);
    return q;
}

double to_double(const Rational& q) { return mpq_get_d(q.backend().data()); }

double to_double(const Real& x) { return mpfr_get_d(x.backend().data(), MPFR_RNDN); }

Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto fail = [&]() -> Rational {
        throw std::invalid_argument("malformed number '" + s + "'");
    };
    if (s.empty()) return fail();
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(std::string_view(s).substr(0, slash));
        Rational den = parse_rational(std::string_view(s).substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return num / den;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail();
    long exponent = 0;
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') return fail();
        ++pos;
        std::string exp_text = s.substr(pos);
        if (exp_text.empty()) return fail();
        char* end = nullptr;
        exponent = std::strtol(exp_text.c_str(), &end, 10);
        if (*end != '\0') return fail();
    }
    // A leading 0 would make the string octal to GMP.
    auto nz = digits.find_first_not_of('0');
    Integer mant(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    Rational q(mant);
    long shift = exponent - frac_digits;
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(shift)));
    if (shift >= 0) {
        q *= ten_pow;
    } else {
        q /= ten_pow;
    }
    return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
    return q.str();
}

std::string to_decimal(const Real& x, int digits) {
    if (digits <= 0) {
        long bits = static_cast<long>(mpfr_get_prec(x.backend().data()));
        digits = static_cast<int>(std::ceil(static_cast<double>(bits) * 0.30102999566398120)) + 2;
    }
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << x;
    return os.str();
}

Rational round_to_decimal_places(const Rational& x, int places) {
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(places));
    Rational scaled = x * scale;
    Integer num = boost::multiprecision::numerator(scaled);
    Integer den = boost::multiprecision::denominator(scaled);
    // round half away from zero
    Integer twice = 2 * num + (num >= 0 ? den : Integer(-den));
    Integer rounded = twice / (2 * den);
    return Rational(rounded, scale);
}

std::string to_exact_decimal(const Rational& q) {
    Integer num = boost::multiprecision::numerator(q);
    Integer den = boost::multiprecision::denominator(q);
    unsigned twos = 0, fives = 0;
    Integer d = den;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return to_string(q);
    unsigned k = std::max(twos, fives);
    Integer scaled = num * boost::multiprecision::pow(Integer(10), k) / den;
    bool negative = scaled < 0;
    std::string digits = (negative ? Integer(-scaled) : scaled).str();
    if (k > 0) {
        if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
        digits.insert(digits.size() - k, 1, '.');
        while (digits.back() == '0') digits.pop_back();
        if (digits.back() == '.') digits.pop_back();
    }
    return negative ? "-" + digits : digits;
}

Rational rationalize(double x, double tol, long max_denominator) {
    if (!std::isfinite(x)) throw std::domain_error("rationalize: non-finite value");
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    Rational best = to_rational(x);
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(r);
        if (std::fabs(a) > 1e15) break;
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0;
        long k2 = ai * k1 + k0;
        if (k2 > max_denominator) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        best = Rational(h1, k1);
        if (std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) return best;
        double frac = r - a;
        if (frac == 0.0) break;
        r = 1.0 / frac;
    }
    return best;
}

}  // namespace sosbounds
