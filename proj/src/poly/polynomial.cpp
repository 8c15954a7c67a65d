#include "sosbounds/poly/polynomial.hpp"

namespace sosbounds::poly {

RealPolynomial to_real(const RationalPolynomial& p) {
    return p.transform<Real>([](const Rational& c) { return sosbounds::to_real(c); });
}

RationalPolynomial to_rational(const RealPolynomial& p) {
    return p.transform<Rational>([](const Real& c) { return sosbounds::to_rational(c); });
}

Real evaluate(const RationalPolynomial& p, std::span<const Real> point) {
    return to_real(p).evaluate(point);
}

double evaluate(const RationalPolynomial& p, std::span<const double> point) {
    if (point.size() != p.dimension()) throw std::invalid_argument("evaluate: point has wrong dimension");
    double total = 0.0;
    for (const auto& [m, c] : p.terms()) {
        double term = to_double(c);
        for (std::size_t i = 0; i < p.dimension(); ++i)
            for (unsigned e = 0; e < m[i]; ++e) term *= point[i];
        total += term;
    }
    return total;
}

namespace {

template <class C, class Format>
std::string render(const Polynomial<C>& p, const std::vector<std::string>& names, Format&& fmt) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const Monomial& m = it->first;
        C c = it->second;
        bool negative = c < 0;
        if (negative) c = -c;
        if (first) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        if (m.is_constant()) {
            out += fmt(c);
        } else if (c == 1) {
            out += m.to_string(names);
        } else {
            out += fmt(c) + "*" + m.to_string(names);
        }
    }
    return out;
}

}  // namespace

std::string to_string(const RationalPolynomial& p, const std::vector<std::string>& names) {
    return render(p, names, [](const Rational& c) { return sosbounds::to_string(c); });
}

std::string to_string(const RealPolynomial& p, const std::vector<std::string>& names) {
    return render(p, names, [](const Real& c) { return sosbounds::to_decimal(c); });
}

Rational max_abs_coefficient(const RationalPolynomial& p) {
    Rational best(0);
    for (const auto& kv : p.terms()) {
        Rational a = abs(kv.second);
        if (a > best) best = a;
    }
    return best;
}

std::vector<std::string> default_names(std::size_t dimension) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dimension; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

}  // namespace sosbounds::poly
