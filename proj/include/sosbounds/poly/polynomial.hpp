#pragma once

#include "sosbounds/numeric.hpp"
#include "sosbounds/poly/monomial.hpp"

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbounds::poly {

template <class C>
bool is_zero_coefficient(const C& c) {
    return c == 0;
}

/// Coefficient type of a product of polynomials with coefficients A and B.
template <class A, class B>
struct product_coefficient;

template <class A>
struct product_coefficient<A, A> {
    using type = A;
};

/// Sparse multivariate polynomial in canonical form: no stored zero
/// coefficients, terms keyed in graded lex order. Generic over the coefficient
/// ring (Rational, Real, or affine expressions in decision variables).
template <class C>
class Polynomial {
public:
    using Coefficient = C;
    using Terms = std::map<Monomial, C, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(std::size_t dimension) : dim_(dimension) {}

    static Polynomial constant(std::size_t dimension, const C& value) {
        Polynomial p(dimension);
        p.add_term(Monomial(dimension), value);
        return p;
    }
    static Polynomial variable(std::size_t dimension, std::size_t var) {
        Polynomial p(dimension);
        p.add_term(Monomial::unit(dimension, var), C(1));
        return p;
    }
    static Polynomial monomial(const Monomial& m, const C& value) {
        Polynomial p(m.dimension());
        p.add_term(m, value);
        return p;
    }

    std::size_t dimension() const { return dim_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    /// Total degree; -1 for the zero polynomial.
    int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.degree()); }

    C coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C(0) : it->second;
    }

    void add_term(const Monomial& m, const C& value) {
        check_monomial(m);
        if (is_zero_coefficient(value)) return;
        auto [it, inserted] = terms_.try_emplace(m, value);
        if (!inserted) {
            it->second += value;
            if (is_zero_coefficient(it->second)) terms_.erase(it);
        }
    }

    void set_term(const Monomial& m, const C& value) {
        check_monomial(m);
        if (is_zero_coefficient(value)) {
            terms_.erase(m);
        } else {
            terms_.insert_or_assign(m, value);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_dimension(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_dimension(o);
        for (const auto& [m, c] : o.terms_) add_term(m, C(-c));
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    Polynomial operator-() const {
        Polynomial out(dim_);
        for (const auto& [m, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, C(-c));
        return out;
    }

    /// Multiplies every coefficient by a scalar of the base ring.
    template <class S>
    Polynomial scaled(const S& s) const {
        Polynomial out(dim_);
        for (const auto& [m, c] : terms_) out.add_term(m, C(c * s));
        return out;
    }

    /// Polynomial with every coefficient mapped through `fn`; zeros dropped.
    template <class D, class Fn>
    Polynomial<D> transform(Fn&& fn) const {
        Polynomial<D> out(dim_);
        for (const auto& [m, c] : terms_) out.add_term(m, fn(c));
        return out;
    }

    /// Support exponents in ascending graded lex order.
    std::vector<Monomial> support() const {
        std::vector<Monomial> out;
        out.reserve(terms_.size());
        for (const auto& kv : terms_) out.push_back(kv.first);
        return out;
    }

    /// Evaluates with a per-variable power table; exact in the coefficient
    /// arithmetic when C is Rational.
    C evaluate(std::span<const C> point) const {
        if (point.size() != dim_) throw std::invalid_argument("evaluate: point has wrong dimension");
        std::vector<std::vector<C>> powers(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            unsigned top = 0;
            for (const auto& kv : terms_) top = std::max(top, kv.first[i]);
            powers[i].reserve(top + 1);
            powers[i].push_back(C(1));
            for (unsigned e = 1; e <= top; ++e) powers[i].push_back(C(powers[i].back() * point[i]));
        }
        C total(0);
        for (const auto& [m, c] : terms_) {
            C term(c);
            for (std::size_t i = 0; i < dim_; ++i)
                if (m[i] != 0) term *= powers[i][m[i]];
            total += term;
        }
        return total;
    }

    bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

private:
    void check_dimension(const Polynomial& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
    }
    void check_monomial(const Monomial& m) const {
        if (m.dimension() != dim_) throw std::invalid_argument("monomial dimension mismatch");
    }

    std::size_t dim_ = 0;
    Terms terms_;
};

template <class A, class B>
Polynomial<typename product_coefficient<A, B>::type> operator*(const Polynomial<A>& a, const Polynomial<B>& b) {
    using R = typename product_coefficient<A, B>::type;
    if (a.dimension() != b.dimension()) throw std::invalid_argument("polynomial dimension mismatch");
    Polynomial<R> out(a.dimension());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, R(ca * cb));
    return out;
}

template <class C>
Polynomial<C> pow(const Polynomial<C>& p, unsigned e) {
    Polynomial<C> out = Polynomial<C>::constant(p.dimension(), C(1));
    Polynomial<C> base = p;
    while (e > 0) {
        if (e & 1u) out = out * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return out;
}

using RationalPolynomial = Polynomial<Rational>;
using RealPolynomial = Polynomial<Real>;

RealPolynomial to_real(const RationalPolynomial& p);
/// Exact: each binary coefficient becomes a dyadic rational.
RationalPolynomial to_rational(const RealPolynomial& p);

/// Evaluates an exact polynomial at a point in working precision.
Real evaluate(const RationalPolynomial& p, std::span<const Real> point);
double evaluate(const RationalPolynomial& p, std::span<const double> point);

/// Infix rendering, highest terms first; parse(to_string(p)) == p for
/// rational coefficients.
std::string to_string(const RationalPolynomial& p, const std::vector<std::string>& names);
std::string to_string(const RealPolynomial& p, const std::vector<std::string>& names);

/// Largest coefficient magnitude; zero for the zero polynomial.
Rational max_abs_coefficient(const RationalPolynomial& p);

/// Variable names x1..xn when none are supplied.
std::vector<std::string> default_names(std::size_t dimension);

}  // namespace sosbounds::poly
