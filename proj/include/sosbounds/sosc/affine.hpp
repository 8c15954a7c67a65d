#pragma once

#include "sosbounds/poly/polynomial.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace sosbounds::sosc {

enum class VarKind { BoundU, BoundL, Storage, Multiplier, Alpha, Other };

struct DecisionVar {
    std::size_t id;
    std::string name;
    VarKind kind;
};

/// Allocates decision variables for one program. Ids are dense, starting at 0.
class VarRegistry {
public:
    std::size_t create(std::string name, VarKind kind);
    std::size_t size() const { return vars_.size(); }
    const DecisionVar& operator[](std::size_t id) const { return vars_.at(id); }
    const std::vector<DecisionVar>& vars() const { return vars_; }

private:
    std::vector<DecisionVar> vars_;
};

/// constant + Σ weight·var.
class AffineExpr {
public:
    AffineExpr() = default;
    AffineExpr(const Rational& c) : constant_(c) {}
    AffineExpr(int c) : constant_(c) {}

    static AffineExpr variable(std::size_t id, const Rational& weight = Rational(1));

    const Rational& constant() const { return constant_; }
    const std::map<std::size_t, Rational>& weights() const { return weights_; }
    Rational weight(std::size_t id) const;
    bool is_zero() const { return constant_ == 0 && weights_.empty(); }
    bool is_constant() const { return weights_.empty(); }

    AffineExpr& operator+=(const AffineExpr& o);
    AffineExpr& operator-=(const AffineExpr& o);
    AffineExpr& operator*=(const Rational& s);
    AffineExpr operator-() const;
    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator*(AffineExpr a, const Rational& s) { return a *= s; }
    friend AffineExpr operator*(const Rational& s, AffineExpr a) { return a *= s; }
    bool operator==(const AffineExpr& o) const { return constant_ == o.constant_ && weights_ == o.weights_; }
    bool operator!=(const AffineExpr& o) const { return !(*this == o); }

    Rational evaluate(std::span<const Rational> values) const;
    Real evaluate(std::span<const Real> values) const;

private:
    Rational constant_{0};
    std::map<std::size_t, Rational> weights_;
};

inline bool is_zero_coefficient(const AffineExpr& a) { return a.is_zero(); }

std::string to_string(const AffineExpr& a, const VarRegistry* vars = nullptr);

}  // namespace sosbounds::sosc

namespace sosbounds::poly {

template <>
struct product_coefficient<Rational, sosc::AffineExpr> {
    using type = sosc::AffineExpr;
};
template <>
struct product_coefficient<sosc::AffineExpr, Rational> {
    using type = sosc::AffineExpr;
};

}  // namespace sosbounds::poly

namespace sosbounds::sosc {

using AffinePolynomial = poly::Polynomial<AffineExpr>;

AffinePolynomial lift(const poly::RationalPolynomial& p);
/// Constant polynomial equal to one decision variable.
AffinePolynomial variable_constant(std::size_t dimension, std::size_t var_id, const Rational& weight = Rational(1));

poly::RationalPolynomial substitute(const AffinePolynomial& p, std::span<const Rational> values);
poly::RealPolynomial substitute(const AffinePolynomial& p, std::span<const Real> values);

/// Part of p whose coefficients do not depend on decision variables.
poly::RationalPolynomial constant_part(const AffinePolynomial& p);

/// Coefficient of one decision variable, as a polynomial.
poly::RationalPolynomial variable_part(const AffinePolynomial& p, std::size_t var_id);

std::string to_string(const AffinePolynomial& p, const std::vector<std::string>& names,
                      const VarRegistry* vars = nullptr);

}  // namespace sosbounds::sosc
