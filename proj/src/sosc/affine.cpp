#include "sosbounds/sosc/affine.hpp"

#include <stdexcept>

namespace sosbounds::sosc {

std::size_t VarRegistry::create(std::string name, VarKind kind) {
    std::size_t id = vars_.size();
    vars_.push_back({id, std::move(name), kind});
    return id;
}

AffineExpr AffineExpr::variable(std::size_t id, const Rational& weight) {
    AffineExpr a;
    if (weight != 0) a.weights_.emplace(id, weight);
    return a;
}

Rational AffineExpr::weight(std::size_t id) const {
    auto it = weights_.find(id);
    return it == weights_.end() ? Rational(0) : it->second;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
    constant_ += o.constant_;
    for (const auto& [id, w] : o.weights_) {
        auto [it, inserted] = weights_.try_emplace(id, w);
        if (!inserted) {
            it->second += w;
            if (it->second == 0) weights_.erase(it);
        }
    }
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) { return *this += -o; }

AffineExpr& AffineExpr::operator*=(const Rational& s) {
    if (s == 0) {
        constant_ = 0;
        weights_.clear();
        return *this;
    }
    constant_ *= s;
    for (auto& kv : weights_) kv.second *= s;
    return *this;
}

AffineExpr AffineExpr::operator-() const {
    AffineExpr a(*this);
    a.constant_ = -a.constant_;
    for (auto& kv : a.weights_) kv.second = -kv.second;
    return a;
}

Rational AffineExpr::evaluate(std::span<const Rational> values) const {
    Rational v = constant_;
    for (const auto& [id, w] : weights_) {
        if (id >= values.size()) throw std::out_of_range("AffineExpr: missing value for decision variable");
        v += w * values[id];
    }
    return v;
}

Real AffineExpr::evaluate(std::span<const Real> values) const {
    Real v = to_real(constant_);
    for (const auto& [id, w] : weights_) {
        if (id >= values.size()) throw std::out_of_range("AffineExpr: missing value for decision variable");
        v += to_real(w) * values[id];
    }
    return v;
}

std::string to_string(const AffineExpr& a, const VarRegistry* vars) {
    std::string out;
    if (a.constant() != 0 || a.weights().empty()) out = sosbounds::to_string(a.constant());
    for (const auto& [id, w] : a.weights()) {
        std::string name = vars && id < vars->size() ? (*vars)[id].name : "v" + std::to_string(id);
        if (!out.empty()) out += w < 0 ? " - " : " + ";
        else if (w < 0) out += "-";
        Rational aw = abs(w);
        if (aw != 1) out += sosbounds::to_string(aw) + "*";
        out += name;
    }
    return out;
}

AffinePolynomial lift(const poly::RationalPolynomial& p) {
    return p.transform<AffineExpr>([](const Rational& c) { return AffineExpr(c); });
}

AffinePolynomial variable_constant(std::size_t dimension, std::size_t var_id, const Rational& weight) {
    return AffinePolynomial::constant(dimension, AffineExpr::variable(var_id, weight));
}

poly::RationalPolynomial substitute(const AffinePolynomial& p, std::span<const Rational> values) {
    return p.transform<Rational>([&](const AffineExpr& a) { return a.evaluate(values); });
}

poly::RealPolynomial substitute(const AffinePolynomial& p, std::span<const Real> values) {
    return p.transform<Real>([&](const AffineExpr& a) { return a.evaluate(values); });
}

poly::RationalPolynomial constant_part(const AffinePolynomial& p) {
    return p.transform<Rational>([](const AffineExpr& a) { return a.constant(); });
}

poly::RationalPolynomial variable_part(const AffinePolynomial& p, std::size_t var_id) {
    return p.transform<Rational>([&](const AffineExpr& a) { return a.weight(var_id); });
}

std::string to_string(const AffinePolynomial& p, const std::vector<std::string>& names, const VarRegistry* vars) {
    if (p.is_zero()) return "0";
    std::string out;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        if (!out.empty()) out += " + ";
        out += "(" + to_string(it->second, vars) + ")";
        if (!it->first.is_constant()) out += "*" + it->first.to_string(names);
    }
    return out;
}

}  // namespace sosbounds::sosc
