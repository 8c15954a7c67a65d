#pragma once

#include "sosbounds/poly/polynomial.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace sosbounds::poly {

using RationalMatrix = std::vector<std::vector<Rational>>;

template <class C>
Polynomial<C> derivative(const Polynomial<C>& p, std::size_t var) {
    if (var >= p.dimension()) throw std::out_of_range("derivative: variable index out of range");
    Polynomial<C> out(p.dimension());
    for (const auto& [m, c] : p.terms()) {
        unsigned e = m[var];
        if (e == 0) continue;
        std::vector<std::uint16_t> exps = m.exponents();
        exps[var] = static_cast<std::uint16_t>(e - 1);
        out.add_term(Monomial(std::move(exps)), C(c * Rational(e)));
    }
    return out;
}

template <class C>
std::vector<Polynomial<C>> gradient(const Polynomial<C>& p) {
    std::vector<Polynomial<C>> g;
    g.reserve(p.dimension());
    for (std::size_t i = 0; i < p.dimension(); ++i) g.push_back(derivative(p, i));
    return g;
}

/// f·∇V.
template <class A, class B>
Polynomial<typename product_coefficient<A, B>::type> lie_derivative(std::span<const Polynomial<A>> f,
                                                                   const Polynomial<B>& v) {
    using R = typename product_coefficient<A, B>::type;
    if (f.size() != v.dimension()) throw std::invalid_argument("lie_derivative: dimension mismatch");
    Polynomial<R> out(v.dimension());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].dimension() != v.dimension()) throw std::invalid_argument("lie_derivative: dimension mismatch");
        out += f[i] * derivative(v, i);
    }
    return out;
}

template <class A, class B>
auto lie_derivative(const std::vector<Polynomial<A>>& f, const Polynomial<B>& v) {
    return lie_derivative(std::span<const Polynomial<A>>(f), v);
}

/// Constant diffusion matrix D = σσᵀ, kept together with its factor.
class DiffusionMatrix {
public:
    DiffusionMatrix() = default;
    /// σ is n×m, given row by row.
    static DiffusionMatrix from_sigma(RationalMatrix sigma);
    static DiffusionMatrix identity(std::size_t n);

    std::size_t dimension() const { return d_.size(); }
    const RationalMatrix& sigma() const { return sigma_; }
    const RationalMatrix& matrix() const { return d_; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return d_[i][j]; }
    bool is_diagonal() const;

private:
    RationalMatrix sigma_;
    RationalMatrix d_;
};

/// ∇·(D∇V) = Σᵢⱼ Dᵢⱼ ∂²V/∂xᵢ∂xⱼ.
template <class C>
Polynomial<C> diffusion_term(const DiffusionMatrix& d, const Polynomial<C>& v) {
    if (d.dimension() != v.dimension()) throw std::invalid_argument("diffusion_term: dimension mismatch");
    Polynomial<C> out(v.dimension());
    for (std::size_t i = 0; i < d.dimension(); ++i) {
        bool row_zero = true;
        for (std::size_t j = 0; j < d.dimension(); ++j) row_zero = row_zero && d(i, j) == 0;
        if (row_zero) continue;
        Polynomial<C> di = derivative(v, i);
        for (std::size_t j = 0; j < d.dimension(); ++j) {
            if (d(i, j) == 0) continue;
            out += derivative(di, j).scaled(d(i, j));
        }
    }
    return out;
}

/// Jacobian of f at the origin: entry (i, j) is the coefficient of x_j in f_i.
RationalMatrix jacobian_at_origin(std::span<const RationalPolynomial> f);

/// Symmetric matrix Z of a homogeneous quadratic ζ = xᵀZx; throws if ζ has
/// terms of other degrees.
RationalMatrix quadratic_form_matrix(const RationalPolynomial& zeta);

/// xᵀZx.
RationalPolynomial quadratic_form(const RationalMatrix& z);

/// Double-precision evaluator for hot loops (integrators, grid solvers).
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const RationalPolynomial& p);

    std::size_t dimension() const { return dim_; }
    double operator()(std::span<const double> x) const;

private:
    std::size_t dim_ = 0;
    unsigned max_exp_ = 0;
    std::vector<double> coefs_;
    std::vector<std::uint16_t> exps_;
};

}  // namespace sosbounds::poly
