#include "sosbounds/poly/calculus.hpp"

#include <algorithm>

namespace sosbounds::poly {

DiffusionMatrix DiffusionMatrix::from_sigma(RationalMatrix sigma) {
    DiffusionMatrix d;
    std::size_t n = sigma.size();
    std::size_t m = n == 0 ? 0 : sigma[0].size();
    for (const auto& row : sigma)
        if (row.size() != m) throw std::invalid_argument("sigma: ragged rows");
    d.d_.assign(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k) d.d_[i][j] += sigma[i][k] * sigma[j][k];
    d.sigma_ = std::move(sigma);
    return d;
}

DiffusionMatrix DiffusionMatrix::identity(std::size_t n) {
    RationalMatrix s(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) s[i][i] = 1;
    return from_sigma(std::move(s));
}

bool DiffusionMatrix::is_diagonal() const {
    for (std::size_t i = 0; i < d_.size(); ++i)
        for (std::size_t j = 0; j < d_.size(); ++j)
            if (i != j && d_[i][j] != 0) return false;
    return true;
}

RationalMatrix jacobian_at_origin(std::span<const RationalPolynomial> f) {
    std::size_t n = f.size();
    RationalMatrix j(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i].dimension() != n) throw std::invalid_argument("jacobian: dimension mismatch");
        for (std::size_t k = 0; k < n; ++k) j[i][k] = f[i].coefficient(Monomial::unit(n, k));
    }
    return j;
}

RationalMatrix quadratic_form_matrix(const RationalPolynomial& zeta) {
    std::size_t n = zeta.dimension();
    RationalMatrix z(n, std::vector<Rational>(n, Rational(0)));
    for (const auto& [m, c] : zeta.terms()) {
        if (m.degree() != 2) throw std::invalid_argument("zeta must be a homogeneous quadratic");
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            for (unsigned e = 0; e < m[i]; ++e) idx.push_back(i);
        if (idx[0] == idx[1]) {
            z[idx[0]][idx[0]] = c;
        } else {
            z[idx[0]][idx[1]] = c / 2;
            z[idx[1]][idx[0]] = c / 2;
        }
    }
    return z;
}

RationalPolynomial quadratic_form(const RationalMatrix& z) {
    std::size_t n = z.size();
    RationalPolynomial out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.add_term(Monomial::unit(n, i) * Monomial::unit(n, j), z[i][j]);
    return out;
}

CompiledPolynomial::CompiledPolynomial(const RationalPolynomial& p) : dim_(p.dimension()) {
    for (const auto& [m, c] : p.terms()) {
        coefs_.push_back(to_double(c));
        for (std::size_t i = 0; i < dim_; ++i) {
            exps_.push_back(static_cast<std::uint16_t>(m[i]));
            max_exp_ = std::max(max_exp_, m[i]);
        }
    }
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
    constexpr std::size_t kStack = 64;
    double table[kStack];
    std::vector<double> heap;
    std::size_t stride = max_exp_ + 1;
    double* pw = table;
    if (stride * dim_ > kStack) {
        heap.resize(stride * dim_);
        pw = heap.data();
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        pw[i * stride] = 1.0;
        for (unsigned e = 1; e <= max_exp_; ++e) pw[i * stride + e] = pw[i * stride + e - 1] * x[i];
    }
    double total = 0.0;
    for (std::size_t t = 0; t < coefs_.size(); ++t) {
        double term = coefs_[t];
        const std::uint16_t* e = &exps_[t * dim_];
        for (std::size_t i = 0; i < dim_; ++i) term *= pw[i * stride + e[i]];
        total += term;
    }
    return total;
}

}  // namespace sosbounds::poly
