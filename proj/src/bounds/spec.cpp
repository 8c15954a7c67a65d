#include "sosbounds/bounds/spec.hpp"

#include "sosbounds/poly/parser.hpp"

namespace sosbounds::bounds {

using poly::RationalMatrix;
using poly::RationalPolynomial;

poly::DiffusionMatrix ProblemSpec::diffusion() const {
    if (!sigma) throw SpecError("sigma", "no noise given");
    return poly::DiffusionMatrix::from_sigma(*sigma);
}

bool is_positive_definite(const RationalMatrix& m) {
    RationalMatrix a = m;
    std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k].size() != n) return false;
        if (a[k][k] <= 0) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            Rational f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return true;
}

void ProblemSpec::validate() const {
    std::size_t n = dimension();
    if (n == 0) throw SpecError("vars", "at least one state variable is required");
    if (f.size() != n)
        throw SpecError("f", "expected " + std::to_string(n) + " components, got " + std::to_string(f.size()));
    for (const auto& fi : f)
        if (fi.dimension() != n) throw SpecError("f", "component has the wrong dimension");
    if (phi.dimension() != n) throw SpecError("phi", "wrong dimension");
    if (sigma) {
        if (sigma->size() != n) throw SpecError("sigma", "expected " + std::to_string(n) + " rows");
        std::size_t m = sigma->front().size();
        if (m == 0) throw SpecError("sigma", "empty rows");
        for (const auto& row : *sigma)
            if (row.size() != m) throw SpecError("sigma", "rows differ in length");
    }
    if (epsilon && *epsilon < 0) throw SpecError("eps", "noise strength must be non-negative");
    if (g && g->dimension() != n) throw SpecError("domain", "wrong dimension");
    if (zeta) {
        if (zeta->dimension() != n) throw SpecError("zeta", "wrong dimension");
        RationalMatrix z;
        try {
            z = poly::quadratic_form_matrix(*zeta);
        } catch (const std::exception&) {
            throw SpecError("zeta", "must be a homogeneous quadratic form");
        }
        if (!is_positive_definite(z)) throw SpecError("zeta", "Z not positive definite");
    }
}

ProblemSpec van_der_pol(const Rational& mu) {
    ProblemSpec s;
    s.vars = {"x", "y"};
    s.params["mu"] = mu;
    s.f = {poly::parse("y", s.vars, s.params), poly::parse("mu*(1 - x^2)*y - x", s.vars, s.params)};
    s.phi = poly::parse("x^2 + y^2", s.vars);
    s.sigma = RationalMatrix{{Rational(0)}, {Rational(1)}};
    return s;
}

}  // namespace sosbounds::bounds
