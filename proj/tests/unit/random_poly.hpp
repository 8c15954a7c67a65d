#pragma once

#include "sosbounds/poly/polynomial.hpp"

#include <random>

namespace testutil {

using sosbounds::Rational;
using sosbounds::poly::Monomial;
using sosbounds::poly::RationalPolynomial;

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    return Rational(num(rng), den(rng));
}

inline RationalPolynomial random_polynomial(std::mt19937_64& rng, std::size_t dim, unsigned max_degree,
                                            std::size_t max_terms) {
    std::uniform_int_distribution<std::size_t> count(1, max_terms);
    std::uniform_int_distribution<unsigned> exp(0, max_degree);
    RationalPolynomial p(dim);
    std::size_t k = count(rng);
    for (std::size_t t = 0; t < k; ++t) {
        std::vector<std::uint16_t> e(dim, 0);
        unsigned budget = exp(rng);
        for (unsigned b = 0; b < budget; ++b) e[std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng)]++;
        p.add_term(Monomial(e), random_rational(rng));
    }
    return p;
}

}  // namespace testutil
