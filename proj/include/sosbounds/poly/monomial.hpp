#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace sosbounds::poly {

/// Exponent vector x1^e1 ... xn^en. The dimension is fixed at construction.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::size_t dimension) : exps_(dimension, 0) {}
    Monomial(std::initializer_list<unsigned> exps);
    explicit Monomial(std::vector<std::uint16_t> exps) : exps_(std::move(exps)) {}

    static Monomial unit(std::size_t dimension, std::size_t var, unsigned power = 1);

    std::size_t dimension() const { return exps_.size(); }
    unsigned degree() const;
    unsigned operator[](std::size_t i) const { return exps_[i]; }
    const std::vector<std::uint16_t>& exponents() const { return exps_; }
    bool is_constant() const { return degree() == 0; }

    Monomial operator*(const Monomial& other) const;
    bool divisible_by(const Monomial& other) const;
    /// All exponents even.
    bool is_square() const;

    bool operator==(const Monomial& other) const { return exps_ == other.exps_; }
    bool operator!=(const Monomial& other) const { return exps_ != other.exps_; }

    std::string to_string(const std::vector<std::string>& names) const;

private:
    std::vector<std::uint16_t> exps_;
};

/// Graded lexicographic order: total degree first, then the exponent of the
/// first variable, then the second, and so on.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

inline bool operator<(const Monomial& a, const Monomial& b) { return GradedLex{}(a, b); }
inline bool operator>(const Monomial& a, const Monomial& b) { return GradedLex{}(b, a); }

/// Every monomial of total degree <= max_degree, ascending in graded lex order.
std::vector<Monomial> monomials_up_to(std::size_t dimension, unsigned max_degree);

/// Monomials of total degree in [min_degree, max_degree], ascending.
std::vector<Monomial> monomials_between(std::size_t dimension, unsigned min_degree, unsigned max_degree);

}  // namespace sosbounds::poly
