#include "sosbounds/poly/monomial.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sosbounds::poly {

Monomial::Monomial(std::initializer_list<unsigned> exps) {
    exps_.reserve(exps.size());
    for (unsigned e : exps) exps_.push_back(static_cast<std::uint16_t>(e));
}

Monomial Monomial::unit(std::size_t dimension, std::size_t var, unsigned power) {
    if (var >= dimension) throw std::out_of_range("Monomial::unit: variable index out of range");
    Monomial m(dimension);
    m.exps_[var] = static_cast<std::uint16_t>(power);
    return m;
}

unsigned Monomial::degree() const {
    return std::accumulate(exps_.begin(), exps_.end(), 0u);
}

Monomial Monomial::operator*(const Monomial& other) const {
    if (other.dimension() != dimension()) throw std::invalid_argument("Monomial: dimension mismatch");
    Monomial out(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] = static_cast<std::uint16_t>(exps_[i] + other.exps_[i]);
    return out;
}

bool Monomial::divisible_by(const Monomial& other) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
        if (exps_[i] < other.exps_[i]) return false;
    return true;
}

bool Monomial::is_square() const {
    return std::all_of(exps_.begin(), exps_.end(), [](auto e) { return e % 2 == 0; });
}

std::string Monomial::to_string(const std::vector<std::string>& names) const {
    std::string out;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        if (exps_[i] == 0) continue;
        if (!out.empty()) out += '*';
        out += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
        if (exps_[i] > 1) out += '^' + std::to_string(exps_[i]);
    }
    return out.empty() ? "1" : out;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents() < b.exponents();
}

namespace {

void enumerate(std::size_t dimension, unsigned degree, std::size_t var, std::vector<std::uint16_t>& cur,
               std::vector<Monomial>& out) {
    if (var + 1 == dimension) {
        cur[var] = static_cast<std::uint16_t>(degree);
        out.emplace_back(cur);
        cur[var] = 0;
        return;
    }
    for (unsigned e = 0; e <= degree; ++e) {
        cur[var] = static_cast<std::uint16_t>(e);
        enumerate(dimension, degree - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

}  // namespace

std::vector<Monomial> monomials_between(std::size_t dimension, unsigned min_degree, unsigned max_degree) {
    std::vector<Monomial> out;
    if (dimension == 0) return out;
    std::vector<std::uint16_t> cur(dimension, 0);
    for (unsigned d = min_degree; d <= max_degree; ++d) {
        std::vector<Monomial> level;
        enumerate(dimension, d, 0, cur, level);
        std::sort(level.begin(), level.end(), GradedLex{});
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

std::vector<Monomial> monomials_up_to(std::size_t dimension, unsigned max_degree) {
    return monomials_between(dimension, 0, max_degree);
}

}  // namespace sosbounds::poly
