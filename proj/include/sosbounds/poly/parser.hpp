#pragma once

#include "sosbounds/poly/polynomial.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sosbounds::poly {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

using ConstantMap = std::map<std::string, Rational, std::less<>>;

/// Parses an infix polynomial over the ordered variables `vars`. Identifiers
/// not in `vars` are looked up in `constants`.
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := ('+'|'-') factor | base ('^' uint)?
///   base   := ident | number | '(' expr ')'
/// Numbers are decimals with optional exponent, or a/b.
RationalPolynomial parse(std::string_view text, const std::vector<std::string>& vars,
                         const ConstantMap& constants = {});

}  // namespace sosbounds::poly
