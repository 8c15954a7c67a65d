#include "sosbounds/poly/parser.hpp"

#include <cctype>

namespace sosbounds::poly {

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars, const ConstantMap& constants)
        : s_(text), vars_(vars), constants_(constants) {}

    RationalPolynomial run() {
        skip();
        if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
        RationalPolynomial p = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return p;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    RationalPolynomial expr() {
        RationalPolynomial p = term();
        for (;;) {
            if (accept('+')) {
                p += term();
            } else if (accept('-')) {
                p -= term();
            } else {
                return p;
            }
        }
    }

    RationalPolynomial term() {
        RationalPolynomial p = factor();
        while (accept('*')) p = p * factor();
        return p;
    }

    RationalPolynomial factor() {
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        RationalPolynomial b = base();
        if (accept('^')) {
            skip();
            std::size_t at = pos_;
            if (pos_ < s_.size() && s_[pos_] == '-') throw ParseError("negative exponent", at);
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw ParseError("expected integer exponent", at);
            if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == '/'))
                throw ParseError("fractional exponent", at);
            unsigned long e = std::stoul(std::string(s_.substr(start, pos_ - start)));
            if (e > 1000) throw ParseError("exponent too large", at);
            b = pow(b, static_cast<unsigned>(e));
        }
        return b;
    }

    RationalPolynomial base() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            RationalPolynomial p = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return p;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    RationalPolynomial identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string_view name = s_.substr(start, pos_ - start);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return RationalPolynomial::variable(vars_.size(), i);
        if (auto it = constants_.find(name); it != constants_.end())
            return RationalPolynomial::constant(vars_.size(), it->second);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view scan_decimal() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        return s_.substr(start, pos_ - start);
    }

    RationalPolynomial number() {
        std::size_t start = pos_;
        Rational value;
        try {
            value = parse_rational(scan_decimal());
            if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                std::size_t den_at = pos_;
                if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    throw ParseError("expected denominator", den_at);
                Rational den = parse_rational(scan_decimal());
                if (den == 0) throw ParseError("zero denominator", den_at);
                value /= den;
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), start);
        }
        return RationalPolynomial::constant(vars_.size(), value);
    }

    std::string_view s_;
    const std::vector<std::string>& vars_;
    const ConstantMap& constants_;
    std::size_t pos_ = 0;
};

}  // namespace

RationalPolynomial parse(std::string_view text, const std::vector<std::string>& vars, const ConstantMap& constants) {
    if (vars.empty()) throw ParseError("polynomials need at least one variable", 0);
    return Parser(text, vars, constants).run();
}

}  // namespace sosbounds::poly
