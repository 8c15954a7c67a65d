#include "random_poly.hpp"

#include "sosbounds/poly/calculus.hpp"
#include "sosbounds/poly/parser.hpp"

#include <doctest.h>

using namespace sosbounds;
using namespace sosbounds::poly;

namespace {

const std::vector<std::string> xy{"x", "y"};

RationalPolynomial P(const char* text) { return parse(text, xy, {{"mu", Rational(1)}}); }

std::vector<RationalPolynomial> van_der_pol(const Rational& mu) {
    return {parse("y", xy), parse("mu*(1 - x^2)*y - x", xy, {{"mu", mu}})};
}

}  // namespace

TEST_SUITE("poly") {

TEST_CASE("monomial basics") {
    Monomial a{2, 1}, b{0, 3};
    CHECK((a * b) == Monomial{2, 4});
    CHECK(a.degree() == 3);
    CHECK(a.to_string(xy) == "x^2*y");
    CHECK(Monomial(2).to_string(xy) == "1");
    CHECK(Monomial{1, 0} > Monomial{0, 1});
    CHECK(Monomial{0, 2} > Monomial{1, 0});
    CHECK(monomials_up_to(2, 2).size() == 6);
    CHECK(monomials_up_to(2, 12).size() == 91);
    CHECK(monomials_up_to(3, 0).size() == 1);
}

TEST_CASE("parse examples") {
    RationalPolynomial vdp = P("mu*(1 - x^2)*y - x");
    RationalPolynomial expected(2);
    expected.add_term(Monomial{0, 1}, Rational(1));
    expected.add_term(Monomial{2, 1}, Rational(-1));
    expected.add_term(Monomial{1, 0}, Rational(-1));
    CHECK(vdp == expected);

    RationalPolynomial zero = P("0");
    CHECK(zero.is_zero());
    CHECK(zero.terms().empty());

    CHECK(P("(x+y)^2") == P("x^2 + 2*x*y + y^2"));
    CHECK(P("1/2*x") == P("0.5*x"));
    CHECK(P("1e-3*y") == P("1/1000*y"));
    CHECK(P("-x^2") == P("0 - x*x"));
    CHECK(P("2.5E+1") == P("25"));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(P("x +"), ParseError);
    CHECK_THROWS_AS(P("x^-1"), ParseError);
    CHECK_THROWS_AS(P("x^1.5"), ParseError);
    CHECK_THROWS_AS(P("z + 1"), ParseError);
    CHECK_THROWS_AS(P("(x + y"), ParseError);
    CHECK_THROWS_AS(P(""), ParseError);
    CHECK_THROWS_AS(parse("1", {}), ParseError);
    try {
        P("x + z");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
}

TEST_CASE("print parse round trip") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        RationalPolynomial p = testutil::random_polynomial(rng, 3, 6, 8);
        std::vector<std::string> names{"a", "b", "c"};
        CHECK(parse(to_string(p, names), names) == p);
    }
    CHECK(to_string(P("y - x^2*y - x"), xy) == "-x^2*y - x + y");
}

TEST_CASE("lie derivative examples") {
    std::vector<RationalPolynomial> rot{P("y"), P("-x")};
    CHECK(lie_derivative(rot, P("x^2 + y^2")).is_zero());
    CHECK(lie_derivative(van_der_pol(Rational(1)), P("x^2 + y^2")) == P("2*y^2 - 2*x^2*y^2"));
    CHECK(lie_derivative(van_der_pol(Rational(3)), P("7")).is_zero());
}

TEST_CASE("diffusion term examples") {
    CHECK(diffusion_term(DiffusionMatrix::identity(2), P("x^2 + y^2")) == P("4"));
    auto d = DiffusionMatrix::from_sigma({{Rational(0)}, {Rational(1)}});
    CHECK(d(0, 0) == 0);
    CHECK(d(1, 1) == 1);
    CHECK(d(0, 1) == 0);
    CHECK(diffusion_term(d, P("x^2 + y^2")) == P("2"));
    auto full = DiffusionMatrix::from_sigma({{Rational(1), Rational(2)}, {Rational(-1), Rational(3)}});
    CHECK(full(0, 1) == 5);
    CHECK(diffusion_term(full, P("3*x - 2*y + 1")).is_zero());
    CHECK(diffusion_term(full, P("x*y")) == P("10"));
}

TEST_CASE("evaluate examples") {
    std::vector<Rational> pt{Rational(1), Rational(2)};
    CHECK(P("x^2 + y^2").evaluate(pt) == 5);
    std::vector<Rational> origin{Rational(0), Rational(0)};
    CHECK(P("3*x^3 - y + 7/2").evaluate(origin) == Rational(7, 2));
    std::vector<double> dpt{1.0, 2.0};
    CHECK(evaluate(P("x^2 + y^2"), dpt) == doctest::Approx(5.0));
    CompiledPolynomial c(P("x^2*y - 3*y^4 + 2"));
    CHECK(c(dpt) == doctest::Approx(1.0 * 2.0 - 3.0 * 16.0 + 2.0));
}

TEST_CASE("jacobian and quadratic forms") {
    auto j = jacobian_at_origin(van_der_pol(Rational(1)));
    CHECK(j[0][0] == 0);
    CHECK(j[0][1] == 1);
    CHECK(j[1][0] == -1);
    CHECK(j[1][1] == 1);
    auto z = quadratic_form_matrix(P("x^2 - x*y + y^2"));
    CHECK(z[0][1] == Rational(-1, 2));
    CHECK(quadratic_form(z) == P("x^2 - x*y + y^2"));
    CHECK_THROWS(quadratic_form_matrix(P("x^2 + x")));
}

TEST_CASE("ring axioms and degree additivity on random inputs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        std::size_t dim = 1 + i % 3;
        auto p = testutil::random_polynomial(rng, dim, 5, 6);
        auto q = testutil::random_polynomial(rng, dim, 5, 6);
        auto r = testutil::random_polynomial(rng, dim, 4, 5);
        REQUIRE((p + q) * r == p * r + q * r);
        REQUIRE(p * q == q * p);
        REQUIRE((p * q) * r == p * (q * r));
        REQUIRE(p - p == RationalPolynomial(dim));
        if (!p.is_zero() && !q.is_zero()) REQUIRE((p * q).degree() == p.degree() + q.degree());
    }
}

TEST_CASE("Leibniz rule on random inputs") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        std::size_t dim = 2 + i % 2;
        std::vector<RationalPolynomial> f;
        for (std::size_t k = 0; k < dim; ++k) f.push_back(testutil::random_polynomial(rng, dim, 3, 4));
        auto p = testutil::random_polynomial(rng, dim, 4, 5);
        auto q = testutil::random_polynomial(rng, dim, 4, 5);
        REQUIRE(lie_derivative(f, p * q) == p * lie_derivative(f, q) + q * lie_derivative(f, p));
    }
}

TEST_CASE("evaluation is a ring homomorphism") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        auto p = testutil::random_polynomial(rng, 2, 5, 6);
        auto q = testutil::random_polynomial(rng, 2, 5, 6);
        std::vector<Rational> v{testutil::random_rational(rng), testutil::random_rational(rng)};
        REQUIRE((p * q).evaluate(v) == p.evaluate(v) * q.evaluate(v));
        REQUIRE((p + q).evaluate(v) == p.evaluate(v) + q.evaluate(v));
    }
}

TEST_CASE("Laplacian equals the sum of pure second partials") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto p = testutil::random_polynomial(rng, 3, 6, 8);
        RationalPolynomial lap(3);
        for (const auto& [m, c] : p.terms()) {
            for (std::size_t k = 0; k < 3; ++k) {
                if (m[k] < 2) continue;
                auto e = m.exponents();
                e[k] = static_cast<std::uint16_t>(e[k] - 2);
                lap.add_term(Monomial(e), c * m[k] * (m[k] - 1));
            }
        }
        REQUIRE(diffusion_term(DiffusionMatrix::identity(3), p) == lap);
    }
}

TEST_CASE("Real coefficient conversion is exact") {
    PrecisionGuard guard(128);
    RationalPolynomial p = P("1/3*x^2 - 5*y + 1/1024");
    RealPolynomial r = to_real(p);
    RationalPolynomial back = to_rational(r);
    CHECK(back.coefficient(Monomial{0, 0}) == Rational(1, 1024));
    CHECK(back.coefficient(Monomial{0, 1}) == -5);
    CHECK(abs(back.coefficient(Monomial{2, 0}) - Rational(1, 3)) < Rational(1, Integer(1) << 120));
}

TEST_CASE("decimal literals with leading zeros stay decimal") {
    CHECK(parse_rational("0.0089") == Rational(89, 10000));
    CHECK(parse_rational("010") == 10);
    CHECK(parse_rational("-0.000125e3") == Rational(-1, 8));
    CHECK(parse_rational("0.000") == 0);
    Rational q(-35341, 1 << 20);
    CHECK(parse_rational(to_exact_decimal(q)) == q);
}

}  // TEST_SUITE
