#include "sosbounds/certify/certificate.hpp"
#include "sosbounds/certify/certify_bound.hpp"
#include "sosbounds/poly/parser.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace sosbounds;
using namespace sosbounds::certify;
using poly::Monomial;

namespace {

const std::vector<std::string> xy{"x", "y"};

RationalPolynomial P(const std::string& s) { return poly::parse(s, xy); }

std::vector<Monomial> linear_basis() { return {Monomial::unit(2, 0, 1), Monomial::unit(2, 1, 1)}; }

RationalMatrix ones() { return {{Rational(1), Rational(1)}, {Rational(1), Rational(1)}}; }

/// Q = L Lᵀ with small random integer L, so Q is PSD with rank ≤ rank.
RationalMatrix random_gram(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
    std::uniform_int_distribution<int> d(-3, 3);
    std::vector<std::vector<Rational>> l(n, std::vector<Rational>(rank));
    for (auto& row : l)
        for (auto& v : row) v = d(rng);
    RationalMatrix q(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < rank; ++k) q[i][j] += l[i][k] * l[j][k];
    return q;
}

std::vector<Monomial> quadratic_basis() {
    return {Monomial(2), Monomial::unit(2, 0, 1), Monomial::unit(2, 1, 1), Monomial::unit(2, 0, 2),
            Monomial::unit(2, 0, 1) * Monomial::unit(2, 1, 1), Monomial::unit(2, 1, 2)};
}

RationalPolynomial gram_polynomial(const RationalMatrix& q, const std::vector<Monomial>& z) {
    RationalPolynomial p(2);
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = 0; j < z.size(); ++j) p.add_term(z[i] * z[j], q[i][j]);
    return p;
}

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("residual") {
    auto body = P("(x + y)^2");
    auto res = residual(body, ones(), linear_basis());
    CHECK(res.e.is_zero());
    CHECK(res.r == 0);

    auto q = ones();
    q[0][0] += Rational(1, 1000000000);
    res = residual(body, q, linear_basis());
    CHECK(res.r == Rational(1, 1000000000));
    CHECK(res.e == P("1/1000000000*x^2"));

    CHECK_THROWS_AS(residual(body, RationalMatrix{{Rational(1)}}, linear_basis()), std::invalid_argument);
    RationalMatrix skew{{Rational(1), Rational(2)}, {Rational(0), Rational(1)}};
    CHECK_THROWS_AS(residual(body, skew, linear_basis()), std::invalid_argument);
    CHECK_THROWS_AS(residual(poly::parse("x", {"x"}), ones(), linear_basis()), std::invalid_argument);
}

TEST_CASE("min_eigenvalue") {
    CHECK(std::fabs(to_double(min_eigenvalue(ones()).lambda0)) < 1e-30);
    for (std::size_t k : {1u, 3u, 7u}) {
        RationalMatrix id(k, std::vector<Rational>(k, Rational(0)));
        for (std::size_t i = 0; i < k; ++i) id[i][i] = 1;
        CHECK(to_double(min_eigenvalue(id).lambda0) == doctest::Approx(1.0).epsilon(1e-30));
    }
    RationalMatrix a{{Rational(2), Rational(1)}, {Rational(1), Rational(2)}};
    auto est = min_eigenvalue(a);
    CHECK(to_double(est.lambda0) == doctest::Approx(1.0).epsilon(1e-30));
    CHECK(est.mantissa_bits >= 128);
    CHECK(est.off_norm < 1e-30);
    RealMatrix skew(2, 2);
    skew(0, 1) = 1;
    CHECK_THROWS_AS(min_eigenvalue(skew), std::invalid_argument);
}

TEST_CASE("check") {
    SosCertificate exact = make_certificate("exact", P("(x + y)^2"), ones(), linear_basis());
    CHECK(exact.r == 0);
    CHECK(exact.certified);

    SosCertificate tight;
    tight.basis.assign(66, Monomial(2));
    tight.lambda0 = Real(1e-30);
    tight.r = Rational(1, Integer(10) * Integer("10000000000000000000"));
    CHECK_FALSE(check(tight));
    tight.r = 0;
    tight.lambda0 = 0;
    CHECK(check(tight));

    auto q = ones();
    q[0][1] = q[1][0] = Rational(11, 10);
    SosCertificate indefinite = make_certificate("indefinite", gram_polynomial(q, linear_basis()), q, linear_basis());
    CHECK(indefinite.r == 0);
    CHECK_FALSE(indefinite.certified);
    CHECK(report(indefinite).find("not certified") != std::string::npos);
    CHECK(report(exact).find("certified, not formally rigorous") != std::string::npos);
}

TEST_CASE("exact PSD test") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 2 + rng() % 5;
        auto q = random_gram(rng, n, 1 + rng() % n);
        CHECK(is_psd_exact(q));
        q[0][0] -= 1;
        bool psd = is_psd_exact(q);
        CHECK(psd == (to_double(min_eigenvalue(q, 256).lambda0) > -1e-40));
    }
}

TEST_CASE("check is monotone in precision for exact decompositions") {
    std::mt19937_64 rng(11);
    auto z = quadratic_basis();
    for (int t = 0; t < 10; ++t) {
        auto q = random_gram(rng, z.size(), 1 + rng() % z.size());
        auto body = gram_polynomial(q, z);
        bool before = false;
        for (unsigned bits : {64u, 128u, 256u, 512u}) {
            auto c = make_certificate("g", body, q, z, bits);
            CHECK(c.r == 0);
            if (before) CHECK(c.certified);
            before = c.certified;
        }
        CHECK(before);
    }
}

TEST_CASE("certificate file round trip") {
    std::mt19937_64 rng(3);
    auto z = quadratic_basis();
    auto q = random_gram(rng, z.size(), 4);
    q[2][3] += Rational(1, 3);
    q[3][2] = q[2][3];
    q[1][1] += Rational(3, 1024);
    auto body = gram_polynomial(random_gram(rng, z.size(), 4), z);
    auto cert = make_certificate("round trip", body, q, z);
    std::stringstream ss;
    write_certificate(ss, cert);
    auto back = read_certificate(ss);
    CHECK(back.label == cert.label);
    CHECK(back.basis == cert.basis);
    CHECK(back.gram == cert.gram);
    CHECK(back.body == cert.body);
    CHECK(back.residual == cert.residual);
    CHECK(back.r == cert.r);
    CHECK(back.certified == cert.certified);
    // The re-derived identity zᵀQz − body − e = 0 holds after reading.
    CHECK(residual(back.body, back.gram, back.basis).e == back.residual);

    std::string text = ss.str();
    std::stringstream out;
    write_certificate(out, cert);
    std::string s = out.str();
    auto pos = s.find("residual");
    REQUIRE(pos != std::string::npos);
    auto line_end = s.find('\n', s.find('\n', pos) + 1);
    std::string tampered = s.substr(0, s.find('\n', pos) + 1) + "0 0 12345" + s.substr(line_end);
    std::stringstream bad(tampered);
    CHECK_THROWS(read_certificate(bad));
}

TEST_CASE("certify_bound on van der Pol") {
    auto spec = bounds::van_der_pol(Rational(1));
    bounds::BoundOptions o;
    o.degree = 6;
    auto out = certify_bound(spec, bounds::Program::DetGlobal, bounds::Direction::Upper, o);
    REQUIRE(out.certified);
    REQUIRE(out.optimum);
    double opt = to_double(*out.optimum);
    double u = out.result.bound();
    CHECK(u >= opt);
    CHECK(u <= opt * 1.02);
    CHECK(out.result.certified());
    for (const auto& c : out.result.certificates) CHECK(c.lambda0 - to_real(c.r) * static_cast<long>(c.dim()) >= 0);

    CertifyOptions low;
    low.start = Rational(4);
    auto relaxed = certify_bound(spec, bounds::Program::DetGlobal, bounds::Direction::Upper, o, low);
    REQUIRE(relaxed.steps.size() >= 2);
    CHECK_FALSE(relaxed.steps.front().feasible);
    REQUIRE(relaxed.certified);
    CHECK(relaxed.result.bound() >= opt);

    CertifyOptions coarse;
    coarse.digits = 2;
    coarse.max_steps = 8;
    auto failed = certify_bound(spec, bounds::Program::DetGlobal, bounds::Direction::Upper, o, coarse);
    CHECK_FALSE(failed.certified);
    CHECK(failed.message.find("rounding-dominated") != std::string::npos);

    CertifyOptions mid;
    mid.digits = 6;
    auto six = certify_bound(spec, bounds::Program::DetGlobal, bounds::Direction::Upper, o, mid);
    REQUIRE(six.certified);
    CHECK(six.result.bound() >= u - 1e-9);
}

TEST_CASE("storage_diagnostic") {
    bounds::ProblemSpec s;
    s.vars = xy;
    s.f = {P("y"), P("-x")};
    s.phi = P("3");
    bounds::BoundResult r;
    r.storage = RationalPolynomial(2);
    std::vector<std::vector<double>> states{{1, 0}, {0, 1}, {-0.5, 0.2}};
    CHECK(storage_diagnostic(s, r, states, 3.0) == 0.0);
    CHECK(storage_diagnostic(s, r, states) == 0.0);
    CHECK_THROWS_AS(storage_diagnostic(s, r, std::vector<std::vector<double>>{}), std::invalid_argument);

    // ẋ = 1 − x with φ = x has φ̄ = 1 and V = x gives V̇ = φ̄ − φ exactly.
    bounds::ProblemSpec one;
    one.vars = {"x"};
    one.f = {poly::parse("1 - x", one.vars)};
    one.phi = poly::parse("x", one.vars);
    bounds::BoundResult v;
    v.storage = poly::parse("x", one.vars);
    std::vector<std::vector<double>> traj;
    for (int k = 0; k <= 100; ++k) traj.push_back({1 + std::exp(-0.1 * k)});
    CHECK(storage_diagnostic(one, v, traj, 1.0) < 1e-12);
}

}
