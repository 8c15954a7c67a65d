#include "random_poly.hpp"

#include "sosbounds/poly/parser.hpp"
#include "sosbounds/sdp/solver.hpp"
#include "sosbounds/sosc/compiler.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace sosbounds;
using namespace sosbounds::sosc;
using poly::Monomial;
using poly::RationalPolynomial;

namespace {

const std::vector<std::string> xy{"x", "y"};

RationalPolynomial P(const std::string& s) { return poly::parse(s, xy); }

std::string problem_text(const sdp::SdpProblem& p) {
    std::ostringstream os;
    sdp::write_problem(os, p);
    return os.str();
}

sdp::SdpSolution solve_program(const CompiledProgram& prog) {
    sdp::SolverSettings s;
    return sdp::solve(prog.problem, s);
}

/// Sum of 1–3 squares of random quadratics, so a Gram matrix always exists.
RationalPolynomial random_sos(std::mt19937_64& rng) {
    RationalPolynomial body(2);
    int k = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) {
        RationalPolynomial q = testutil::random_polynomial(rng, 2, 2, 4);
        body += q * q;
    }
    return body;
}

/// Evaluates the compiled equality rows at X = Q and the given decision values.
bool rows_hold(const CompiledProgram& prog, const std::vector<std::vector<std::vector<Rational>>>& blocks,
               const std::vector<Rational>& w) {
    for (std::size_t i = 0; i < prog.problem.rows.size(); ++i) {
        Rational v(0);
        for (const auto& t : prog.problem.rows[i].block_terms) v += t.coef * blocks[t.block][t.row][t.col];
        for (const auto& t : prog.problem.rows[i].free_terms) v += t.coef * w[t.index];
        if (v != prog.problem.rhs[i]) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("sosc") {

TEST_CASE("storage ansatz sizes") {
    for (auto [d, count] : {std::pair{1u, 2u}, {2u, 5u}, {12u, 90u}}) {
        VarRegistry vars;
        auto v = make_storage_ansatz(vars, 2, d, "v");
        CHECK(vars.size() == count);
        CHECK(v.size() == count);
        CHECK(v.coefficient(Monomial(2)).is_zero());
    }
    VarRegistry vars;
    auto p = make_polynomial_ansatz(vars, 2, 2, "p", VarKind::Multiplier);
    CHECK(vars.size() == 6);
    CHECK(vars[0].kind == VarKind::Multiplier);
}

TEST_CASE("gram basis examples") {
    auto basis = gram_basis_for(lift(P("x^2 + 2*x*y + y^2"))).z;
    std::set<Monomial> got(basis.begin(), basis.end());
    CHECK(got == std::set<Monomial>{Monomial::unit(2, 0), Monomial::unit(2, 1)});
    auto one = gram_basis_for(lift(P("1"))).z;
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Monomial(2));
    CHECK(gram_basis_for(lift(P("1 + x + y + x^2 + x*y + y^2 + x^3 + x^2*y + x*y^2 + y^3 + x^4 + x^3*y + x^2*y^2 + x*y^3 + y^4")), false)
              .z.size() == 6);
    CHECK_THROWS_AS(gram_basis_for(lift(P("x^3 + y"))), CompileError);
}

TEST_CASE("perfect square compiles to one block with three equalities") {
    VarRegistry vars;
    auto c = make_sos_constraint(lift(P("x^2 + 2*x*y + y^2")), "square");
    auto prog = compile({c}, {}, vars, Objective::feasibility());
    REQUIRE(prog.problem.block_sizes == std::vector<std::size_t>{2});
    CHECK(prog.problem.rows.size() == 3);
    CHECK(solve_program(prog).status == sdp::Status::Optimal);
}

TEST_CASE("negative leading term is infeasible") {
    VarRegistry vars;
    auto u = vars.create("U", VarKind::BoundU);
    auto body = variable_constant(2, u) - lift(P("x^2"));
    auto prog = compile({make_sos_constraint(body, "ub")}, {}, vars, Objective::minimize(u));
    CHECK(solve_program(prog).status == sdp::Status::PrimalInfeasible);
}

TEST_CASE("Motzkin polynomial is not a sum of squares") {
    VarRegistry vars;
    auto body = lift(P("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1"));
    for (bool prune : {true, false}) {
        auto prog = compile({make_sos_constraint(body, "motzkin", prune)}, {}, vars, Objective::feasibility());
        CHECK(solve_program(prog).status == sdp::Status::PrimalInfeasible);
    }
}

TEST_CASE("minimum of x^2 + y^2") {
    VarRegistry vars;
    auto l = vars.create("L", VarKind::BoundL);
    auto body = lift(P("x^2 + y^2")) - variable_constant(2, l);
    auto prog = compile({make_sos_constraint(body, "lb")}, {}, vars, Objective::maximize(l));
    auto sol = solve_program(prog);
    REQUIRE(sol.status == sdp::Status::Optimal);
    CHECK(std::fabs(to_double(sol.objective())) < 1e-10);
    CHECK(std::fabs(to_double(decision_values(sol, prog.num_decision_vars)[l])) < 1e-10);
}

TEST_CASE("S-procedure hand example") {
    VarRegistry vars;
    auto l = vars.create("L", VarKind::BoundL);
    auto body = lift(P("x^2 + y^2")) - variable_constant(2, l);
    auto sp = s_procedure(vars, body, P("x^2 + y^2 - 1"), 0);
    REQUIRE(vars.size() == 2);
    std::size_t c = 1;
    auto expected = lift(P("x^2 + y^2")) - variable_constant(2, l) - P("x^2 + y^2 - 1") * variable_constant(2, c);
    CHECK(sp.body == expected);
    auto prog = compile({make_sos_constraint(sp.body, "lb"), sp.multiplier_constraint}, {}, vars, Objective::maximize(l));
    auto sol = solve_program(prog);
    REQUIRE(sol.status == sdp::Status::Optimal);
    CHECK(to_double(sol.objective()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(to_double(decision_values(sol, vars.size())[c]) == doctest::Approx(1.0).epsilon(1e-8));

    VarRegistry v2;
    auto sp0 = s_procedure(v2, lift(P("x^2")), RationalPolynomial(2), 2);
    CHECK(sp0.body == lift(P("x^2")));
}

TEST_CASE("default multiplier degree") {
    auto body = lift(P("x^12 + y^12"));
    CHECK(default_multiplier_degree(body, P("x^2 + y^2 - 1")) == 10);
    CHECK(default_multiplier_degree(lift(P("x^6")), P("x^3 - 1")) == 2);
    CHECK(default_multiplier_degree(lift(P("x^2")), P("x^4")) == 0);
    CHECK(strict_multiplier_degree(lift(P("x^14 + y^14")), P("x^2 + y^2 - 1")) == 10);
    CHECK(strict_multiplier_degree(body, P("x^2 + y^2 - 1")) == 8);
    CHECK(strict_multiplier_degree(lift(P("x^2")), P("x^4")) == 0);
}

TEST_CASE("PSD side constraint") {
    VarRegistry vars;
    auto a = vars.create("a", VarKind::Alpha);
    PsdConstraint z;
    Rational delta(1, 1000000);
    z.matrix = {{AffineExpr::variable(a) - AffineExpr(delta), AffineExpr(0)},
                {AffineExpr(1), AffineExpr::variable(a) - AffineExpr(delta)}};
    z.label = "Z - delta I";
    auto prog = compile({}, {z}, vars, Objective::minimize(a));
    REQUIRE(prog.psd_blocks.size() == 1);
    auto sol = solve_program(prog);
    REQUIRE(sol.status == sdp::Status::Optimal);
    CHECK(to_double(sol.objective()) == doctest::Approx(1.0 + 1e-6).epsilon(1e-9));
}

TEST_CASE("compile errors") {
    VarRegistry vars;
    auto c = make_sos_constraint(lift(P("x^2 + y^2")), "c");
    c.basis.z = {Monomial::unit(2, 0)};
    CHECK_THROWS_WITH_AS(compile({c}, {}, vars, Objective::feasibility()), doctest::Contains("uncoverable monomial"),
                         CompileError);
    CHECK_THROWS_WITH_AS(compile({make_sos_constraint(lift(P("x^2")), "c")}, {}, vars, Objective::maximize(7)),
                         doctest::Contains("empty objective"), CompileError);
}

TEST_CASE("Gram round trip and equality count on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> small(-3, 3);
    for (int rep = 0; rep < 40; ++rep) {
        // Q = M Mᵀ over a random basis, body = zᵀQz.
        std::vector<Monomial> z = poly::monomials_up_to(2, 1 + rep % 3);
        std::size_t k = z.size(), r = 1 + rng() % k;
        std::vector<std::vector<Rational>> m(k, std::vector<Rational>(r));
        for (auto& row : m)
            for (auto& v : row) v = Rational(small(rng));
        std::vector<std::vector<Rational>> q(k, std::vector<Rational>(k, Rational(0)));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t t = 0; t < r; ++t) q[i][j] += m[i][t] * m[j][t];
        RationalPolynomial body(2);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) body.add_term(z[i] * z[j], q[i][j]);
        if (body.is_zero()) continue;
        SosConstraint c{lift(body), GramBasis{z}, "rt"};
        VarRegistry vars;
        auto prog = compile({c}, {}, vars, Objective::feasibility());
        CHECK(rows_hold(prog, {q}, {}));
        std::set<Monomial> closure;
        for (const auto& [mono, _] : body.terms()) closure.insert(mono);
        for (const auto& a : z)
            for (const auto& b : z) closure.insert(a * b);
        CHECK(prog.problem.rows.size() == closure.size());
        CHECK(problem_text(prog.problem) == problem_text(compile({c}, {}, vars, Objective::feasibility()).problem));
    }
}

TEST_CASE("fifty constructed squares are feasible") {
    std::mt19937_64 rng(50);
    int feasible = 0;
    for (int i = 0; i < 50; ++i) {
        RationalPolynomial body = random_sos(rng);
        if (body.is_zero()) body = P("1");
        VarRegistry vars;
        auto prog = compile({make_sos_constraint(lift(body), "sq")}, {}, vars, Objective::feasibility());
        auto sol = solve_program(prog);
        CAPTURE(poly::to_string(body, xy));
        CHECK(sol.status == sdp::Status::Optimal);
        feasible += sol.status == sdp::Status::Optimal;
    }
    CHECK(feasible == 50);
}

TEST_CASE("Newton pruning preserves feasibility") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 50; ++i) {
        RationalPolynomial body = random_sos(rng);
        if (body.is_zero()) body = P("1");
        if (i % 2 == 1) {
            // Subtract a multiple of an even power large enough to go negative at some point.
            Monomial mono = Monomial::unit(2, rng() % 2);
            body -= RationalPolynomial::monomial(mono * mono, Rational(1 + rng() % 50)) * P("1 + x^2 + y^2");
            body += P("x^2*y^2").scaled(Rational(static_cast<int>(rng() % 3)));
        }
        std::string text = poly::to_string(body, xy);
        CAPTURE(text);
        sdp::Status statuses[2];
        for (int prune = 0; prune < 2; ++prune) {
            VarRegistry vars;
            try {
                auto prog =
                    compile({make_sos_constraint(lift(body), "c", prune == 1)}, {}, vars, Objective::feasibility());
                statuses[prune] = solve_program(prog).status;
            } catch (const sdp::StructuralInfeasibility&) {
                statuses[prune] = sdp::Status::PrimalInfeasible;
            } catch (const CompileError&) {
                statuses[prune] = sdp::Status::PrimalInfeasible;
            }
        }
        CHECK(statuses[0] == statuses[1]);
        if (i % 2 == 0) CHECK(statuses[1] == sdp::Status::Optimal);
    }
}

TEST_CASE("substitution and decision values") {
    VarRegistry vars;
    auto v = make_storage_ansatz(vars, 2, 2, "v");
    std::vector<Rational> vals(vars.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = Rational(static_cast<int>(i) + 1);
    auto p = substitute(v, std::span<const Rational>(vals));
    CHECK(p.size() == 5);
    CHECK(constant_part(v).is_zero());
    CHECK(variable_part(v, 0).size() == 1);
}

}  // TEST_SUITE
