#include "sosbounds/sdp/linalg.hpp"
#include "sosbounds/sdp/solver.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

using namespace sosbounds;
using namespace sosbounds::sdp;

namespace {

using QMatrix = std::vector<std::vector<Rational>>;

QMatrix qzeros(std::size_t n, std::size_t m) { return QMatrix(n, std::vector<Rational>(m, Rational(0))); }

QMatrix qmul(const QMatrix& a, const QMatrix& b) {
    QMatrix c = qzeros(a.size(), b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

QMatrix qtranspose(const QMatrix& a) {
    QMatrix t = qzeros(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

QMatrix qinverse(QMatrix a) {
    std::size_t n = a.size();
    QMatrix inv = qzeros(n, n);
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (a[p][c] == 0) ++p;
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational d = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            Rational f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

/// Value of a functional on a symmetric rational matrix per block.
Rational apply(const LinearFunctional& f, const std::vector<QMatrix>& x, const std::vector<Rational>& w) {
    Rational v(0);
    for (const auto& t : f.block_terms) v += t.coef * x[t.block][t.row][t.col];
    for (const auto& t : f.free_terms) v += t.coef * w[t.index];
    return v;
}

struct Synthetic {
    SdpProblem problem;
    Rational optimum;
};

/// Strictly complementary primal-dual pair X* = U D₁ Uᵀ, S* = U⁻ᵀ D₂ U⁻¹ with
/// D₁D₂ = 0, so the optimal value is known exactly.
Synthetic make_synthetic(std::mt19937_64& rng, bool with_free) {
    std::uniform_int_distribution<int> small(-3, 3), pos(1, 4), size(2, 5), nblocks(1, 3);
    Synthetic out;
    SdpProblem& p = out.problem;
    std::size_t k = nblocks(rng);
    std::vector<QMatrix> xs, ss;
    std::size_t entries = 0;
    for (std::size_t b = 0; b < k; ++b) {
        std::size_t n = size(rng);
        p.block_sizes.push_back(n);
        entries += n * (n + 1) / 2;
        QMatrix u = qzeros(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) u[i][j] = Rational(i == j ? 4 + pos(rng) : small(rng));
        QMatrix uinv = qinverse(u);
        std::size_t rank = 1 + static_cast<std::size_t>(rng() % (n - 1));
        QMatrix d1 = qzeros(n, n), d2 = qzeros(n, n);
        for (std::size_t i = 0; i < n; ++i) (i < rank ? d1 : d2)[i][i] = Rational(pos(rng));
        xs.push_back(qmul(qmul(u, d1), qtranspose(u)));
        ss.push_back(qmul(qmul(qtranspose(uinv), d2), uinv));
    }
    std::size_t nf = with_free ? 1 + rng() % 3 : 0;
    p.free_vars = nf;
    std::vector<Rational> wstar;
    for (std::size_t j = 0; j < nf; ++j) wstar.push_back(Rational(small(rng)));
    std::size_t m = std::max<std::size_t>(nf + 1, entries / 2 + rng() % (entries / 2 + 1));
    std::vector<Rational> ystar;
    for (std::size_t i = 0; i < m; ++i) {
        LinearFunctional f;
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t r = 0; r < p.block_sizes[b]; ++r)
                for (std::size_t c = 0; c <= r; ++c) {
                    int v = small(rng);
                    if (v != 0) f.block_terms.push_back({b, r, c, Rational(v)});
                }
        for (std::size_t j = 0; j < nf; ++j) f.free_terms.push_back({j, Rational(small(rng) + (i == j ? 5 : 0))});
        p.rhs.push_back(apply(f, xs, wstar));
        p.rows.push_back(std::move(f));
        ystar.push_back(Rational(small(rng), 2));
    }
    // C = A*(y*) + S*, c_w = Bᵀy*.
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> cterms;
    for (std::size_t b = 0; b < k; ++b)
        for (std::size_t r = 0; r < p.block_sizes[b]; ++r)
            for (std::size_t c = 0; c <= r; ++c) cterms[{b, r, c}] += (r == c ? 1 : 2) * ss[b][r][c];
    std::vector<Rational> cw(nf, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& t : p.rows[i].block_terms) cterms[{t.block, t.row, t.col}] += ystar[i] * t.coef;
        for (const auto& t : p.rows[i].free_terms) cw[t.index] += ystar[i] * t.coef;
    }
    for (const auto& [key, v] : cterms)
        if (v != 0) p.objective.block_terms.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    for (std::size_t j = 0; j < nf; ++j) p.objective.free_terms.push_back({j, cw[j]});
    out.optimum = apply(p.objective, xs, wstar);
    Rational dual(0);
    for (std::size_t i = 0; i < m; ++i) dual += ystar[i] * p.rhs[i];
    REQUIRE(dual == out.optimum);
    return out;
}

SdpProblem scaled_identity_problem() {
    // min t  s.t.  [[t,0],[0,t]] ⪰ 0
    SdpProblem p;
    p.block_sizes = {2};
    p.free_vars = 1;
    p.rows.push_back({{{0, 0, 0, Rational(1)}}, {{0, Rational(-1)}}});
    p.rows.push_back({{{0, 1, 1, Rational(1)}}, {{0, Rational(-1)}}});
    p.rows.push_back({{{0, 1, 0, Rational(1)}}, {}});
    p.rhs = {Rational(0), Rational(0), Rational(0)};
    p.objective.free_terms.push_back({0, Rational(1)});
    return p;
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("symmetric eigen and Jacobi agree on small matrices") {
    PrecisionGuard guard(128);
    RealMatrix a(2, 2);
    a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
    auto e = linalg::symmetric_eigen(a);
    CHECK(to_double(e.values[0]) == doctest::Approx(1.0));
    CHECK(to_double(e.values[1]) == doctest::Approx(3.0));
    CHECK(to_double(linalg::jacobi_eigenvalues(a).values[0]) == doctest::Approx(1.0));
    RealMatrix ones(2, 2);
    for (auto& v : ones.data()) v = 1;
    CHECK(abs(linalg::jacobi_eigenvalues(ones).values[0]) < Real(1e-35));
    auto id = RealMatrix::identity(5);
    CHECK(linalg::jacobi_eigenvalues(id).values[0] == 1);
}

TEST_CASE("Jacobi eigenvalues sum to the trace") {
    for (unsigned bits : {128u, 256u}) {
        PrecisionGuard guard(bits);
        std::mt19937_64 rng(bits);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int rep = 0; rep < 5; ++rep) {
            std::size_t n = 3 + rep * 4;
            RealMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = Real(u(rng)) / 3;
            auto res = linalg::jacobi_eigenvalues(a);
            Real tr(0), sum(0);
            for (std::size_t i = 0; i < n; ++i) tr += a(i, i);
            for (const auto& v : res.values) sum += v;
            Real bound(1);
            mpfr_mul_2si(bound.backend().data(), bound.backend().data(), -static_cast<long>(bits - 8), MPFR_RNDN);
            CHECK(abs(tr - sum) <= bound * n);
            auto ql = linalg::symmetric_eigen(a, false);
            for (std::size_t i = 0; i < n; ++i) CHECK(abs(ql.values[i] - res.values[i]) < Real(1e-30));
        }
    }
}

TEST_CASE("smallest PSD scaling") {
    SolverSettings s;
    auto sol = solve(scaled_identity_problem(), s);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(std::fabs(to_double(sol.primal_objective)) < 1e-10);
    CHECK(sol.primal_residual <= s.effective_feasibility_tol());
    CHECK(sol.dual_residual <= s.effective_feasibility_tol());
    CHECK(sol.gap <= s.effective_gap_tol());
}

TEST_CASE("refine on the trivial problem has no drift") {
    SolverSettings s;
    auto sol = solve(scaled_identity_problem(), s);
    SolverSettings hi = s;
    hi.mantissa_bits = 256;
    auto ref = refine(scaled_identity_problem(), sol, hi);
    REQUIRE(ref.status == Status::Optimal);
    CHECK(ref.drift < 1e-10);
    CHECK(ref.mantissa_bits == 256);
}

TEST_CASE("synthetic SDPs with known optima") {
    std::mt19937_64 rng(31337);
    SolverSettings s;
    s.mantissa_bits = 128;
    int solved = 0;
    for (int i = 0; i < 20; ++i) {
        Synthetic syn = make_synthetic(rng, i % 2 == 1);
        auto sol = solve(syn.problem, s);
        CAPTURE(i);
        CAPTURE(sol.message);
        REQUIRE(sol.status == Status::Optimal);
        Rational opt = syn.optimum;
        Rational err = abs(to_rational(sol.primal_objective) - opt);
        double rel = to_double(Rational(err / std::max<Rational>(Rational(1), Rational(abs(opt)))));
        CHECK(rel <= 1e-10);
        // Weak duality within the reported residuals.
        CHECK(to_double(sol.primal_objective - sol.dual_objective) >= -1e-10 * (1 + std::fabs(to_double(opt))));
        for (const auto& blk : sol.blocks) CHECK(linalg::jacobi_eigenvalues(blk).values.front() >= Real(-1e-12));
        ++solved;
    }
    CHECK(solved == 20);
}

TEST_CASE("row permutation leaves the optimum unchanged") {
    std::mt19937_64 rng(4);
    SolverSettings s;
    for (int i = 0; i < 3; ++i) {
        Synthetic syn = make_synthetic(rng, true);
        SdpProblem perm = syn.problem;
        std::vector<std::size_t> idx(perm.rows.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            perm.rows[r] = syn.problem.rows[idx[r]];
            perm.rhs[r] = syn.problem.rhs[idx[r]];
        }
        auto a = solve(syn.problem, s);
        auto b = solve(perm, s);
        REQUIRE(a.status == Status::Optimal);
        REQUIRE(b.status == Status::Optimal);
        CHECK(std::fabs(to_double(a.primal_objective - b.primal_objective)) < 1e-10);
    }
}

TEST_CASE("infeasible and unbounded problems") {
    SolverSettings s;
    SdpProblem infeasible;
    infeasible.block_sizes = {1};
    infeasible.rows.push_back({{{0, 0, 0, Rational(1)}}, {}});
    infeasible.rhs = {Rational(-1)};
    CHECK(solve(infeasible, s).status == Status::PrimalInfeasible);

    SdpProblem unbounded;  // min −t s.t. X = t, X ⪰ 0
    unbounded.block_sizes = {1};
    unbounded.free_vars = 1;
    unbounded.rows.push_back({{{0, 0, 0, Rational(1)}}, {{0, Rational(-1)}}});
    unbounded.rhs = {Rational(0)};
    unbounded.objective.free_terms.push_back({0, Rational(-1)});
    CHECK(solve(unbounded, s).status == Status::DualInfeasible);

    SdpProblem inconsistent = scaled_identity_problem();
    inconsistent.free_vars = 2;
    inconsistent.rows.push_back({{}, {{1, Rational(1)}}});
    inconsistent.rows.push_back({{}, {{1, Rational(2)}}});
    inconsistent.rhs.push_back(Rational(1));
    inconsistent.rhs.push_back(Rational(3));
    CHECK_THROWS_AS(solve(inconsistent, s), StructuralInfeasibility);

    SdpProblem dependent = scaled_identity_problem();
    dependent.free_vars = 2;
    dependent.rows.push_back({{}, {{1, Rational(1)}}});
    dependent.rows.push_back({{}, {{1, Rational(2)}}});
    dependent.rhs.push_back(Rational(1));
    dependent.rhs.push_back(Rational(2));
    auto sol = solve(dependent, s);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(to_double(sol.free_values[1]) == doctest::Approx(1.0));
}

TEST_CASE("problem and solution text round trip") {
    std::mt19937_64 rng(8);
    Synthetic syn = make_synthetic(rng, true);
    std::stringstream ss;
    write_problem(ss, syn.problem);
    SdpProblem back = read_problem(ss);
    std::stringstream a, b;
    write_problem(a, syn.problem);
    write_problem(b, back);
    CHECK(a.str() == b.str());

    auto sol = solve(syn.problem, SolverSettings{});
    std::stringstream st;
    write_solution(st, sol);
    SdpSolution rs = read_solution(st);
    CHECK(rs.status == sol.status);
    CHECK(rs.blocks.size() == sol.blocks.size());
    CHECK(to_double(rs.primal_objective) == doctest::Approx(to_double(sol.primal_objective)));
    CHECK(to_double(rs.blocks[0](0, 0)) == doctest::Approx(to_double(sol.blocks[0](0, 0))));
}

TEST_CASE("settings validation") {
    SolverSettings s;
    s.step_fraction = 1.0;
    CHECK_THROWS(s.validate());
    s = SolverSettings{};
    s.mantissa_bits = 32;
    CHECK_THROWS(s.validate());
    CHECK(default_mantissa_bits(12) == 256);
    CHECK(default_mantissa_bits(6) == 128);
}

}  // TEST_SUITE
