#include "sosbounds/bounds/zeta.hpp"

#include "sosbounds/poly/parser.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace sosbounds::bounds {

using poly::RationalMatrix;
using poly::RationalPolynomial;

namespace {

RationalMatrix transpose(const RationalMatrix& a) {
    RationalMatrix t(a.size(), std::vector<Rational>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) t[j][i] = a[i][j];
    return t;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
    std::size_t n = a.size();
    RationalMatrix c(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

RationalMatrix lyapunov_sum(const RationalMatrix& j0, const RationalMatrix& z) {
    RationalMatrix a = multiply(transpose(j0), z), b = multiply(z, j0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) a[i][j] += b[i][j];
    return a;
}

void normalize(RationalMatrix& z) {
    Rational top(0);
    for (const auto& row : z)
        for (const auto& v : row) top = std::max<Rational>(top, Rational(abs(v)));
    if (top == 0) return;
    for (auto& row : z)
        for (auto& v : row) v /= top;
}

bool admissible(const RationalMatrix& j0, const RationalMatrix& z) {
    return is_positive_definite(z) && zeta_admissibility(j0, z) == Admissibility::Positive;
}

std::optional<RationalMatrix> from_eigenvectors(const Eigen::MatrixXd& j) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(j);
    if (es.info() != Eigen::Success) return std::nullopt;
    Eigen::MatrixXcd u = es.eigenvectors();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(u);
    if (!lu.isInvertible() || lu.rcond() < 1e-10) return std::nullopt;
    Eigen::MatrixXcd uinv = lu.inverse();
    Eigen::MatrixXd m = (uinv.adjoint() * uinv).real();
    m = (m + m.transpose()) / 2;
    m /= m.cwiseAbs().maxCoeff();
    std::size_t n = static_cast<std::size_t>(j.rows());
    RationalMatrix z(n, std::vector<Rational>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= r; ++c) z[r][c] = z[c][r] = rationalize(m(r, c), 1e-12, 1000000);
    normalize(z);
    return z;
}

/// Solves J₀ᵀZ + ZJ₀ = I over the rationals on the n(n+1)/2 unknowns of Z.
std::optional<RationalMatrix> from_lyapunov(const RationalMatrix& j0) {
    std::size_t n = j0.size();
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= r; ++c) unknowns.push_back({r, c});
    std::size_t m = unknowns.size();
    RationalMatrix a(m, std::vector<Rational>(m + 1, Rational(0)));
    // Row (p, q), p >= q: Σ_k J_kp Z_kq + Σ_k Z_pk J_kq = δ_pq.
    auto index = [&](std::size_t r, std::size_t c) {
        if (r < c) std::swap(r, c);
        return r * (r + 1) / 2 + c;
    };
    for (std::size_t row = 0; row < m; ++row) {
        auto [p, q] = unknowns[row];
        for (std::size_t k = 0; k < n; ++k) {
            a[row][index(k, q)] += j0[k][p];
            a[row][index(p, k)] += j0[k][q];
        }
        a[row][m] = p == q ? 1 : 0;
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        while (piv < m && a[piv][col] == 0) ++piv;
        if (piv == m) return std::nullopt;
        std::swap(a[piv], a[col]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
        }
    }
    RationalMatrix z(n, std::vector<Rational>(n));
    for (std::size_t k = 0; k < m; ++k) {
        auto [r, c] = unknowns[k];
        z[r][c] = z[c][r] = a[k][m] / a[k][k];
    }
    normalize(z);
    return z;
}

}  // namespace

Admissibility zeta_admissibility(const RationalMatrix& j0, const RationalMatrix& z) {
    RationalMatrix s = lyapunov_sum(j0, z);
    if (is_positive_definite(s)) return Admissibility::Positive;
    for (auto& row : s)
        for (auto& v : row) v = -v;
    if (is_positive_definite(s)) return Admissibility::Negative;
    return Admissibility::Indefinite;
}

std::string to_string(Admissibility a) {
    switch (a) {
    case Admissibility::Positive: return "positive";
    case Admissibility::Negative: return "negative";
    case Admissibility::Indefinite: return "indefinite";
    }
    return "unknown";
}

ZetaConstruction construct_zeta(std::span<const RationalPolynomial> f) {
    if (f.empty()) throw ZetaError("construct_zeta: empty vector field");
    std::size_t n = f.size();
    poly::Monomial origin(n);
    for (const auto& fi : f)
        if (fi.coefficient(origin) != 0) throw ZetaError("origin is not a fixed point: f(0) != 0");
    RationalMatrix j0 = poly::jacobian_at_origin(f);
    Eigen::MatrixXd j(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) j(r, c) = to_double(j0[r][c]);
    Eigen::VectorXcd lambda = j.eigenvalues();
    bool any_pos = false, any_nonpos = false, any_neg = false;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        double re = lambda(i).real();
        any_pos = any_pos || re > 1e-12;
        any_neg = any_neg || re < -1e-12;
        any_nonpos = any_nonpos || re <= 1e-12;
    }
    if (any_pos && any_neg) throw ZetaError("saddle not supported: J0 has eigenvalues of both signs");
    if (any_nonpos) throw ZetaError("origin is not a repeller: J0 has eigenvalues with non-positive real part");

    ZetaConstruction out;
    if (auto z = from_eigenvectors(j); z && admissible(j0, *z)) {
        out.z = *z;
        out.method = "eigenvectors";
    } else if (auto zl = from_lyapunov(j0); zl && admissible(j0, *zl)) {
        out.z = *zl;
        out.method = "lyapunov";
    } else {
        throw ZetaError("could not construct an admissible zeta");
    }
    out.zeta = poly::quadratic_form(out.z);
    return out;
}

std::vector<ZetaCandidate> table1_zetas(const Rational& mu) {
    std::vector<std::string> vars{"x", "y"};
    poly::ConstantMap k{{"mu", mu}};
    auto p = [&](const char* s) { return poly::parse(s, vars, k); };
    std::vector<ZetaCandidate> out;
    out.push_back({"zeta1", p("x^2 - x*y + y^2")});
    if (mu <= 2) {
        out.push_back({"zeta2", p("x^2 - mu*x*y + y^2")});
        out.push_back({"zeta3", p("x^2 - mu*x*y + y^2")});
    } else {
        out.push_back({"zeta2", p("mu*x^2 - 4*x*y + mu*y^2")});
        out.push_back({"zeta3", p("(mu^2 - 2)*x^2 - 2*mu*x*y + 2*y^2")});
    }
    return out;
}

}  // namespace sosbounds::bounds
