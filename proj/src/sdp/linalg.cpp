#include "sosbounds/sdp/linalg.hpp"

namespace sosbounds::linalg {

JacobiResult jacobi_eigenvalues(const RealMatrix& input, int max_sweeps) {
    std::size_t n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("jacobi: matrix not square");
    RealMatrix a = input;
    JacobiResult out;
    Real scale(0);
    for (const Real& x : a.data()) scale += x * x;
    scale = sqrt(scale);
    Real eps = detail::eps_of(scale);
    auto off_norm = [&] {
        Real s(0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return Real(sqrt(s));
    };
    Real theta, t, c, s, tau, g, h, apq;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Real off = off_norm();
        out.sweeps = sweep;
        if (off <= eps * scale || off == 0) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                apq = a(p, q);
                if (apq == 0) continue;
                theta = (a(q, q) - a(p, p)) / (2 * apq);
                t = 1 / (abs(theta) + sqrt(theta * theta + 1));
                if (theta < 0) t = -t;
                c = 1 / sqrt(t * t + 1);
                s = t * c;
                tau = s / (1 + c);
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0;
                a(q, p) = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    g = a(k, p);
                    h = a(k, q);
                    a(k, p) = g - s * (h + g * tau);
                    a(k, q) = h + s * (g - h * tau);
                    a(p, k) = a(k, p);
                    a(q, k) = a(k, q);
                }
            }
    }
    out.off_norm = off_norm();
    for (std::size_t i = 0; i < n; ++i) out.values.push_back(a(i, i));
    std::sort(out.values.begin(), out.values.end());
    return out;
}

Real max_step(const RealMatrix& l, const RealMatrix& d, const Real& cap) {
    std::size_t n = l.rows();
    // Y = L⁻¹ D, then Z = L⁻¹ Yᵀ = L⁻¹ D L⁻ᵀ.
    RealMatrix y(n, n);
    std::vector<Real> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = d(i, j);
        forward_solve(l, col);
        for (std::size_t i = 0; i < n; ++i) y(j, i) = col[i];
    }
    RealMatrix z(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = y(i, j);
        forward_solve(l, col);
        for (std::size_t i = 0; i < n; ++i) z(i, j) = col[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            Real avg = (z(i, j) + z(j, i)) / 2;
            z(i, j) = avg;
            z(j, i) = avg;
        }
    auto eig = symmetric_eigen(z, false);
    const Real& lmin = eig.values.front();
    if (lmin >= 0) return cap;
    Real step = -1 / lmin;
    return step < cap ? step : cap;
}

bool is_symmetric(const RealMatrix& a, const Real& tol) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (abs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

}  // namespace sosbounds::linalg
