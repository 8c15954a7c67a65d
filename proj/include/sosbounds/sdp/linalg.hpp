#pragma once

#include "sosbounds/sdp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sosbounds::linalg {

namespace detail {

inline double eps_of(const double&) { return std::ldexp(1.0, -52); }
inline Real eps_of(const Real& x) {
    Real e(1);
    mpfr_mul_2si(e.backend().data(), e.backend().data(), 1 - static_cast<long>(mpfr_get_prec(x.backend().data())),
                 MPFR_RNDN);
    return e;
}
inline double hyp(double a, double b) { return std::hypot(a, b); }
inline Real hyp(const Real& a, const Real& b) { return sqrt(a * a + b * b); }

}  // namespace detail

/// In-place Cholesky: on success the lower triangle holds L with A = LLᵀ and
/// the strict upper triangle is zeroed.
template <class T>
bool cholesky(DenseMatrix<T>& a) {
    using std::sqrt;
    std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        T d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0)) return false;
        d = sqrt(d);
        a(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            T s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / d;
        }
        for (std::size_t i = 0; i < j; ++i) a(i, j) = T(0);
    }
    return true;
}

/// Solves L x = b in place.
template <class T>
void forward_solve(const DenseMatrix<T>& l, std::vector<T>& b) {
    for (std::size_t i = 0; i < l.rows(); ++i) {
        T s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
}

/// Solves Lᵀ x = b in place.
template <class T>
void backward_solve(const DenseMatrix<T>& l, std::vector<T>& b) {
    for (std::size_t i = l.rows(); i-- > 0;) {
        T s = b[i];
        for (std::size_t k = i + 1; k < l.rows(); ++k) s -= l(k, i) * b[k];
        b[i] = s / l(i, i);
    }
}

/// Inverse of a lower-triangular matrix.
template <class T>
DenseMatrix<T> lower_inverse(const DenseMatrix<T>& l) {
    std::size_t n = l.rows();
    DenseMatrix<T> inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        inv(j, j) = T(1) / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            T s(0);
            for (std::size_t k = j; k < i; ++k) s += l(i, k) * inv(k, j);
            inv(i, j) = -s / l(i, i);
        }
    }
    return inv;
}

template <class T>
DenseMatrix<T> multiply(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    DenseMatrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <class T>
struct SymmetricEigen {
    std::vector<T> values;    // ascending
    DenseMatrix<T> vectors;   // column i belongs to values[i]
};

/// Householder tridiagonalization followed by implicit QL.
template <class T>
SymmetricEigen<T> symmetric_eigen(const DenseMatrix<T>& a, bool want_vectors = true) {
    using std::abs;
    using std::sqrt;
    std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");
    SymmetricEigen<T> out;
    if (n == 0) return out;
    DenseMatrix<T> v = a;
    std::vector<T> d(n), e(n, T(0));
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        T scale(0), h(0);
        for (std::size_t k = 0; k < i; ++k) scale += abs(d[k]);
        if (scale == 0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = T(0);
                v(j, i) = T(0);
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            T f = d[i - 1];
            T g = sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = T(0);
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = T(0);
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            T hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = T(0);
            }
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = T(1);
        T h = d[i + 1];
        if (h != 0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                T g(0);
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = T(0);
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = T(0);
    }
    v(n - 1, n - 1) = T(1);
    e[0] = T(0);

    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = T(0);
    T f(0), tst1(0);
    const T eps = detail::eps_of(d[0]);
    for (std::size_t l = 0; l < n; ++l) {
        T cand = abs(d[l]) + abs(e[l]);
        if (cand > tst1) tst1 = cand;
        std::size_t m = l;
        while (m < n) {
            if (abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 200) throw std::runtime_error("symmetric_eigen: no convergence");
                T g = d[l];
                T p = (d[l + 1] - g) / (2 * e[l]);
                T r = detail::hyp(p, T(1));
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                T dl1 = d[l + 1];
                T h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                T c(1), c2(1), c3(1);
                T el1 = e[l + 1];
                T s(0), s2(0);
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = detail::hyp(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if (want_vectors) {
                        for (std::size_t k = 0; k < n; ++k) {
                            h = v(k, i + 1);
                            v(k, i + 1) = s * v(k, i) + c * h;
                            v(k, i) = c * v(k, i) - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = T(0);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    out.values.reserve(n);
    for (std::size_t i : order) out.values.push_back(d[i]);
    if (want_vectors) {
        out.vectors = DenseMatrix<T>(n, n);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

struct JacobiResult {
    std::vector<Real> values;  // ascending
    /// Frobenius norm of the off-diagonal part at termination.
    Real off_norm;
    int sweeps = 0;
};

/// Cyclic Jacobi eigenvalues in the current working precision.
JacobiResult jacobi_eigenvalues(const RealMatrix& a, int max_sweeps = 100);

/// Largest step α ≤ cap keeping L(I)Lᵀ + α·D PSD, where L is the Cholesky factor
/// of the current point; returns cap when no eigenvalue is negative.
Real max_step(const RealMatrix& chol_factor, const RealMatrix& direction, const Real& cap);

bool is_symmetric(const RealMatrix& a, const Real& tol);

}  // namespace sosbounds::linalg
