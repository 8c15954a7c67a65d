#include "sosbounds/certify/certificate.hpp"

#include "sosbounds/sdp/linalg.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sosbounds::certify {

Residual residual(const RationalPolynomial& body, const RationalMatrix& q, const std::vector<Monomial>& z) {
    if (q.size() != z.size()) throw std::invalid_argument("residual: Gram matrix and basis differ in size");
    for (const auto& row : q)
        if (row.size() != z.size()) throw std::invalid_argument("residual: Gram matrix is not square");
    for (const auto& m : z)
        if (m.dimension() != body.dimension())
            throw std::invalid_argument("residual: basis and body differ in dimension");
    Residual out{RationalPolynomial(body.dimension()), Rational(0)};
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.e.add_term(z[i] * z[i], q[i][i]);
        for (std::size_t j = 0; j < i; ++j) {
            if (q[i][j] != q[j][i]) throw std::invalid_argument("residual: Gram matrix is not symmetric");
            out.e.add_term(z[i] * z[j], Rational(2 * q[i][j]));
        }
    }
    out.e -= body;
    for (const auto& [m, c] : out.e.terms()) out.r = std::max<Rational>(out.r, Rational(abs(c)));
    return out;
}

EigenEstimate min_eigenvalue(const RealMatrix& q) {
    if (q.rows() != q.cols()) throw std::invalid_argument("min_eigenvalue: matrix is not square");
    if (q.rows() == 0) throw std::invalid_argument("min_eigenvalue: empty matrix");
    if (!linalg::is_symmetric(q, Real(0))) throw std::invalid_argument("min_eigenvalue: matrix is not symmetric");
    auto res = linalg::jacobi_eigenvalues(q);
    return {res.values.front(), to_double(res.off_norm), current_mantissa_bits()};
}

namespace {

Real floor_of(const RationalMatrix& q, unsigned bits) {
    Real norm(0);
    for (const auto& row : q)
        for (const auto& v : row) norm = std::max<Real>(norm, Real(abs(to_real(v))));
    Real unit(1);
    mpfr_mul_2si(unit.backend().data(), unit.backend().data(), -static_cast<long>(bits) + 8, MPFR_RNDN);
    return unit * norm * q.size();
}

}  // namespace

EigenEstimate min_eigenvalue(const RationalMatrix& q, unsigned start_bits, unsigned max_bits) {
    for (const auto& row : q)
        if (row.size() != q.size()) throw std::invalid_argument("min_eigenvalue: matrix is not square");
    EigenEstimate previous;
    bool have_previous = false;
    for (unsigned bits = start_bits;; bits *= 2) {
        PrecisionGuard guard(bits);
        RealMatrix m(q.size(), q.size());
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) m(i, j) = to_real(q[i][j]);
        EigenEstimate current = min_eigenvalue(m);
        if (have_previous) {
            Real change = abs(current.lambda0 - at_working_precision(previous.lambda0));
            Real floor = floor_of(q, previous.mantissa_bits);
            if (change <= abs(current.lambda0) / 100 || (abs(current.lambda0) <= floor && change <= floor))
                return current;
        }
        if (bits * 2 > max_bits) return current;
        previous = current;
        have_previous = true;
    }
}

bool is_psd_exact(const RationalMatrix& q) {
    RationalMatrix a = q;
    std::size_t n = a.size();
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        // Largest remaining diagonal pivot; a zero diagonal forces a zero row.
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && (p == n || a[i][i] > a[p][p])) p = i;
        if (a[p][p] < 0) return false;
        if (a[p][p] == 0) {
            for (std::size_t i = 0; i < n; ++i)
                if (!done[i])
                    for (std::size_t j = 0; j < n; ++j)
                        if (!done[j] && a[i][j] != 0) return false;
            return true;
        }
        done[p] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || a[i][p] == 0) continue;
            Rational f = a[i][p] / a[p][p];
            for (std::size_t j = 0; j < n; ++j)
                if (!done[j]) a[i][j] -= f * a[p][j];
        }
    }
    return true;
}

bool check(SosCertificate& cert) {
    if (cert.r == 0 && !cert.gram.empty()) {
        cert.certified = is_psd_exact(cert.gram);
        return cert.certified;
    }
    Real slack = cert.lambda0 - to_real(cert.r) * static_cast<long>(cert.dim());
    cert.certified = slack >= 0;
    return cert.certified;
}

SosCertificate make_certificate(std::string label, RationalPolynomial body, RationalMatrix gram,
                                std::vector<Monomial> basis, unsigned start_bits) {
    SosCertificate c;
    c.label = std::move(label);
    c.basis = std::move(basis);
    c.gram = std::move(gram);
    c.body = std::move(body);
    Residual res = residual(c.body, c.gram, c.basis);
    c.residual = std::move(res.e);
    c.r = res.r;
    if (!c.gram.empty()) {
        EigenEstimate eig = min_eigenvalue(c.gram, start_bits);
        c.lambda0 = eig.lambda0;
        c.off_norm = eig.off_norm;
        c.mantissa_bits = eig.mantissa_bits;
    }
    check(c);
    return c;
}

namespace {

void write_poly(std::ostream& os, const char* tag, const RationalPolynomial& p) {
    os << tag << ' ' << p.size() << '\n';
    for (const auto& [m, c] : p.terms()) {
        for (std::size_t i = 0; i < m.dimension(); ++i) os << m[i] << ' ';
        os << to_exact_decimal(c) << '\n';
    }
}

void expect(std::istream& is, const std::string& word) {
    std::string got;
    if (!(is >> got) || got != word)
        throw std::runtime_error("certificate file: expected '" + word + "', got '" + got + "'");
}

Monomial read_monomial(std::istream& is, std::size_t n) {
    std::vector<std::uint16_t> e(n);
    for (auto& v : e) {
        unsigned x = 0;
        if (!(is >> x)) throw std::runtime_error("certificate file: malformed exponent");
        v = static_cast<std::uint16_t>(x);
    }
    return Monomial(std::move(e));
}

Rational read_rational(std::istream& is) {
    std::string s;
    if (!(is >> s)) throw std::runtime_error("certificate file: missing value");
    return parse_rational(s);
}

RationalPolynomial read_poly(std::istream& is, const char* tag, std::size_t n) {
    expect(is, tag);
    std::size_t count = 0;
    is >> count;
    RationalPolynomial p(n);
    for (std::size_t t = 0; t < count; ++t) {
        Monomial m = read_monomial(is, n);
        p.add_term(m, read_rational(is));
    }
    return p;
}

}  // namespace

void write_certificate(std::ostream& os, const SosCertificate& cert) {
    std::size_t n = cert.body.dimension();
    os << "sos-certificate 1\n";
    os << "label " << (cert.label.empty() ? "-" : cert.label) << '\n';
    os << "dimension " << n << '\n';
    os << "basis " << cert.basis.size() << '\n';
    for (const auto& m : cert.basis) {
        for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << m[i];
        os << '\n';
    }
    os << "gram\n";
    for (std::size_t i = 0; i < cert.gram.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) os << (j ? " " : "") << to_exact_decimal(cert.gram[i][j]);
        os << '\n';
    }
    write_poly(os, "body", cert.body);
    write_poly(os, "residual", cert.residual);
    os << "r " << to_exact_decimal(cert.r) << '\n';
    os << "lambda0 " << (cert.gram.empty() ? std::string("0") : to_decimal(cert.lambda0)) << '\n';
    os << "bits " << cert.mantissa_bits << '\n';
    os << "certified " << (cert.certified ? 1 : 0) << '\n';
}

SosCertificate read_certificate(std::istream& is) {
    expect(is, "sos-certificate");
    expect(is, "1");
    expect(is, "label");
    std::string label;
    std::getline(is >> std::ws, label);
    if (label == "-") label.clear();
    expect(is, "dimension");
    std::size_t n = 0;
    is >> n;
    if (n == 0) throw std::runtime_error("certificate file: zero dimension");
    expect(is, "basis");
    std::size_t k = 0;
    is >> k;
    std::vector<Monomial> basis;
    for (std::size_t i = 0; i < k; ++i) basis.push_back(read_monomial(is, n));
    expect(is, "gram");
    RationalMatrix q(k, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) q[i][j] = q[j][i] = read_rational(is);
    RationalPolynomial body = read_poly(is, "body", n);
    RationalPolynomial stored = read_poly(is, "residual", n);
    if (!is) throw std::runtime_error("certificate file: truncated");
    SosCertificate c = make_certificate(std::move(label), std::move(body), std::move(q), std::move(basis));
    if (!(c.residual == stored)) throw std::runtime_error("certificate file: stored residual does not match zᵀQz − body");
    return c;
}

std::string report(const SosCertificate& cert) {
    std::ostringstream os;
    os << "certificate " << (cert.label.empty() ? "-" : cert.label) << '\n';
    os << "  dim Q    " << cert.dim() << '\n';
    os << "  lambda0  " << to_decimal(cert.lambda0, 12) << '\n';
    os << "  r        " << to_decimal(to_real(cert.r), 12) << '\n';
    os << "  slack    " << to_decimal(Real(cert.lambda0 - to_real(cert.r) * static_cast<long>(cert.dim())), 12)
       << '\n';
    os << "  bits     " << cert.mantissa_bits << '\n';
    os << "  verdict  " << (cert.certified ? "certified, not formally rigorous" : "not certified") << '\n';
    return os.str();
}

}  // namespace sosbounds::certify
