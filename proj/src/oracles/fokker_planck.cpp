#include "sosbounds/oracles/fokker_planck.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace sosbounds::oracles {

double DensityGrid::weight(std::size_t i, std::size_t j) const {
    double h = spacing();
    double wx = (i == 0 || i + 1 == n) ? h / 2 : h;
    double wy = (j == 0 || j + 1 == n) ? h / 2 : h;
    return wx * wy;
}

double DensityGrid::mass() const {
    double m = 0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m += weight(i, j) * at(i, j);
    return m;
}

double DensityGrid::minimum() const { return values.empty() ? 0 : *std::min_element(values.begin(), values.end()); }

double DensityGrid::expectation(const poly::RationalPolynomial& p) const {
    CompiledPolynomial cp(p);
    double s = 0, x[2];
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            x[0] = coordinate(i);
            x[1] = coordinate(j);
            s += weight(i, j) * at(i, j) * cp(x);
        }
    return s;
}

namespace {

/// w/(eʷ − 1), continuous at 0.
double bernoulli(double w) {
    if (std::fabs(w) < 1e-8) return 1 - w / 2;
    if (w > 700) return 0;
    return w / std::expm1(w);
}

/// Flux coefficients through one face: J = plus·ρ_right − minus·ρ_left for
/// J = c ∂ρ/∂s − f ρ.
void face(double f, double c, double h, double& plus, double& minus) {
    double b = -f;
    if (c <= 0) {
        plus = std::max(b, 0.0);
        minus = std::max(-b, 0.0);
        return;
    }
    double w = h * b / c;
    plus = c / h * bernoulli(-w);
    minus = c / h * bernoulli(w);
}

/// Tridiagonal operator along one grid line, stored as (lower, diag, upper)
/// rows of A with (Aρ)_k = dρ_k/dt.
struct LineOperator {
    std::vector<double> lo, di, up, pl, mi, vel;
    double diff = 0;

    void build(const std::vector<double>& plus, const std::vector<double>& minus, const std::vector<double>& f,
               double c, double h, std::size_t n) {
        pl = plus;
        mi = minus;
        vel = f;
        diff = c;
        lo.assign(n, 0);
        di.assign(n, 0);
        up.assign(n, 0);
        for (std::size_t k = 0; k < n; ++k) {
            double vol = (k == 0 || k + 1 == n) ? h / 2 : h;
            if (k + 1 < n) {
                up[k] += plus[k] / vol;
                di[k] -= minus[k] / vol;
            }
            if (k > 0) {
                di[k] -= plus[k - 1] / vol;
                lo[k] += minus[k - 1] / vol;
            }
        }
    }

    /// Limited high-resolution flux minus the Chang–Cooper flux, differenced
    /// into node rates: out_k += (corr_{k+½} − corr_{k−½})/V_k.
    void correction(const double* rho, std::size_t stride, std::size_t n, double h, double* out) const {
        double prev = 0;
        for (std::size_t k = 0; k < n; ++k) {
            double corr = 0;
            if (k + 1 < n) {
                double r0 = rho[k * stride], r1 = rho[(k + 1) * stride];
                double cc = pl[k] * r1 - mi[k] * r0;
                bool right = vel[k] > 0;  // transport towards k+1
                double up = right ? r0 : r1, down = right ? r1 : r0, face = up;
                bool has_far = right ? k >= 1 : k + 2 < n;
                if (has_far && down != up) {
                    double far = right ? rho[(k - 1) * stride] : rho[(k + 2) * stride];
                    double ratio = (up - far) / (down - up);
                    face += 0.5 * (ratio + std::fabs(ratio)) / (1 + std::fabs(ratio)) * (down - up);
                }
                double hr = diff * (r1 - r0) / h - vel[k] * face;
                corr = hr - cc;
            }
            double vol = (k == 0 || k + 1 == n) ? h / 2 : h;
            out[k] += (corr - prev) / vol;
            prev = corr;
        }
    }

    void apply(const double* rho, std::size_t stride, std::size_t n, double* out) const {
        for (std::size_t k = 0; k < n; ++k) {
            double v = di[k] * rho[k * stride];
            if (k > 0) v += lo[k] * rho[(k - 1) * stride];
            if (k + 1 < n) v += up[k] * rho[(k + 1) * stride];
            out[k] = v;
        }
    }

    /// Solves (I − dt·A) u = rhs in place (rhs strided).
    void solve(double dt, double* u, std::size_t stride, std::size_t n, std::vector<double>& c,
               std::vector<double>& d) const {
        c.resize(n);
        d.resize(n);
        double b0 = 1 - dt * di[0];
        c[0] = -dt * up[0] / b0;
        d[0] = u[0] / b0;
        for (std::size_t k = 1; k < n; ++k) {
            double a = -dt * lo[k];
            double b = 1 - dt * di[k] - a * c[k - 1];
            c[k] = k + 1 < n ? -dt * up[k] / b : 0;
            d[k] = (u[k * stride] - a * d[k - 1]) / b;
        }
        u[(n - 1) * stride] = d[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) u[k * stride] = d[k] - c[k] * u[(k + 1) * stride];
    }
};

}  // namespace

FpResult fokker_planck_expectation(const bounds::ProblemSpec& spec, const FpOptions& o) {
    auto start = std::chrono::steady_clock::now();
    spec.validate();
    if (spec.dimension() != 2) throw OracleError("the Fokker-Planck oracle supports two state variables only");
    if (!spec.sigma) throw OracleError("the Fokker-Planck oracle needs a noise matrix sigma");
    if (!spec.epsilon || *spec.epsilon <= 0) throw OracleError("the Fokker-Planck oracle needs eps > 0");
    auto d = spec.diffusion();
    if (!d.is_diagonal()) throw OracleError("the Fokker-Planck oracle supports diagonal diffusion only");
    if (o.n < 5) throw std::invalid_argument("fokker_planck_expectation: need at least 5 nodes per axis");
    if (!(o.half_width > 0) || !(o.dt > 0)) throw std::invalid_argument("fokker_planck_expectation: bad grid or step");

    const double eps = to_double(*spec.epsilon);
    const std::size_t n = o.n;
    FpResult res;
    DensityGrid& g = res.grid;
    g.half_width = o.half_width;
    g.n = n;
    g.epsilon = eps;
    const double h = g.spacing();
    const double cx = eps * to_double(d(0, 0)), cy = eps * to_double(d(1, 1));

    CompiledField field(spec.f);
    std::vector<LineOperator> ax(n), ay(n);
    std::vector<double> plus(n), minus(n), vel(n);
    double pt[2], fv[2];
    for (std::size_t j = 0; j < n; ++j) {  // rows: x varies
        for (std::size_t i = 0; i + 1 < n; ++i) {
            pt[0] = g.coordinate(i) + h / 2;
            pt[1] = g.coordinate(j);
            field(pt, fv);
            vel[i] = fv[0];
            face(fv[0], cx, h, plus[i], minus[i]);
        }
        ax[j].build(plus, minus, vel, cx, h, n);
    }
    for (std::size_t i = 0; i < n; ++i) {  // columns: y varies
        for (std::size_t j = 0; j + 1 < n; ++j) {
            pt[0] = g.coordinate(i);
            pt[1] = g.coordinate(j) + h / 2;
            field(pt, fv);
            vel[j] = fv[1];
            face(fv[1], cy, h, plus[j], minus[j]);
        }
        ay[i].build(plus, minus, vel, cy, h, n);
    }

    // Broad Gaussian start.
    g.values.assign(n * n, 0);
    double s2 = std::max(1.0, o.half_width * o.half_width / 16);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.coordinate(i), y = g.coordinate(j);
            g.at(i, j) = std::exp(-(x * x + y * y) / (2 * s2));
        }
    double m0 = g.mass();
    for (auto& v : g.values) v /= m0;

    std::vector<double> ayr(n * n), corr(n * n), next(n * n), line(n), c, dd;
    const double dt = o.dt;
    long step = 0;
    for (; step < o.max_steps; ++step) {
        // Douglas: (I − dt·Ax)ρ* = ρ + dt·(Ax + Ay)ρ − dt·Axρ, then
        // (I − dt·Ay)ρⁿ⁺¹ = ρ* − dt·Ayρ.
        for (std::size_t i = 0; i < n; ++i) {
            ay[i].apply(&g.values[i], n, n, line.data());
            for (std::size_t j = 0; j < n; ++j) ayr[i + n * j] = line[j];
        }
        std::fill(corr.begin(), corr.end(), 0.0);
        if (o.high_resolution) {
            for (std::size_t j = 0; j < n; ++j) ax[j].correction(&g.values[n * j], 1, n, h, &corr[n * j]);
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(line.begin(), line.end(), 0.0);
                ay[i].correction(&g.values[i], n, n, h, line.data());
                for (std::size_t j = 0; j < n; ++j) corr[i + n * j] += line[j];
            }
        }
        for (std::size_t k = 0; k < n * n; ++k) next[k] = g.values[k] + dt * (ayr[k] + corr[k]);
        for (std::size_t j = 0; j < n; ++j) ax[j].solve(dt, &next[n * j], 1, n, c, dd);
        for (std::size_t k = 0; k < n * n; ++k) next[k] -= dt * ayr[k];
        for (std::size_t i = 0; i < n; ++i) ay[i].solve(dt, &next[i], n, n, c, dd);
        double change = 0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) change += g.weight(i, j) * std::fabs(next[i + n * j] - g.at(i, j));
        g.values.swap(next);
        res.change_rate = change / dt;
        if (!std::isfinite(change)) throw OracleError("Fokker-Planck iteration produced non-finite values");
        if (change < o.tol * dt) {
            ++step;
            break;
        }
    }
    res.steps = step;
    if (step >= o.max_steps && res.change_rate >= o.tol)
        throw OracleError("Fokker-Planck iteration did not reach steady state within the step budget");

    // The explicit correction can leave round-off negatives; they are clipped
    // and their mass reported.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (g.at(i, j) < 0) {
                res.clipped_mass -= g.weight(i, j) * g.at(i, j);
                g.at(i, j) = 0;
            }
    double m = g.mass();
    for (auto& v : g.values) v /= m;
    res.clipped_mass /= m;
    double ring = 0;
    for (std::size_t k = 0; k < n; ++k) {
        ring += g.weight(k, 0) * g.at(k, 0) + g.weight(k, n - 1) * g.at(k, n - 1);
        if (k > 0 && k + 1 < n) ring += g.weight(0, k) * g.at(0, k) + g.weight(n - 1, k) * g.at(n - 1, k);
    }
    res.boundary_mass = ring;
    if (ring > o.boundary_threshold) {
        std::ostringstream os;
        os << "boundary mass " << ring << " exceeds " << o.boundary_threshold << "; enlarge domain";
        throw OracleError(os.str());
    }
    res.expectation = g.expectation(spec.phi);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

void write_density_csv(std::ostream& os, const DensityGrid& g) {
    os << "x,y,rho\n";
    os.precision(17);
    for (std::size_t j = 0; j < g.n; ++j)
        for (std::size_t i = 0; i < g.n; ++i) os << g.coordinate(i) << ',' << g.coordinate(j) << ',' << g.at(i, j) << '\n';
}

void write_density_binary(std::ostream& os, const DensityGrid& g) {
    os << "sosbounds-density 1\n";
    os << "dims " << g.n << ' ' << g.n << '\n';
    os.precision(17);
    os << "domain " << -g.half_width << ' ' << g.half_width << ' ' << -g.half_width << ' ' << g.half_width << '\n';
    os << "eps " << g.epsilon << '\n';
    for (double v : g.values) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
        os.write(bytes, 8);
    }
}

DensityGrid read_density_binary(std::istream& is) {
    std::string line, tag;
    DensityGrid g;
    auto fail = [](const std::string& what) { return OracleError("density file: " + what); };
    if (!std::getline(is, line) || line != "sosbounds-density 1") throw fail("bad header");
    std::size_t nx = 0, ny = 0;
    if (!std::getline(is, line)) throw fail("missing dims");
    std::istringstream(line) >> tag >> nx >> ny;
    if (tag != "dims" || nx != ny || nx < 2) throw fail("bad dims");
    double lo = 0, hi = 0;
    if (!std::getline(is, line)) throw fail("missing domain");
    std::istringstream(line) >> tag >> lo >> hi;
    if (tag != "domain" || !(hi > 0)) throw fail("bad domain");
    if (!std::getline(is, line)) throw fail("missing eps");
    std::istringstream(line) >> tag >> g.epsilon;
    if (tag != "eps") throw fail("bad eps line");
    g.n = nx;
    g.half_width = hi;
    g.values.resize(nx * ny);
    for (double& v : g.values) {
        unsigned char bytes[8];
        if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw fail("truncated data");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        v = std::bit_cast<double>(bits);
    }
    return g;
}

}  // namespace sosbounds::oracles
