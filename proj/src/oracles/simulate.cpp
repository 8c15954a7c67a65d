#include "sosbounds/oracles/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace sosbounds::oracles {

CompiledPolynomial::CompiledPolynomial(const poly::RationalPolynomial& p) : dim_(p.dimension()) {
    for (const auto& [m, c] : p.terms()) {
        coef_.push_back(to_double(c));
        for (std::size_t i = 0; i < dim_; ++i) {
            powers_.push_back(m[i]);
            max_power_ = std::max(max_power_, m[i]);
        }
    }
    table_.assign(dim_ * (max_power_ + 1), 1.0);
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
    const std::size_t stride = max_power_ + 1;
    for (std::size_t i = 0; i < dim_; ++i) {
        double* row = &table_[i * stride];
        row[0] = 1.0;
        for (unsigned k = 1; k <= max_power_; ++k) row[k] = row[k - 1] * x[i];
    }
    double s = 0;
    const unsigned* pw = powers_.data();
    for (std::size_t t = 0; t < coef_.size(); ++t, pw += dim_) {
        double v = coef_[t];
        for (std::size_t i = 0; i < dim_; ++i) v *= table_[i * stride + pw[i]];
        s += v;
    }
    return s;
}

CompiledField::CompiledField(std::span<const poly::RationalPolynomial> f) {
    for (const auto& fi : f) f_.emplace_back(fi);
}

void CompiledField::operator()(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < f_.size(); ++i) out[i] = f_[i](x);
}

void rk4_step(const CompiledField& f, std::vector<double>& x, double h, std::vector<double>& work) {
    std::size_t n = x.size();
    work.resize(5 * n);
    double* k1 = work.data();
    double* k2 = k1 + n;
    double* k3 = k2 + n;
    double* k4 = k3 + n;
    double* y = k4 + n;
    f(x, {k1, n});
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    f({y, n}, {k2, n});
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    f({y, n}, {k3, n});
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
    f({y, n}, {k4, n});
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

namespace {

void guard(const std::vector<double>& x, double limit) {
    for (double v : x)
        if (!(std::fabs(v) <= limit)) throw OracleError("trajectory diverged: |x| exceeded " + std::to_string(limit));
}

struct Run {
    double average = 0;
    Trajectory tr;
};

Run run(const bounds::ProblemSpec& spec, std::vector<double> x, double h, const SimOptions& o, bool keep) {
    CompiledField f(spec.f);
    CompiledPolynomial phi(spec.phi);
    std::vector<double> work;
    auto n0 = static_cast<long long>(std::llround(o.t0 / h));
    auto n = static_cast<long long>(std::llround((o.t - o.t0) / h));
    for (long long k = 0; k < n0; ++k) {
        rk4_step(f, x, h, work);
        if ((k & 1023) == 0) guard(x, o.divergence);
    }
    Run r;
    long long stride = 1;
    if (keep) {
        r.tr.h = h;
        r.tr.t0 = o.t0;
        std::size_t cap = std::max<std::size_t>(o.max_samples, 2);
        stride = std::max<long long>(1, (n + static_cast<long long>(cap) - 1) / static_cast<long long>(cap - 1));
    }
    double sum = 0.5 * phi(x);
    if (keep) {
        r.tr.times.push_back(n0 * h);
        r.tr.states.push_back(x);
    }
    for (long long k = 1; k <= n; ++k) {
        rk4_step(f, x, h, work);
        if ((k & 1023) == 0) guard(x, o.divergence);
        double v = phi(x);
        sum += k == n ? 0.5 * v : v;
        if (keep && k % stride == 0) {
            r.tr.times.push_back((n0 + k) * h);
            r.tr.states.push_back(x);
        }
    }
    guard(x, o.divergence);
    r.average = n > 0 ? sum / static_cast<double>(n) : phi(x);
    return r;
}

}  // namespace

std::vector<double> integrate(const bounds::ProblemSpec& spec, std::vector<double> x0, double h, double t) {
    if (!(h > 0)) throw std::invalid_argument("integrate: h must be positive");
    if (x0.size() != spec.dimension()) throw std::invalid_argument("integrate: initial state has the wrong dimension");
    CompiledField f(spec.f);
    std::vector<double> work;
    auto n = static_cast<long long>(std::llround(t / h));
    for (long long k = 0; k < n; ++k) rk4_step(f, x0, h, work);
    return x0;
}

SimResult simulate_average(const bounds::ProblemSpec& spec, const std::vector<double>& x0, const SimOptions& o) {
    if (!(o.h > 0)) throw std::invalid_argument("simulate_average: h must be positive");
    if (!(o.t > o.t0) || o.t0 < 0) throw std::invalid_argument("simulate_average: need 0 <= t0 < t");
    if (x0.size() != spec.dimension())
        throw std::invalid_argument("simulate_average: initial state has the wrong dimension");
    auto start = std::chrono::steady_clock::now();
    SimResult res;
    Run full = run(spec, x0, o.h, o, true);
    res.average = full.average;
    res.trajectory = std::move(full.tr);
    res.extrapolated = res.average;
    if (o.richardson) {
        Run half = run(spec, x0, o.h / 2, o, false);
        res.average_half = half.average;
        res.richardson_change = std::fabs(half.average - full.average) / std::max(std::fabs(full.average), 1e-300);
        res.extrapolated = (16 * half.average - full.average) / 15;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::vector<std::string>& vars) {
    os << 't';
    for (const auto& v : vars) os << ',' << v;
    os << '\n';
    os.precision(17);
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        os << tr.times[k];
        for (double v : tr.states[k]) os << ',' << v;
        os << '\n';
    }
}

}  // namespace sosbounds::oracles
