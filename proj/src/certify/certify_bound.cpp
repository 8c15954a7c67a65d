#include "sosbounds/certify/certify_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sosbounds::certify {

using bounds::BoundOptions;
using bounds::BoundResult;
using bounds::Direction;

namespace {

BoundResult run(const bounds::ProblemSpec& spec, bounds::Program program, Direction direction,
                const BoundOptions& options) {
    auto a = bounds::assemble(spec, program, direction, options);
    return bounds::solve(a, options);
}

double margin_of(const BoundResult& r) {
    if (r.certificates.empty()) return -std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : r.certificates) {
        PrecisionGuard guard(c.mantissa_bits);
        m = std::min(m, to_double(Real(c.lambda0 - to_real(c.r) * static_cast<long>(c.dim()))));
    }
    return m;
}

}  // namespace

CertifyOutcome certify_bound(const bounds::ProblemSpec& spec, bounds::Program program, Direction direction,
                             const BoundOptions& options, const CertifyOptions& copts) {
    if (copts.digits < 1) throw std::invalid_argument("certify_bound: digits must be positive");
    CertifyOutcome out;
    // Outward means looser: up for upper bounds, down for lower bounds.
    const int sign = direction == Direction::Upper ? 1 : -1;
    auto outward = [&](const Rational& v, const Rational& fraction) {
        Rational scale = std::max<Rational>(Rational(abs(v)), Rational(1));
        return round_to_decimal_places(Rational(v + sign * fraction * scale), 12);
    };
    auto tighter = [&](const Rational& a, const Rational& b) { return sign > 0 ? a < b : a > b; };

    BoundOptions base = options;
    base.fixed_bound.reset();
    base.certificates = false;
    BoundResult opt = run(spec, program, direction, base);
    std::optional<Rational> inner;
    if (opt.feasible()) {
        out.optimum = opt.value;
        inner = opt.value;
    }
    Rational current;
    if (copts.start) {
        current = *copts.start;
    } else if (out.optimum) {
        current = outward(*out.optimum, Rational(1, 10));
    } else {
        out.message = "the bound program has no optimum to start from: " + opt.message;
        return out;
    }

    BoundOptions fixed = options;
    fixed.certificates = true;
    fixed.round_digits = copts.digits;
    bool rounding_limited = false;
    auto evaluate = [&](const Rational& v, BoundResult& res) {
        fixed.fixed_bound = v;
        res = run(spec, program, direction, fixed);
        CertifyStep st;
        st.bound = v;
        st.feasible = res.feasible();
        st.certified = st.feasible && res.certified();
        st.margin = margin_of(res);
        if (st.feasible && !st.certified && to_double(res.min_lambda0()) > 0) rounding_limited = true;
        out.steps.push_back(st);
        return st.certified;
    };

    int steps = 0;
    std::optional<Rational> outer;
    BoundResult res;
    while (steps < copts.max_steps) {
        ++steps;
        if (evaluate(current, res)) {
            outer = current;
            out.result = res;
            break;
        }
        if (!inner || tighter(*inner, current)) inner = current;
        current = outward(current, Rational(5, 100));
    }
    if (!outer) {
        out.message = rounding_limited ? "rounding-dominated failure: dim(Q)*r exceeds lambda0 at every feasible "
                                         "point; keep more digits"
                                       : "no certified bound within the step budget";
        return out;
    }
    out.certified = true;

    const Rational golden(618034, 1000000);
    while (inner && steps < copts.max_steps) {
        Rational gap = abs(*outer - *inner);
        Rational scale = std::max<Rational>(Rational(abs(*outer)), Rational(1));
        if (to_double(Rational(gap / scale)) <= copts.rel_tol) break;
        ++steps;
        Rational probe = round_to_decimal_places(Rational(*outer + golden * (*inner - *outer)), 12);
        if (probe == *outer || probe == *inner) break;
        if (evaluate(probe, res)) {
            outer = probe;
            out.result = res;
        } else {
            inner = probe;
        }
    }
    out.message = "certified";
    return out;
}

double storage_diagnostic(const bounds::ProblemSpec& spec, const BoundResult& result,
                          std::span<const std::vector<double>> states, std::optional<double> phibar) {
    if (states.empty()) throw std::invalid_argument("storage_diagnostic: empty trajectory");
    std::size_t n = spec.dimension();
    poly::RationalPolynomial vdot = poly::lie_derivative(spec.f, result.storage);
    bool log_part = result.alpha && (result.program == bounds::Program::WeakNoise ||
                                     result.program == bounds::Program::VanishingNoise);
    poly::RationalPolynomial fz(n), zeta(n);
    double alpha = 0, eps = 0;
    if (log_part) {
        if (!spec.zeta) throw std::invalid_argument("storage_diagnostic: zeta missing");
        zeta = *spec.zeta;
        fz = poly::lie_derivative(spec.f, zeta);
        alpha = to_double(*result.alpha);
        if (result.program == bounds::Program::WeakNoise && spec.epsilon) eps = to_double(*spec.epsilon);
    }
    double mean = 0;
    if (!phibar) {
        for (const auto& x : states) mean += poly::evaluate(spec.phi, std::span<const double>(x));
        mean /= static_cast<double>(states.size());
    }
    double target = phibar.value_or(mean), worst = 0;
    for (const auto& x : states) {
        if (x.size() != n) throw std::invalid_argument("storage_diagnostic: state has the wrong dimension");
        std::span<const double> xs(x);
        double v = poly::evaluate(vdot, xs);
        if (log_part) v += alpha * poly::evaluate(fz, xs) / (eps + poly::evaluate(zeta, xs));
        worst = std::max(worst, std::fabs(v - (target - poly::evaluate(spec.phi, xs))));
    }
    return worst;
}

}  // namespace sosbounds::certify
