#include "sosbounds/bounds/bounds.hpp"

#include "sosbounds/sdp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sosbounds::bounds {

using poly::RationalMatrix;
using poly::RationalPolynomial;
using sosc::AffinePolynomial;

std::string to_string(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }

std::string to_string(Program p) {
    switch (p) {
    case Program::DetGlobal: return "det-global";
    case Program::DetLocal: return "det-local";
    case Program::Stoch: return "stoch";
    case Program::WeakNoise: return "weak-noise";
    case Program::VanishingNoise: return "vanishing-noise";
    }
    return "unknown";
}

unsigned BoundOptions::effective_mantissa_bits() const {
    return mantissa_bits ? mantissa_bits : sdp::default_mantissa_bits(static_cast<int>(degree));
}

Rational BoundResult::max_residual() const {
    Rational r(0);
    for (const auto& c : certificates) r = std::max(r, c.r);
    return r;
}

Real BoundResult::min_lambda0() const {
    if (certificates.empty()) return Real(0);
    Real m = certificates.front().lambda0;
    for (const auto& c : certificates) m = std::min<Real>(m, c.lambda0);
    return m;
}

bool BoundResult::certified() const {
    if (certificates.empty()) return false;
    for (const auto& c : certificates)
        if (!c.certified) return false;
    return true;
}

namespace {

const char* kBoundaryCaveat =
    "assumes the boundary integral vanishes (storage function grows slowly and the density decays at infinity)";
const char* kStochasticStabilityCaveat =
    "bounds the vanishing-noise limit of the expectation; equals the attractor average only under stochastic "
    "stability";
const char* kLocalCaveat = "valid for trajectories that permanently enter {g >= 0}";

AffinePolynomial lift_lie(const ProblemSpec& spec, const AffinePolynomial& v) {
    return poly::lie_derivative(spec.f, v);
}

/// Rough emptiness test for {g ≥ 0}: g must be non-negative somewhere on a
/// deterministic point cloud.
void check_domain(const RationalPolynomial& g) {
    std::size_t n = g.dimension();
    std::vector<double> x(n);
    const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (double scale : {0.0, 0.1, 1.0, 10.0, 100.0}) {
        for (int k = 1; k <= 256; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                double h = 0, fr = 1.0 / primes[i % 12];
                for (int m = k; m > 0; m /= primes[i % 12], fr /= primes[i % 12]) h += fr * (m % primes[i % 12]);
                x[i] = scale * (2 * h - 1);
            }
            if (poly::evaluate(g, std::span<const double>(x)) >= 0) return;
        }
    }
    throw SpecError("domain", "{g >= 0} appears to be empty");
}

}  // namespace

LogAnsatzTerms log_ansatz_terms(const ProblemSpec& spec, const RationalPolynomial& zeta, const AffinePolynomial& alpha,
                                const AffinePolynomial& p, const AffinePolynomial& bound) {
    auto d = spec.diffusion();
    std::size_t n = spec.dimension();
    RationalPolynomial fz = poly::lie_derivative(spec.f, zeta);
    RationalPolynomial divz = poly::diffusion_term(d, zeta);
    auto grad = poly::gradient(zeta);
    RationalPolynomial gdg(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (d(i, j) != 0) gdg += (grad[i] * grad[j]).scaled(d(i, j));
    AffinePolynomial big_f = lift_lie(spec, p) + sosc::lift(spec.phi) - bound;
    AffinePolynomial dp = poly::diffusion_term(d, p);
    RationalPolynomial zeta2 = zeta * zeta;
    LogAnsatzTerms t;
    t.l0 = alpha * (zeta * fz) + zeta2 * big_f;
    t.l1 = alpha * (zeta * divz - gdg + fz) + zeta2 * dp + zeta.scaled(Rational(2)) * big_f;
    t.l2 = alpha * divz + zeta.scaled(Rational(2)) * dp + big_f;
    t.l3 = dp;
    return t;
}

AssembledProgram assemble(const ProblemSpec& spec, Program program, Direction direction, const BoundOptions& options) {
    spec.validate();
    std::size_t n = spec.dimension();
    AssembledProgram a;
    a.program = program;
    a.direction = direction;
    a.degree = options.degree;
    auto& vars = a.vars;

    AffinePolynomial bound(n);
    if (options.fixed_bound) {
        bound = sosc::lift(RationalPolynomial::constant(n, *options.fixed_bound));
    } else {
        bool up = direction == Direction::Upper;
        a.bound_var = vars.create(up ? "U" : "L", up ? sosc::VarKind::BoundU : sosc::VarKind::BoundL);
        bound = sosc::variable_constant(n, *a.bound_var);
    }
    AffinePolynomial phi = sosc::lift(spec.phi);
    const std::string label = to_string(program) + "-" + to_string(direction);

    switch (program) {
    case Program::DetGlobal:
    case Program::DetLocal:
    case Program::Stoch: {
        AffinePolynomial v = sosc::make_storage_ansatz(vars, n, options.degree, "v");
        a.storage = v;
        AffinePolynomial ineq = lift_lie(spec, v) + phi - bound;
        if (program == Program::Stoch) {
            if (!spec.sigma) throw SpecError("sigma", "stochastic programs need a noise block");
            if (!spec.epsilon || *spec.epsilon <= 0) throw SpecError("eps", "stochastic programs need eps > 0");
            ineq += poly::diffusion_term(spec.diffusion(), v).scaled(*spec.epsilon);
            a.caveats.push_back(kBoundaryCaveat);
        }
        AffinePolynomial body = direction == Direction::Lower ? ineq : -ineq;
        a.inequality = body;
        if (program == Program::DetLocal) {
            if (!spec.g) throw SpecError("domain", "local bounds need a domain polynomial g");
            check_domain(*spec.g);
            a.domain = *spec.g;
            unsigned ds = options.multiplier_degree.value_or(sosc::strict_multiplier_degree(body, *spec.g));
            auto sp = sosc::s_procedure(vars, body, *spec.g, ds, "s", options.newton_prune);
            a.multipliers.push_back(sp.multiplier);
            a.constraints.push_back(sosc::make_sos_constraint(sp.body, label, options.newton_prune));
            a.constraints.push_back(sp.multiplier_constraint);
            a.caveats.push_back(kLocalCaveat);
        } else {
            a.constraints.push_back(sosc::make_sos_constraint(body, label, options.newton_prune));
        }
        break;
    }
    case Program::WeakNoise:
    case Program::VanishingNoise: {
        if (direction != Direction::Lower) throw SpecError("direction", "only lower bounds use the logarithmic ansatz");
        if (!spec.zeta) throw SpecError("zeta", "zeta missing");
        const RationalPolynomial& zeta = *spec.zeta;
        AffinePolynomial alpha(n);
        if (!options.fix_alpha_zero) {
            a.alpha_var = vars.create("alpha", sosc::VarKind::Alpha);
            alpha = sosc::variable_constant(n, *a.alpha_var);
        }
        AffinePolynomial p = sosc::make_storage_ansatz(vars, n, options.degree, "p");
        a.storage = p;
        AffinePolynomial body(n);
        if (program == Program::WeakNoise) {
            if (!spec.sigma) throw SpecError("sigma", "stochastic programs need a noise block");
            if (!spec.epsilon || *spec.epsilon <= 0) throw SpecError("eps", "stochastic programs need eps > 0");
            Rational e = *spec.epsilon;
            LogAnsatzTerms t = log_ansatz_terms(spec, zeta, alpha, p, bound);
            body = t.l0 + t.l1.scaled(e) + t.l2.scaled(Rational(e * e)) + t.l3.scaled(Rational(e * e * e));
            a.caveats.push_back(kBoundaryCaveat);
        } else {
            RationalPolynomial fz = poly::lie_derivative(spec.f, zeta);
            body = alpha * fz + zeta * (lift_lie(spec, p) + phi - bound);
            a.caveats.push_back(kStochasticStabilityCaveat);
            auto adm = zeta_admissibility(poly::jacobian_at_origin(spec.f), poly::quadratic_form_matrix(zeta));
            if (adm == Admissibility::Indefinite)
                a.warnings.push_back("zeta is not admissible: J0^T Z + Z J0 is indefinite, expect L near 0");
        }
        a.inequality = body;
        a.constraints.push_back(sosc::make_sos_constraint(body, label, options.newton_prune));
        break;
    }
    }
    return a;
}

namespace {

RationalMatrix exact_block(const RealMatrix& m, std::optional<int> digits) {
    RationalMatrix q(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Rational v = to_rational(m(i, j));
            if (digits) v = round_to_decimal_places(v, *digits);
            q[i][j] = q[j][i] = v;
        }
    return q;
}

}  // namespace

BoundResult solve(AssembledProgram& a, const BoundOptions& options) {
    auto start = std::chrono::steady_clock::now();
    BoundResult res;
    res.program = a.program;
    res.direction = a.direction;
    res.degree = a.degree;
    res.caveats = a.caveats;
    res.warnings = a.warnings;
    res.domain = a.domain;

    sdp::SolverSettings settings;
    settings.mantissa_bits = options.effective_mantissa_bits();
    settings.max_iterations = options.max_iterations;
    settings.verbose = options.verbose;
    res.mantissa_bits = settings.mantissa_bits;

    // With the bound held fixed, push the Gram matrices away from the PSD
    // boundary: maximize t with body − t·zᵀz ∈ Σ for every block, t ≤ 1.
    std::vector<sosc::SosConstraint> constraints = a.constraints;
    std::optional<std::size_t> margin_var;
    sosc::VarRegistry vars = a.vars;
    sosc::Objective objective = sosc::Objective::feasibility();
    if (a.bound_var) {
        objective = a.direction == Direction::Upper ? sosc::Objective::minimize(*a.bound_var)
                                                    : sosc::Objective::maximize(*a.bound_var);
    } else {
        margin_var = vars.create("t", sosc::VarKind::Other);
        objective = sosc::Objective::maximize(*margin_var);
    }
    auto with_margin = [&](const std::vector<sosc::SosConstraint>& cs) {
        if (!margin_var) return cs;
        std::size_t n = a.inequality.dimension();
        AffinePolynomial t = sosc::variable_constant(n, *margin_var);
        std::vector<sosc::SosConstraint> out = cs;
        for (auto& c : out) {
            RationalPolynomial zz(n);
            for (const auto& m : c.basis.z) zz += RationalPolynomial::monomial(m * m, Rational(1));
            c.body -= zz * t;
        }
        sosc::SosConstraint cap;
        cap.body = sosc::lift(RationalPolynomial::constant(n, Rational(1))) - t;
        cap.basis.z = {poly::Monomial(n)};
        cap.label = "margin cap";
        out.push_back(std::move(cap));
        return out;
    };

    sosc::CompiledProgram prog;
    sdp::SdpSolution sol;
    // A zero margin means some Gram diagonal is forced to vanish (the leading
    // form can pin lower coefficients); drop those monomials and re-solve.
    for (int round = 0;; ++round) {
        prog = sosc::compile(with_margin(constraints), {}, vars, objective);
        try {
            sol = sdp::solve(prog.problem, settings);
        } catch (const sdp::StructuralInfeasibility& e) {
            res.status = sdp::Status::PrimalInfeasible;
            res.message = e.what();
            if (options.fixed_bound) res.value = *options.fixed_bound;
            res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return res;
        }
        if (!margin_var || sol.status != sdp::Status::Optimal || round == 4) break;
        if (sosc::decision_values(sol, vars.size())[*margin_var] > Real(1e-9)) break;
        bool pruned = false;
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            std::size_t blk = prog.sos_blocks[i];
            if (blk == std::numeric_limits<std::size_t>::max()) continue;
            const RealMatrix& x = sol.blocks[blk];
            Real top(0);
            for (std::size_t k = 0; k < x.rows(); ++k) top = std::max<Real>(top, Real(abs(x(k, k))));
            std::vector<poly::Monomial> keep;
            for (std::size_t k = 0; k < x.rows(); ++k)
                if (x(k, k) > top * Real(1e-8)) keep.push_back(constraints[i].basis.z[k]);
            if (!keep.empty() && keep.size() < constraints[i].basis.z.size()) {
                constraints[i].basis.z = std::move(keep);
                pruned = true;
            }
        }
        if (!pruned) break;
    }

    if (options.check_drift && sol.status == sdp::Status::Optimal) {
        sdp::SolverSettings hi = settings;
        hi.mantissa_bits = settings.mantissa_bits * 2;
        auto refined = sdp::refine(prog.problem, sol, hi);
        if (refined.status == sdp::Status::Optimal) {
            res.drift = refined.drift;
            sol = std::move(refined);
            res.mantissa_bits = hi.mantissa_bits;
        }
    }
    res.status = sol.status;
    res.message = sol.message;
    res.primal_residual = sol.primal_residual;
    res.dual_residual = sol.dual_residual;
    res.gap = sol.gap;
    res.iterations = sol.iterations;

    if (sol.status == sdp::Status::Optimal) {
        std::vector<Real> values = sosc::decision_values(sol, vars.size());
        std::vector<Rational> exact;
        exact.reserve(values.size());
        for (const auto& v : values)
            exact.push_back(options.round_digits ? round_to_decimal_places(to_rational(v), *options.round_digits)
                                                 : to_rational(v));
        Rational margin(0);
        if (margin_var) {
            margin = exact[*margin_var];
            if (margin < 0) {
                res.status = sdp::Status::PrimalInfeasible;
                res.message = "no Gram decomposition at this bound (best eigenvalue margin " +
                              to_decimal(to_real(margin), 6) + ")";
                res.value = *options.fixed_bound;
                res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                return res;
            }
        }
        std::span<const Rational> vals(exact);
        res.value = a.bound_var ? exact[*a.bound_var] : *options.fixed_bound;
        res.storage = sosc::substitute(a.storage, vals);
        for (const auto& m : a.multipliers) res.multipliers.push_back(sosc::substitute(m, vals));
        if (a.alpha_var) res.alpha = exact[*a.alpha_var];
        res.inequality = sosc::substitute(a.inequality, vals);
        if (options.certificates) {
            for (std::size_t i = 0; i < a.constraints.size(); ++i) {
                std::size_t blk = prog.sos_blocks[i];
                if (blk == std::numeric_limits<std::size_t>::max()) continue;
                RationalMatrix q = exact_block(sol.blocks[blk], options.round_digits);
                for (std::size_t k = 0; k < q.size(); ++k) q[k][k] += margin;
                res.certificates.push_back(certify::make_certificate(a.constraints[i].label,
                                                                     sosc::substitute(a.constraints[i].body, vals),
                                                                     std::move(q), constraints[i].basis.z,
                                                                     res.mantissa_bits));
            }
        }
    } else if (options.fixed_bound) {
        res.value = *options.fixed_bound;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

BoundResult det_global_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options) {
    auto a = assemble(spec, Program::DetGlobal, direction, options);
    return solve(a, options);
}

BoundResult det_local_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options) {
    auto a = assemble(spec, Program::DetLocal, direction, options);
    return solve(a, options);
}

BoundResult stoch_bound(const ProblemSpec& spec, Direction direction, const BoundOptions& options) {
    auto a = assemble(spec, Program::Stoch, direction, options);
    return solve(a, options);
}

BoundResult weak_noise_lower_bound(const ProblemSpec& spec, const BoundOptions& options) {
    auto a = assemble(spec, Program::WeakNoise, Direction::Lower, options);
    return solve(a, options);
}

BoundResult vanishing_noise_lower_bound(const ProblemSpec& spec, const BoundOptions& options) {
    auto a = assemble(spec, Program::VanishingNoise, Direction::Lower, options);
    return solve(a, options);
}

std::vector<ZetaSweepEntry> zeta_sweep(const ProblemSpec& spec, const std::vector<ZetaCandidate>& candidates,
                                       const BoundOptions& options) {
    std::vector<ZetaSweepEntry> out;
    for (const auto& c : candidates) {
        ProblemSpec s = spec;
        s.zeta = c.zeta;
        out.push_back({c, vanishing_noise_lower_bound(s, options)});
    }
    std::stable_sort(out.begin(), out.end(), [](const ZetaSweepEntry& a, const ZetaSweepEntry& b) {
        if (a.result.feasible() != b.result.feasible()) return a.result.feasible();
        return a.result.value > b.result.value;
    });
    return out;
}

namespace {

double radical_inverse(std::uint64_t k, unsigned base) {
    double h = 0, f = 1.0 / base;
    for (; k > 0; k /= base, f /= base) h += f * static_cast<double>(k % base);
    return h;
}

double monomial_mass(const RationalPolynomial& p, std::span<const double> x) {
    double s = 0;
    for (const auto& [m, c] : p.terms()) {
        double t = 1;
        for (std::size_t i = 0; i < m.dimension(); ++i) t *= std::pow(std::fabs(x[i]), m[i]);
        s += t;
    }
    return s;
}

}  // namespace

SoundnessReport soundness_check(const BoundResult& result, std::size_t points, double half_width) {
    SoundnessReport rep;
    if (!result.feasible()) return rep;
    std::size_t n = result.inequality.dimension();
    // Negative Gram eigenvalues count like residual coefficients.
    Real slack = to_real(result.max_residual());
    for (const auto& c : result.certificates)
        if (c.lambda0 < 0) slack = std::max<Real>(slack, Real(-c.lambda0 * static_cast<long>(c.dim())));
    double tol_unit = std::max(to_double(slack), 1e-300);
    PrecisionGuard guard(std::max(256u, result.mantissa_bits));
    const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    rep.worst_margin = std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    std::vector<Real> xr(n);
    auto margin = [&](const RationalPolynomial& p, double extra) {
        Real v = poly::evaluate(p, std::span<const Real>(xr));
        double scale = 10 * tol_unit * std::max(1.0, monomial_mass(p, x)) * extra;
        return to_double(Real(v / scale));
    };
    for (std::size_t k = 1; k <= points; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = half_width * (2 * radical_inverse(k, primes[i % 12]) - 1);
            xr[i] = Real(x[i]);
        }
        for (const auto& c : result.certificates) {
            double m = margin(c.body, 1.0);
            rep.worst_margin = std::min(rep.worst_margin, m);
        }
        bool inside = true;
        double gabs = 0;
        if (result.domain) {
            double gv = poly::evaluate(*result.domain, std::span<const double>(x));
            inside = gv >= 0;
            gabs = std::fabs(gv);
        }
        if (inside) rep.worst_margin = std::min(rep.worst_margin, margin(result.inequality, 1.0 + gabs));
        ++rep.points;
    }
    rep.passed = rep.worst_margin >= -1.0;
    return rep;
}

}  // namespace sosbounds::bounds
