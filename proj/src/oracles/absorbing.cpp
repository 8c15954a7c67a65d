#include "sosbounds/oracles/absorbing.hpp"

#include "sosbounds/sdp/solver.hpp"
#include "sosbounds/sosc/compiler.hpp"

#include <algorithm>

namespace sosbounds::oracles {

std::string to_string(AbsorbVerdict v) {
    return v == AbsorbVerdict::CertifiedNoReentry ? "certified-no-reentry" : "inconclusive";
}

namespace {

using certify::SosCertificate;
using poly::RationalMatrix;

RationalMatrix block(const RealMatrix& m, const AbsorbOptions& o, bool snap) {
    RationalMatrix q(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Rational v = snap ? rationalize(static_cast<double>(m(i, j)), o.snap_tol, o.snap_denominator)
                              : to_rational(m(i, j));
            q[i][j] = q[j][i] = v;
        }
    return q;
}

}  // namespace

AbsorbResult absorbing_domain_check(const bounds::ProblemSpec& spec, const AbsorbOptions& o) {
    AbsorbResult res;
    try {
        spec.validate();
        if (!spec.g) throw std::invalid_argument("absorbing_domain_check needs a domain polynomial g");
        const auto& g = *spec.g;
        auto drift = poly::lie_derivative(spec.f, g);

        sosc::VarRegistry vars;
        auto sp = sosc::s_procedure(vars, sosc::lift(drift), -g, o.multiplier_degree, "s", o.newton_prune);
        std::vector<sosc::SosConstraint> constraints{
            sosc::make_sos_constraint(sp.body, "no-reentry", o.newton_prune), sp.multiplier_constraint};

        sdp::SolverSettings settings;
        settings.mode = sdp::Mode::FeasibilityOnly;
        settings.mantissa_bits =
            o.mantissa_bits ? o.mantissa_bits : sdp::default_mantissa_bits(sosc::body_degree(sp.body));
        PrecisionGuard guard(settings.mantissa_bits);
        sosc::CompiledProgram compiled;
        sdp::SdpSolution sol;
        // Monomials whose Gram diagonal vanishes are forced out by the
        // equalities; dropping them and re-solving moves off the face.
        for (int round = 0;; ++round) {
            compiled = sosc::compile(constraints, {}, vars, sosc::Objective::feasibility());
            sol = sdp::solve(compiled.problem, settings);
            if (sol.status != sdp::Status::Optimal) {
                res.message = "no multiplier found (" + sdp::to_string(sol.status) + ")";
                return res;
            }
            if (round == 4) break;
            bool pruned = false;
            for (std::size_t i = 0; i < constraints.size(); ++i) {
                const auto& q = sol.blocks[compiled.sos_blocks[i]];
                Real top = 0;
                for (std::size_t k = 0; k < q.rows(); ++k) top = std::max(top, Real(abs(q(k, k))));
                std::vector<poly::Monomial> keep;
                for (std::size_t k = 0; k < q.rows(); ++k)
                    if (q(k, k) > top * 1e-8) keep.push_back(constraints[i].basis.z[k]);
                if (!keep.empty() && keep.size() < q.rows()) {
                    constraints[i].basis.z = std::move(keep);
                    pruned = true;
                }
            }
            if (!pruned) break;
        }
        auto values = sosc::decision_values(sol, vars.size());

        for (bool snap : {true, false}) {
            std::vector<Rational> exact;
            for (const auto& v : values)
                exact.push_back(snap ? rationalize(static_cast<double>(v), o.snap_tol, o.snap_denominator)
                                     : to_rational(v));
            std::vector<SosCertificate> certs;
            bool ok = true;
            for (std::size_t i = 0; i < constraints.size(); ++i) {
                auto body = sosc::substitute(constraints[i].body, exact);
                auto q = block(sol.blocks[compiled.sos_blocks[i]], o, snap);
                certs.push_back(certify::make_certificate(constraints[i].label, body, q, compiled.bases[i].z,
                                                          settings.mantissa_bits));
                ok = ok && certs.back().certified && (!snap || certs.back().r == 0);
            }
            if (!ok) continue;
            res.verdict = AbsorbVerdict::CertifiedNoReentry;
            res.exact = snap;
            res.multiplier = sosc::substitute(sp.multiplier, exact);
            res.body = certs.front().body;
            res.certificates = std::move(certs);
            res.message = snap ? "exact rational certificate" : "numerical certificate (lambda0 - dim*r >= 0)";
            return res;
        }
        res.message = "solver reported feasible but no certificate survived the check";
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        res.message = e.what();
    }
    return res;
}

}  // namespace sosbounds::oracles
