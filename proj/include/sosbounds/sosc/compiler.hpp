#pragma once

#include "sosbounds/sdp/problem.hpp"
#include "sosbounds/sosc/affine.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbounds::sosc {

class CompileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GramBasis {
    std::vector<poly::Monomial> z;
};

struct SosConstraint {
    AffinePolynomial body;
    GramBasis basis;
    std::string label;
};

/// Symmetric matrix of affine expressions required to be PSD. Only the lower
/// triangle (row >= col) is read.
struct PsdConstraint {
    std::vector<std::vector<AffineExpr>> matrix;
    std::string label;
};

struct Objective {
    enum class Kind { Feasibility, Minimize, Maximize };
    Kind kind = Kind::Feasibility;
    std::size_t var = 0;

    static Objective feasibility() { return {}; }
    static Objective minimize(std::size_t v) { return {Kind::Minimize, v}; }
    static Objective maximize(std::size_t v) { return {Kind::Maximize, v}; }
};

/// Polynomial of total degree <= degree with one fresh decision variable per
/// monomial; the constant term is left out.
AffinePolynomial make_storage_ansatz(VarRegistry& vars, std::size_t dimension, unsigned degree,
                                     const std::string& prefix, VarKind kind = VarKind::Storage);

/// Same, keeping the constant term.
AffinePolynomial make_polynomial_ansatz(VarRegistry& vars, std::size_t dimension, unsigned degree,
                                        const std::string& prefix, VarKind kind);

/// Maximal total degree of monomials with a nonzero coefficient; -1 when zero.
int body_degree(const AffinePolynomial& body);

/// Monomials of degree <= deg/2. With pruning, z is kept only if 2z lies in
/// the Newton polytope of the body's support, and then only if its diagonal
/// entry can be matched by some coefficient.
GramBasis gram_basis_for(const AffinePolynomial& body, bool newton_prune = true);

/// Attaches the basis computed by gram_basis_for.
SosConstraint make_sos_constraint(AffinePolynomial body, std::string label, bool newton_prune = true);

/// Multiplier degree that makes s·g match the body: deg(body) − deg(g)
/// rounded down to even, and never negative.
unsigned default_multiplier_degree(const AffinePolynomial& body, const poly::RationalPolynomial& g);

/// Largest even degree with deg(s·g) < deg(body), so the multiplier cannot
/// touch the body's leading form.
unsigned strict_multiplier_degree(const AffinePolynomial& body, const poly::RationalPolynomial& g);

struct SProcedure {
    AffinePolynomial body;
    AffinePolynomial multiplier;
    SosConstraint multiplier_constraint;
};

/// Returns body − s·g with a fresh multiplier s of degree <= d and the side
/// constraint s ∈ Σ.
SProcedure s_procedure(VarRegistry& vars, const AffinePolynomial& body, const poly::RationalPolynomial& g,
                       unsigned multiplier_degree, const std::string& prefix = "s", bool newton_prune = true);

struct CompiledProgram {
    sdp::SdpProblem problem;
    /// Gram block index of each SoS constraint, then of each PSD constraint.
    std::vector<std::size_t> sos_blocks;
    std::vector<std::size_t> psd_blocks;
    std::vector<GramBasis> bases;
    /// Free scalar j of the SDP is decision variable j.
    std::size_t num_decision_vars = 0;
};

/// One PSD block per constraint, one equality per monomial in the support of
/// the body united with the basis products. Support monomials not covered by
/// the basis become linear equalities on the decision variables; a constant
/// nonzero one is an error.
CompiledProgram compile(const std::vector<SosConstraint>& constraints, const std::vector<PsdConstraint>& psd,
                        const VarRegistry& vars, const Objective& objective);

/// Decision-variable values from the free scalars of a solution.
std::vector<Real> decision_values(const sdp::SdpSolution& s, std::size_t count);

}  // namespace sosbounds::sosc
