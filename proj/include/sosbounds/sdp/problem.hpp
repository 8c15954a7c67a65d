#pragma once

#include "sosbounds/numeric.hpp"
#include "sosbounds/sdp/matrix.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sosbounds::sdp {

/// Coefficient on the lower-triangle entry X[row][col] (row >= col) of one
/// PSD block. The functional's value is Σ coef·X[row][col]; an off-diagonal
/// entry is counted once.
struct BlockTerm {
    std::size_t block;
    std::size_t row;
    std::size_t col;
    Rational coef;
};

struct FreeTerm {
    std::size_t index;
    Rational coef;
};

struct LinearFunctional {
    std::vector<BlockTerm> block_terms;
    std::vector<FreeTerm> free_terms;

    bool empty() const { return block_terms.empty() && free_terms.empty(); }
};

enum class Sense { Minimize, Maximize };

/// Standard-form SDP: PSD block matrices X_k and free scalars w, linear
/// equalities a_i(X, w) = b_i, linear objective.
struct SdpProblem {
    std::vector<std::size_t> block_sizes;
    std::size_t free_vars = 0;
    std::vector<LinearFunctional> rows;
    std::vector<Rational> rhs;
    LinearFunctional objective;
    Sense sense = Sense::Minimize;

    std::size_t num_rows() const { return rows.size(); }
    /// Throws std::invalid_argument on out-of-range or upper-triangle entries.
    void validate() const;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, Stalled, IterLimit };

std::string to_string(Status s);

struct SdpSolution {
    Status status = Status::Stalled;
    std::vector<RealMatrix> blocks;
    /// Dual slack blocks S; kept in memory only, for warm starts.
    std::vector<RealMatrix> dual_blocks;
    std::vector<Real> free_values;
    /// Equality multipliers.
    std::vector<Real> duals;
    Real primal_objective;
    Real dual_objective;
    /// Relative measures: ‖A(X)+Bw−b‖∞/(1+‖b‖∞), ‖C−A*(y)−S‖∞/(1+‖C‖∞) over
    /// blocks and free columns, |p−d|/(1+|p|+|d|).
    double primal_residual = 0;
    double dual_residual = 0;
    double gap = 0;
    int iterations = 0;
    unsigned mantissa_bits = 0;
    /// |objective change| reported by refine.
    double drift = 0;
    std::string message;

    /// Objective in the problem's own sense.
    Real objective() const { return primal_objective; }
};

enum class Mode { Optimize, FeasibilityOnly };

struct SolverSettings {
    unsigned mantissa_bits = 128;
    int max_iterations = 200;
    /// Relative primal and dual feasibility tolerance; 0 selects a default from
    /// the mantissa.
    double feasibility_tol = 0;
    double gap_tol = 0;
    double step_fraction = 0.98;
    Mode mode = Mode::Optimize;
    /// Dual (primal) objective magnitude beyond which a normalized ray is
    /// accepted as an infeasibility certificate.
    double infeasibility_threshold = 1e12;
    bool verbose = false;

    double effective_feasibility_tol() const;
    double effective_gap_tol() const;
    void validate() const;
};

/// Default working precision for programs built from degree-d ansätze.
unsigned default_mantissa_bits(int degree);

void write_problem(std::ostream& os, const SdpProblem& p);
SdpProblem read_problem(std::istream& is);
void write_solution(std::ostream& os, const SdpSolution& s);
SdpSolution read_solution(std::istream& is);

}  // namespace sosbounds::sdp
