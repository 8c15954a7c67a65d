#include "sosbounds/sdp/problem.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sosbounds::sdp {

void SdpProblem::validate() const {
    if (rows.size() != rhs.size()) throw std::invalid_argument("SdpProblem: rows and rhs differ in length");
    auto check = [&](const LinearFunctional& f, const char* what) {
        for (const auto& t : f.block_terms) {
            if (t.block >= block_sizes.size()) throw std::invalid_argument(std::string(what) + ": block out of range");
            if (t.row >= block_sizes[t.block] || t.col > t.row)
                throw std::invalid_argument(std::string(what) + ": entry outside the lower triangle");
        }
        for (const auto& t : f.free_terms)
            if (t.index >= free_vars) throw std::invalid_argument(std::string(what) + ": free variable out of range");
    };
    for (const auto& r : rows) check(r, "equality");
    check(objective, "objective");
    for (std::size_t n : block_sizes)
        if (n == 0) throw std::invalid_argument("SdpProblem: empty block");
}

std::string to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::PrimalInfeasible: return "primal-infeasible";
    case Status::DualInfeasible: return "dual-infeasible";
    case Status::Stalled: return "stalled";
    case Status::IterLimit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

Status parse_status(const std::string& s) {
    for (Status st : {Status::Optimal, Status::PrimalInfeasible, Status::DualInfeasible, Status::Stalled,
                      Status::IterLimit})
        if (to_string(st) == s) return st;
    throw std::invalid_argument("unknown solver status '" + s + "'");
}

double digits10_of(unsigned bits) { return static_cast<double>(bits) * 0.30102999566398120; }

}  // namespace

double SolverSettings::effective_feasibility_tol() const {
    return feasibility_tol > 0 ? feasibility_tol : std::pow(10.0, -digits10_of(mantissa_bits) / 3.0);
}

double SolverSettings::effective_gap_tol() const {
    return gap_tol > 0 ? gap_tol : std::pow(10.0, -digits10_of(mantissa_bits) / 3.0);
}

void SolverSettings::validate() const {
    if (mantissa_bits < 53) throw std::invalid_argument("solver precision must be at least 53 bits");
    if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
    if (feasibility_tol < 0 || gap_tol < 0) throw std::invalid_argument("tolerances must be positive");
    if (!(step_fraction > 0 && step_fraction < 1)) throw std::invalid_argument("step fraction must lie in (0,1)");
}

unsigned default_mantissa_bits(int degree) { return degree >= 10 ? 256 : 128; }

namespace {

void write_functional(std::ostream& os, const LinearFunctional& f) {
    os << f.block_terms.size() << ' ' << f.free_terms.size() << '\n';
    for (const auto& t : f.block_terms)
        os << "b " << t.block << ' ' << t.row << ' ' << t.col << ' ' << sosbounds::to_string(t.coef) << '\n';
    for (const auto& t : f.free_terms) os << "f " << t.index << ' ' << sosbounds::to_string(t.coef) << '\n';
}

void expect(std::istream& is, const std::string& word) {
    std::string got;
    if (!(is >> got) || got != word) throw std::runtime_error("sdp file: expected '" + word + "', got '" + got + "'");
}

LinearFunctional read_functional(std::istream& is) {
    LinearFunctional f;
    std::size_t nb = 0, nf = 0;
    if (!(is >> nb >> nf)) throw std::runtime_error("sdp file: malformed functional header");
    for (std::size_t k = 0; k < nb; ++k) {
        BlockTerm t;
        std::string coef;
        expect(is, "b");
        if (!(is >> t.block >> t.row >> t.col >> coef)) throw std::runtime_error("sdp file: malformed block term");
        t.coef = parse_rational(coef);
        f.block_terms.push_back(std::move(t));
    }
    for (std::size_t k = 0; k < nf; ++k) {
        FreeTerm t;
        std::string coef;
        expect(is, "f");
        if (!(is >> t.index >> coef)) throw std::runtime_error("sdp file: malformed free term");
        t.coef = parse_rational(coef);
        f.free_terms.push_back(std::move(t));
    }
    return f;
}

Real read_real(std::istream& is) {
    std::string s;
    if (!(is >> s)) throw std::runtime_error("solution file: missing value");
    return Real(s);
}

}  // namespace

void write_problem(std::ostream& os, const SdpProblem& p) {
    os << "sdp-problem 1\n";
    os << "sense " << (p.sense == Sense::Minimize ? "min" : "max") << '\n';
    os << "blocks " << p.block_sizes.size();
    for (std::size_t n : p.block_sizes) os << ' ' << n;
    os << '\n';
    os << "free " << p.free_vars << '\n';
    os << "objective ";
    write_functional(os, p.objective);
    os << "equalities " << p.rows.size() << '\n';
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        os << "eq " << sosbounds::to_string(p.rhs[i]) << ' ';
        write_functional(os, p.rows[i]);
    }
}

SdpProblem read_problem(std::istream& is) {
    SdpProblem p;
    expect(is, "sdp-problem");
    expect(is, "1");
    expect(is, "sense");
    std::string sense;
    is >> sense;
    if (sense != "min" && sense != "max") throw std::runtime_error("sdp file: bad sense '" + sense + "'");
    p.sense = sense == "min" ? Sense::Minimize : Sense::Maximize;
    expect(is, "blocks");
    std::size_t nb = 0;
    is >> nb;
    p.block_sizes.resize(nb);
    for (auto& n : p.block_sizes) is >> n;
    expect(is, "free");
    is >> p.free_vars;
    expect(is, "objective");
    p.objective = read_functional(is);
    expect(is, "equalities");
    std::size_t m = 0;
    is >> m;
    for (std::size_t i = 0; i < m; ++i) {
        expect(is, "eq");
        std::string rhs;
        is >> rhs;
        p.rhs.push_back(parse_rational(rhs));
        p.rows.push_back(read_functional(is));
    }
    if (!is) throw std::runtime_error("sdp file: truncated");
    p.validate();
    return p;
}

void write_solution(std::ostream& os, const SdpSolution& s) {
    os << "sdp-solution 1\n";
    os << "status " << to_string(s.status) << '\n';
    os << "bits " << s.mantissa_bits << '\n';
    os << "iterations " << s.iterations << '\n';
    os << "primal-objective " << to_decimal(s.primal_objective) << '\n';
    os << "dual-objective " << to_decimal(s.dual_objective) << '\n';
    os.precision(17);
    os << "residuals " << s.primal_residual << ' ' << s.dual_residual << ' ' << s.gap << '\n';
    os << "free " << s.free_values.size() << '\n';
    for (const auto& v : s.free_values) os << to_decimal(v) << '\n';
    os << "duals " << s.duals.size() << '\n';
    for (const auto& v : s.duals) os << to_decimal(v) << '\n';
    os << "blocks " << s.blocks.size() << '\n';
    for (const auto& b : s.blocks) {
        os << b.rows() << '\n';
        for (std::size_t i = 0; i < b.rows(); ++i) {
            for (std::size_t j = 0; j <= i; ++j) os << (j ? " " : "") << to_decimal(b(i, j));
            os << '\n';
        }
    }
}

SdpSolution read_solution(std::istream& is) {
    SdpSolution s;
    expect(is, "sdp-solution");
    expect(is, "1");
    expect(is, "status");
    std::string st;
    is >> st;
    s.status = parse_status(st);
    expect(is, "bits");
    is >> s.mantissa_bits;
    PrecisionGuard guard(s.mantissa_bits);
    expect(is, "iterations");
    is >> s.iterations;
    expect(is, "primal-objective");
    s.primal_objective = read_real(is);
    expect(is, "dual-objective");
    s.dual_objective = read_real(is);
    expect(is, "residuals");
    is >> s.primal_residual >> s.dual_residual >> s.gap;
    expect(is, "free");
    std::size_t n = 0;
    is >> n;
    for (std::size_t i = 0; i < n; ++i) s.free_values.push_back(read_real(is));
    expect(is, "duals");
    is >> n;
    for (std::size_t i = 0; i < n; ++i) s.duals.push_back(read_real(is));
    expect(is, "blocks");
    is >> n;
    for (std::size_t b = 0; b < n; ++b) {
        std::size_t k = 0;
        is >> k;
        RealMatrix m(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                m(i, j) = read_real(is);
                m(j, i) = m(i, j);
            }
        s.blocks.push_back(std::move(m));
    }
    if (!is) throw std::runtime_error("solution file: truncated");
    return s;
}

}  // namespace sosbounds::sdp
