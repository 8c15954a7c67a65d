#pragma once

#include "sosbounds/bounds/bounds.hpp"
#include "sosbounds/cli/problem_file.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sosbounds::cli {

enum ExitCode : int { Ok = 0, UsageError = 1, Infeasible = 2, SolverFailure = 3 };

enum class Command { Bound, Certify, OracleSim, OracleFp, OracleAbsorb, ZetaConstruct };

std::string to_string(Command c);

/// Bound kinds as named on the command line, e.g. "det-ub" or "weak-lb".
struct BoundKind {
    bounds::Program program;
    bounds::Direction direction;
};
BoundKind parse_bound_kind(const std::string& name);
const std::vector<std::string>& bound_kind_names();

struct RunConfig {
    Command command = Command::Bound;
    std::string problem_path;
    /// Bound kind for `bound` and `certify`.
    std::string kind = "det-ub";
    std::vector<unsigned> degrees{6};
    /// Multiplier degree: S-procedure for bounds, s in `oracle absorb`.
    std::optional<unsigned> sdegree;
    /// Values for the parameter mu; empty keeps the file's value.
    std::vector<Rational> mus;
    /// Noise strengths; empty keeps the file's eps.
    std::vector<Rational> eps;
    /// "" (file), "table1", "construct", or an expression.
    std::string zeta;
    unsigned precision = 0;
    bool newton_prune = true;
    /// CSV destination; empty writes to the output stream.
    std::string out;
    /// Certificate files are written here when set.
    std::string cert_dir;

    int digits = 12;
    std::vector<double> x0{2, 0};
    double h = 1e-3;
    double t0 = 100;
    double t = 10100;
    std::string trajectory_out;
    std::size_t grid = 257;
    double half_width = 6;
    std::string density_out;

    /// Throws std::invalid_argument when inconsistent.
    void validate() const;
};

/// Inclusive range "a:b:step" or a single value.
std::vector<Rational> parse_range(const std::string& text);
/// Comma-separated values.
std::vector<Rational> parse_list(const std::string& text);
std::vector<unsigned> parse_degrees(const std::string& text);

/// Runs one command, one CSV row per sweep point in sweep-key order (mu, eps,
/// zeta, degree). Diagnostics go to `err`. Returns 0, 2 if any point was
/// infeasible, 3 if any solve failed, 1 on input errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// RFC 4180 quoting when needed.
std::string csv_field(const std::string& s);

}  // namespace sosbounds::cli
