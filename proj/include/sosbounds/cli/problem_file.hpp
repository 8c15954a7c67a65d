#pragma once

#include "sosbounds/bounds/spec.hpp"
#include "sosbounds/poly/parser.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sosbounds::cli {

/// Syntax error in a problem file; what() reads "source:line: message".
class ProblemFileError : public std::runtime_error {
public:
    ProblemFileError(const std::string& source, std::size_t line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Problem file with comments stripped; expressions are parsed on
/// instantiation so parameters can be overridden for sweeps.
///
///   vars x y
///   param mu 1.0
///   f x = y
///   f y = mu*(1 - x^2)*y - x
///   phi = x^2 + y^2
///   sigma = 0; 1          # n×m, rows separated by ';'
///   eps = 1/10
///   domain g = x^2 + y^2 - 1
///   zeta = x^2 - x*y + y^2
struct ProblemFile {
    std::string source;
    std::vector<std::pair<std::size_t, std::string>> lines;

    /// Parses and validates; `overrides` replace (and must name) params.
    bounds::ProblemSpec instantiate(const poly::ConstantMap& overrides = {}) const;
};

ProblemFile read_problem_file(std::istream& is, std::string source = "<input>");

bounds::ProblemSpec parse_problem(std::istream& is, std::string source = "<input>");

/// Throws ProblemFileError on syntax errors and bounds::SpecError when the
/// parsed problem is inconsistent.
bounds::ProblemSpec load_problem(const std::string& path, const poly::ConstantMap& overrides = {});

}  // namespace sosbounds::cli
