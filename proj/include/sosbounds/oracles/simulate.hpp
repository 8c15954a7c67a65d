#pragma once

#include "sosbounds/bounds/spec.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosbounds::oracles {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Double-precision copy of a polynomial for fast repeated evaluation.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const poly::RationalPolynomial& p);

    double operator()(std::span<const double> x) const;
    std::size_t dimension() const { return dim_; }

private:
    std::size_t dim_ = 0;
    unsigned max_power_ = 0;
    std::vector<double> coef_;
    std::vector<unsigned> powers_;  // term-major, dim_ per term
    mutable std::vector<double> table_;
};

class CompiledField {
public:
    explicit CompiledField(std::span<const poly::RationalPolynomial> f);
    void operator()(std::span<const double> x, std::span<double> out) const;
    std::size_t dimension() const { return f_.size(); }

private:
    std::vector<CompiledPolynomial> f_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    double h = 0;
    double t0 = 0;
};

struct SimOptions {
    double h = 1e-3;
    double t0 = 100;
    double t = 10100;
    /// Repeat with h/2 and report the change.
    bool richardson = true;
    /// Trajectory samples kept after t0; spread evenly over [t0, t].
    std::size_t max_samples = 20000;
    double divergence = 1e6;
};

struct SimResult {
    /// Trapezoidal average of φ over [t0, t] at step h.
    double average = 0;
    double average_half = 0;
    /// |A(h/2) − A(h)| / max(|A(h)|, 1e-300), 0 without the check.
    double richardson_change = 0;
    /// (16·A(h/2) − A(h)) / 15.
    double extrapolated = 0;
    Trajectory trajectory;
    double seconds = 0;
};

/// One classical RK4 step in place.
void rk4_step(const CompiledField& f, std::vector<double>& x, double h, std::vector<double>& work);

/// State at time t from x0 with n = round(t/h) steps.
std::vector<double> integrate(const bounds::ProblemSpec& spec, std::vector<double> x0, double h, double t);

SimResult simulate_average(const bounds::ProblemSpec& spec, const std::vector<double>& x0, const SimOptions& options = {});

/// Header "t,<vars>" then one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::vector<std::string>& vars);

}  // namespace sosbounds::oracles
