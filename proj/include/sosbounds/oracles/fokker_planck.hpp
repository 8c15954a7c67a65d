#pragma once

#include "sosbounds/oracles/simulate.hpp"

#include <iosfwd>
#include <vector>

namespace sosbounds::oracles {

/// Node values on the uniform grid [−a, a]², x index fastest.
struct DensityGrid {
    double half_width = 0;
    std::size_t n = 0;
    double epsilon = 0;
    std::vector<double> values;

    double spacing() const { return 2 * half_width / static_cast<double>(n - 1); }
    double coordinate(std::size_t i) const { return -half_width + spacing() * static_cast<double>(i); }
    double& at(std::size_t i, std::size_t j) { return values[i + n * j]; }
    double at(std::size_t i, std::size_t j) const { return values[i + n * j]; }
    /// Trapezoidal weight of node (i, j).
    double weight(std::size_t i, std::size_t j) const;
    double mass() const;
    double minimum() const;
    /// Trapezoidal integral of p·ρ.
    double expectation(const poly::RationalPolynomial& p) const;
};

struct FpOptions {
    double half_width = 6;
    std::size_t n = 257;
    /// Stop once ‖ρⁿ⁺¹ − ρⁿ‖₁ < tol·Δt.
    double tol = 1e-10;
    double dt = 0.05;
    long max_steps = 400000;
    /// Largest share of the mass allowed on the outermost ring of nodes.
    double boundary_threshold = 1e-6;
    /// Adds a van Leer limited flux as an explicit defect correction, so the
    /// steady state is second order where the cell Péclet number is large.
    bool high_resolution = true;
};

struct FpResult {
    double expectation = 0;
    DensityGrid grid;
    long steps = 0;
    double boundary_mass = 0;
    /// Last ‖ρⁿ⁺¹ − ρⁿ‖₁ / Δt.
    double change_rate = 0;
    /// Mass of negative values set to zero before normalization.
    double clipped_mass = 0;
    double seconds = 0;
};

/// Stationary density of ∂ρ/∂t = ∇·(εD∇ρ − fρ) on [−a, a]² with zero-flux
/// walls. Chang–Cooper (exponentially fitted) fluxes, Douglas splitting with
/// implicit Euler sweeps per direction. Needs n = 2 and diagonal D.
FpResult fokker_planck_expectation(const bounds::ProblemSpec& spec, const FpOptions& options = {});

/// "x,y,rho" rows.
void write_density_csv(std::ostream& os, const DensityGrid& g);
/// Four header lines (format tag, dims, domain, eps) then n² little-endian
/// doubles, x fastest.
void write_density_binary(std::ostream& os, const DensityGrid& g);
DensityGrid read_density_binary(std::istream& is);

}  // namespace sosbounds::oracles
