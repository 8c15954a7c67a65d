#include "sosbounds/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace sosbounds;

namespace {

struct Flags {
    std::string degree = "6";
    std::string mu;
    std::string eps;
    std::string x0 = "2,0";
    bool no_prune = false;
};

void common(CLI::App* app, cli::RunConfig& c, Flags& f) {
    app->add_option("problem", c.problem_path, "problem file")->required();
    app->add_option("--mu", f.mu, "values of the parameter mu: a:b:step or a single value");
    app->add_option("--precision", c.precision, "solver mantissa bits (0 = automatic)");
    app->add_option("--out", c.out, "CSV output path (default stdout)");
    app->add_flag("--no-newton-prune", f.no_prune, "keep the full monomial basis");
}

void bound_like(CLI::App* app, cli::RunConfig& c, Flags& f) {
    app->add_option("kind", c.kind, "bound kind")
        ->required()
        ->check(CLI::IsMember(cli::bound_kind_names()));
    common(app, c, f);
    app->add_option("--degree", f.degree, "storage degrees, comma separated");
    app->add_option("--sdegree", c.sdegree, "S-procedure multiplier degree");
    app->add_option("--eps", f.eps, "noise strengths, comma separated");
    app->add_option("--zeta", c.zeta, "table1, construct, or an expression (default: the file's zeta)");
    app->add_option("--cert-dir", c.cert_dir, "write certificate files here");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-of-squares bounds on time averages and stationary expectations"};
    app.require_subcommand(1);
    cli::RunConfig c;
    Flags f;

    auto* bound = app.add_subcommand("bound", "compute a bound");
    bound_like(bound, c, f);

    auto* cert = app.add_subcommand("certify", "search for a bound that passes the certificate check");
    bound_like(cert, c, f);
    cert->add_option("--digits", c.digits, "decimal places kept when rounding");

    auto* oracle = app.add_subcommand("oracle", "independent reference computations");
    oracle->require_subcommand(1);
    auto* sim = oracle->add_subcommand("sim", "RK4 time average");
    common(sim, c, f);
    sim->add_option("--x0", f.x0, "initial state, comma separated");
    sim->add_option("--step", c.h, "time step h");
    sim->add_option("--t0", c.t0, "transient cutoff");
    sim->add_option("--t", c.t, "final time");
    sim->add_option("--trajectory", c.trajectory_out, "write the sampled trajectory as CSV");
    auto* fp = oracle->add_subcommand("fp", "stationary Fokker-Planck expectation");
    common(fp, c, f);
    fp->add_option("--eps", f.eps, "noise strengths, comma separated");
    fp->add_option("--grid", c.grid, "nodes per axis");
    fp->add_option("--half-width", c.half_width, "domain is [-a, a]^2");
    fp->add_option("--density", c.density_out, "write the density as a binary grid");
    auto* absorb = oracle->add_subcommand("absorb", "no-reentry certificate for {g >= 0}");
    common(absorb, c, f);
    absorb->add_option("--sdegree", c.sdegree, "multiplier degree");

    auto* zeta = app.add_subcommand("zeta", "quadratic forms for the logarithmic ansatz");
    zeta->require_subcommand(1);
    auto* construct = zeta->add_subcommand("construct", "build an admissible zeta");
    common(construct, c, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? cli::Ok : cli::UsageError;
    }

    if (bound->parsed()) c.command = cli::Command::Bound;
    if (cert->parsed()) c.command = cli::Command::Certify;
    if (sim->parsed()) c.command = cli::Command::OracleSim;
    if (fp->parsed()) c.command = cli::Command::OracleFp;
    if (absorb->parsed()) c.command = cli::Command::OracleAbsorb;
    if (construct->parsed()) c.command = cli::Command::ZetaConstruct;
    c.newton_prune = !f.no_prune;
    try {
        c.degrees = cli::parse_degrees(f.degree);
        if (!f.mu.empty()) c.mus = cli::parse_range(f.mu);
        if (!f.eps.empty()) c.eps = cli::parse_list(f.eps);
        c.x0.clear();
        for (const auto& v : cli::parse_list(f.x0)) c.x0.push_back(to_double(v));
    } catch (const std::invalid_argument& e) {
        std::cerr << "[cli] " << e.what() << '\n';
        return cli::UsageError;
    }
    return cli::run(c, std::cout, std::cerr);
}
