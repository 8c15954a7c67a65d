#include "sosbounds/cli/run.hpp"

#include "sosbounds/certify/certify_bound.hpp"
#include "sosbounds/oracles/absorbing.hpp"
#include "sosbounds/oracles/fokker_planck.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sosbounds::cli {

std::string to_string(Command c) {
    switch (c) {
    case Command::Bound: return "bound";
    case Command::Certify: return "certify";
    case Command::OracleSim: return "oracle sim";
    case Command::OracleFp: return "oracle fp";
    case Command::OracleAbsorb: return "oracle absorb";
    case Command::ZetaConstruct: return "zeta construct";
    }
    return "?";
}

namespace {

using bounds::Direction;
using bounds::Program;

const std::vector<std::pair<std::string, BoundKind>>& kinds() {
    static const std::vector<std::pair<std::string, BoundKind>> k{
        {"det-ub", {Program::DetGlobal, Direction::Upper}},    {"det-lb", {Program::DetGlobal, Direction::Lower}},
        {"local-lb", {Program::DetLocal, Direction::Lower}},   {"local-ub", {Program::DetLocal, Direction::Upper}},
        {"stoch-ub", {Program::Stoch, Direction::Upper}},      {"stoch-lb", {Program::Stoch, Direction::Lower}},
        {"weak-lb", {Program::WeakNoise, Direction::Lower}},   {"vanishing-lb", {Program::VanishingNoise, Direction::Lower}},
    };
    return k;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string part; std::getline(is, part, sep);) {
        auto b = part.find_first_not_of(" \t");
        auto e = part.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : part.substr(b, e - b + 1));
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

int status_code(sdp::Status s) {
    switch (s) {
    case sdp::Status::Optimal: return Ok;
    case sdp::Status::PrimalInfeasible:
    case sdp::Status::DualInfeasible: return Infeasible;
    default: return SolverFailure;
    }
}

/// 3 dominates 2 dominates 0.
int combine(int a, int b) { return std::max(a, b); }

/// One problem instance per requested mu.
struct Instance {
    std::string mu;
    bounds::ProblemSpec spec;
};

std::vector<Instance> instances(const ProblemFile& file, const RunConfig& c) {
    std::vector<Instance> out;
    if (c.mus.empty()) {
        auto spec = file.instantiate();
        auto it = spec.params.find("mu");
        out.push_back({it == spec.params.end() ? "" : to_exact_decimal(it->second), std::move(spec)});
        return out;
    }
    for (const auto& mu : c.mus) out.push_back({to_exact_decimal(mu), file.instantiate({{"mu", mu}})});
    return out;
}

/// The file's eps when no list was given (possibly none).
std::vector<std::optional<Rational>> eps_values(const RunConfig& c, const bounds::ProblemSpec& spec) {
    std::vector<std::optional<Rational>> out;
    if (c.eps.empty()) out.push_back(spec.epsilon);
    for (const auto& e : c.eps) out.emplace_back(e);
    return out;
}

std::string eps_text(const std::optional<Rational>& e) { return e ? to_exact_decimal(*e) : ""; }

std::vector<bounds::ZetaCandidate> zeta_choices(const RunConfig& c, const bounds::ProblemSpec& spec,
                                                const std::string& mu) {
    if (c.zeta.empty()) {
        if (!spec.zeta) return {{"", poly::RationalPolynomial(spec.dimension())}};
        return {{"file", *spec.zeta}};
    }
    if (c.zeta == "table1") {
        if (mu.empty()) throw std::invalid_argument("--zeta table1 needs the parameter mu");
        return bounds::table1_zetas(parse_rational(mu));
    }
    if (c.zeta == "construct") return {{"construct", bounds::construct_zeta(spec.f).zeta}};
    return {{c.zeta, poly::parse(c.zeta, spec.vars, spec.params)}};
}

bool uses_zeta(Program p) { return p == Program::WeakNoise || p == Program::VanishingNoise; }
bool uses_eps(Program p) { return p == Program::Stoch || p == Program::WeakNoise; }

bounds::BoundOptions bound_options(const RunConfig& c, unsigned degree) {
    bounds::BoundOptions o;
    o.degree = degree;
    o.multiplier_degree = c.sdegree;
    o.newton_prune = c.newton_prune;
    o.mantissa_bits = c.precision;
    return o;
}

void write_certificates(const RunConfig& c, const std::string& stem, const bounds::BoundResult& r) {
    if (c.cert_dir.empty()) return;
    std::filesystem::create_directories(c.cert_dir);
    for (std::size_t i = 0; i < r.certificates.size(); ++i) {
        std::ofstream f(std::filesystem::path(c.cert_dir) / (stem + "-" + std::to_string(i) + ".cert"));
        certify::write_certificate(f, r.certificates[i]);
    }
}

double min_margin(const bounds::BoundResult& r) {
    double m = 0;
    bool first = true;
    for (const auto& cert : r.certificates) {
        double v = to_double(Real(cert.lambda0 - to_real(cert.r) * static_cast<long>(cert.dim())));
        m = first ? v : std::min(m, v);
        first = false;
    }
    return m;
}

struct Sweep {
    Instance* inst;
    std::optional<Rational> eps;
    bounds::ZetaCandidate zeta;
};

/// Sweep points for bound/certify in (mu, eps, zeta) order.
std::vector<Sweep> sweep(std::vector<Instance>& insts, const RunConfig& c, Program program) {
    std::vector<Sweep> out;
    for (auto& inst : insts) {
        auto epss = uses_eps(program) ? eps_values(c, inst.spec) : std::vector<std::optional<Rational>>{std::nullopt};
        auto zetas = uses_zeta(program) ? zeta_choices(c, inst.spec, inst.mu)
                                        : std::vector<bounds::ZetaCandidate>{{"", {}}};
        for (const auto& e : epss)
            for (const auto& z : zetas) out.push_back({&inst, e, z});
    }
    return out;
}

bounds::ProblemSpec point_spec(const Sweep& s, Program program) {
    auto spec = s.inst->spec;
    if (s.eps) spec.epsilon = s.eps;
    if (uses_zeta(program) && !s.zeta.zeta.is_zero()) spec.zeta = s.zeta.zeta;
    return spec;
}

int run_bound(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv, std::ostream& err) {
    auto kind = parse_bound_kind(c.kind);
    csv << "command,kind,problem,mu,eps,zeta,degree,sdegree,precision,newton_prune,status,value,alpha,"
           "certified,max_residual,min_lambda0,iterations,seconds,message\n";
    int code = Ok;
    std::size_t row = 0;
    for (const auto& point : sweep(insts, c, kind.program)) {
        auto spec = point_spec(point, kind.program);
        for (unsigned d : c.degrees) {
            auto opts = bound_options(c, d);
            auto a = bounds::assemble(spec, kind.program, kind.direction, opts);
            auto r = bounds::solve(a, opts);
            int rc = status_code(r.status);
            if (rc != Ok) err << "[bounds] " << c.kind << " degree " << d << ": " << sdp::to_string(r.status)
                              << (r.message.empty() ? "" : " (" + r.message + ")") << '\n';
            code = combine(code, rc);
            csv << "bound," << c.kind << ',' << csv_field(c.problem_path) << ',' << point.inst->mu << ','
                << eps_text(spec.epsilon) << ',' << csv_field(point.zeta.id) << ',' << d << ','
                << (c.sdegree ? std::to_string(*c.sdegree) : "") << ',' << r.mantissa_bits << ','
                << (c.newton_prune ? 1 : 0) << ',' << sdp::to_string(r.status) << ','
                << (r.feasible() ? num(r.bound()) : "") << ',' << (r.alpha ? num(to_double(*r.alpha)) : "") << ','
                << (r.feasible() && r.certified() ? 1 : 0) << ','
                << (r.certificates.empty() ? "" : num(to_double(r.max_residual()))) << ','
                << (r.certificates.empty() ? "" : num(to_double(r.min_lambda0()))) << ',' << r.iterations << ','
                << num(r.seconds) << ',' << csv_field(r.message) << '\n';
            if (r.feasible()) write_certificates(c, c.kind + "-row" + std::to_string(row), r);
            ++row;
        }
    }
    return code;
}

int run_certify(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv, std::ostream& err) {
    auto kind = parse_bound_kind(c.kind);
    csv << "command,kind,problem,mu,eps,zeta,degree,digits,certified,optimum,bound,relative_gap,steps,"
           "min_margin,message\n";
    int code = Ok;
    std::size_t row = 0;
    for (const auto& point : sweep(insts, c, kind.program)) {
        auto spec = point_spec(point, kind.program);
        for (unsigned d : c.degrees) {
            certify::CertifyOptions copts;
            copts.digits = c.digits;
            auto out = certify::certify_bound(spec, kind.program, kind.direction, bound_options(c, d), copts);
            if (!out.certified) {
                err << "[certify] " << c.kind << " degree " << d << ": " << out.message << '\n';
                code = combine(code, out.optimum ? Infeasible : SolverFailure);
            }
            std::string opt = out.optimum ? num(to_double(*out.optimum)) : "";
            std::string bound = out.certified ? num(out.result.bound()) : "";
            std::string gap;
            if (out.certified && out.optimum) {
                double o = to_double(*out.optimum);
                gap = num(std::fabs(out.result.bound() - o) / std::max(std::fabs(o), 1e-300));
            }
            csv << "certify," << c.kind << ',' << csv_field(c.problem_path) << ',' << point.inst->mu << ','
                << eps_text(spec.epsilon) << ',' << csv_field(point.zeta.id) << ',' << d << ',' << c.digits << ','
                << (out.certified ? 1 : 0) << ',' << opt << ',' << bound << ',' << gap << ',' << out.steps.size()
                << ',' << (out.certified ? num(min_margin(out.result)) : "") << ',' << csv_field(out.message)
                << '\n';
            if (out.certified) write_certificates(c, "certify-" + c.kind + "-row" + std::to_string(row), out.result);
            ++row;
        }
    }
    return code;
}

int run_sim(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv) {
    csv << "command,problem,mu,x0,h,t0,t,average,average_half,richardson_change,extrapolated,seconds\n";
    for (std::size_t k = 0; k < insts.size(); ++k) {
        oracles::SimOptions o;
        o.h = c.h;
        o.t0 = c.t0;
        o.t = c.t;
        auto r = oracles::simulate_average(insts[k].spec, c.x0, o);
        std::string x0;
        for (std::size_t i = 0; i < c.x0.size(); ++i) x0 += (i ? " " : "") + num(c.x0[i]);
        csv << "oracle sim," << csv_field(c.problem_path) << ',' << insts[k].mu << ',' << csv_field(x0) << ','
            << num(c.h) << ',' << num(c.t0) << ',' << num(c.t) << ',' << num(r.average) << ','
            << num(r.average_half) << ',' << num(r.richardson_change) << ',' << num(r.extrapolated) << ','
            << num(r.seconds) << '\n';
        if (!c.trajectory_out.empty()) {
            std::string path = insts.size() == 1 ? c.trajectory_out : c.trajectory_out + "." + std::to_string(k);
            std::ofstream f(path);
            oracles::write_trajectory_csv(f, r.trajectory, insts[k].spec.vars);
        }
    }
    return Ok;
}

int run_fp(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv) {
    csv << "command,problem,mu,eps,grid,half_width,expectation,steps,boundary_mass,clipped_mass,seconds\n";
    std::size_t k = 0;
    std::size_t total = 0;
    for (auto& inst : insts) total += eps_values(c, inst.spec).size();
    for (auto& inst : insts)
        for (const auto& e : eps_values(c, inst.spec)) {
            auto spec = inst.spec;
            spec.epsilon = e;
            oracles::FpOptions o;
            o.n = c.grid;
            o.half_width = c.half_width;
            auto r = oracles::fokker_planck_expectation(spec, o);
            csv << "oracle fp," << csv_field(c.problem_path) << ',' << inst.mu << ',' << eps_text(e) << ',' << c.grid
                << ',' << num(c.half_width) << ',' << num(r.expectation) << ',' << r.steps << ','
                << num(r.boundary_mass) << ',' << num(r.clipped_mass) << ',' << num(r.seconds) << '\n';
            if (!c.density_out.empty()) {
                std::string path = total == 1 ? c.density_out : c.density_out + "." + std::to_string(k);
                std::ofstream f(path, std::ios::binary);
                oracles::write_density_binary(f, r.grid);
            }
            ++k;
        }
    return Ok;
}

int run_absorb(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv) {
    csv << "command,problem,mu,sdegree,verdict,exact,multiplier,message\n";
    for (auto& inst : insts) {
        oracles::AbsorbOptions o;
        if (c.sdegree) o.multiplier_degree = *c.sdegree;
        o.newton_prune = c.newton_prune;
        o.mantissa_bits = c.precision;
        auto r = oracles::absorbing_domain_check(inst.spec, o);
        csv << "oracle absorb," << csv_field(c.problem_path) << ',' << inst.mu << ',' << o.multiplier_degree << ','
            << oracles::to_string(r.verdict) << ',' << (r.exact ? 1 : 0) << ','
            << csv_field(r.verdict == oracles::AbsorbVerdict::CertifiedNoReentry
                             ? poly::to_string(r.multiplier, inst.spec.vars)
                             : "")
            << ',' << csv_field(r.message) << '\n';
    }
    return Ok;
}

poly::RationalMatrix jacobian_at_origin(const bounds::ProblemSpec& spec) {
    std::size_t n = spec.dimension();
    poly::RationalMatrix j(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) j[i][k] = spec.f[i].coefficient(poly::Monomial::unit(n, k, 1));
    return j;
}

int run_zeta(const RunConfig& c, std::vector<Instance>& insts, std::ostream& csv) {
    csv << "command,problem,mu,zeta,method,admissibility\n";
    for (auto& inst : insts) {
        auto z = bounds::construct_zeta(inst.spec.f);
        auto adm = bounds::zeta_admissibility(jacobian_at_origin(inst.spec), z.z);
        csv << "zeta construct," << csv_field(c.problem_path) << ',' << inst.mu << ','
            << csv_field(poly::to_string(z.zeta, inst.spec.vars)) << ',' << z.method << ',' << bounds::to_string(adm)
            << '\n';
    }
    return Ok;
}

}  // namespace

BoundKind parse_bound_kind(const std::string& name) {
    for (const auto& [n, k] : kinds())
        if (n == name) return k;
    throw std::invalid_argument("unknown bound kind '" + name + "'");
}

const std::vector<std::string>& bound_kind_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, k] : kinds()) v.push_back(n);
        return v;
    }();
    return names;
}

void RunConfig::validate() const {
    if (problem_path.empty()) throw std::invalid_argument("a problem file is required");
    if (command == Command::Bound || command == Command::Certify) {
        parse_bound_kind(kind);
        if (degrees.empty()) throw std::invalid_argument("--degree list is empty");
    }
    if (command == Command::Certify && digits < 1) throw std::invalid_argument("--digits must be positive");
    if (command == Command::OracleSim && (!(h > 0) || !(t > t0) || t0 < 0))
        throw std::invalid_argument("need h > 0 and 0 <= t0 < t");
    if (command == Command::OracleFp && (grid < 5 || !(half_width > 0)))
        throw std::invalid_argument("need --grid >= 5 and --half-width > 0");
}

std::vector<Rational> parse_range(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() == 1) return {parse_rational(parts[0])};
    if (parts.size() != 3) throw std::invalid_argument("expected a value or a:b:step, got '" + text + "'");
    Rational a = parse_rational(parts[0]), b = parse_rational(parts[1]), step = parse_rational(parts[2]);
    if (step <= 0) throw std::invalid_argument("range step must be positive in '" + text + "'");
    if (b < a) throw std::invalid_argument("range end below start in '" + text + "'");
    std::vector<Rational> out;
    for (Rational v = a; v <= b; v += step) out.push_back(v);
    return out;
}

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_rational(p));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<unsigned> parse_degrees(const std::string& text) {
    std::vector<unsigned> out;
    for (const auto& p : split(text, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() || p.empty() || v > 64) throw std::invalid_argument("bad degree '" + p + "'");
        out.push_back(static_cast<unsigned>(v));
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        c.validate();
        std::ifstream in(c.problem_path);
        if (!in) throw ProblemFileError(c.problem_path, 0, "cannot open file");
        auto file = read_problem_file(in, c.problem_path);
        auto insts = instances(file, c);

        std::ofstream file_out;
        if (!c.out.empty()) {
            file_out.open(c.out);
            if (!file_out) throw std::invalid_argument("cannot write " + c.out);
        }
        std::ostream& csv = c.out.empty() ? out : file_out;
        switch (c.command) {
        case Command::Bound: return run_bound(c, insts, csv, err);
        case Command::Certify: return run_certify(c, insts, csv, err);
        case Command::OracleSim: return run_sim(c, insts, csv);
        case Command::OracleFp: return run_fp(c, insts, csv);
        case Command::OracleAbsorb: return run_absorb(c, insts, csv);
        case Command::ZetaConstruct: return run_zeta(c, insts, csv);
        }
        return UsageError;
    } catch (const ProblemFileError& e) {
        err << "[cli] " << e.what() << '\n';
    } catch (const bounds::SpecError& e) {
        err << "[bounds] invalid problem: " << e.what() << '\n';
    } catch (const bounds::ZetaError& e) {
        err << "[bounds] " << e.what() << '\n';
    } catch (const poly::ParseError& e) {
        err << "[poly] " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        err << "[cli] " << e.what() << '\n';
    } catch (const oracles::OracleError& e) {
        err << "[oracles] " << e.what() << '\n';
        return SolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return SolverFailure;
    }
    return UsageError;
}

}  // namespace sosbounds::cli
