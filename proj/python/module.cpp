#include "sosbounds/bounds/bounds.hpp"
#include "sosbounds/certify/certify_bound.hpp"
#include "sosbounds/cli/problem_file.hpp"
#include "sosbounds/cli/run.hpp"
#include "sosbounds/oracles/absorbing.hpp"
#include "sosbounds/oracles/fokker_planck.hpp"
#include "sosbounds/oracles/simulate.hpp"
#include "sosbounds/poly/parser.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sosbounds;

namespace {

// Floats go through their shortest repr so 0.1 means 1/10.
Rational to_rational_arg(const py::handle& v) {
    if (py::isinstance<py::bool_>(v)) throw py::type_error("expected a number or string, got bool");
    if (py::isinstance<py::str>(v) || py::isinstance<py::int_>(v) || py::isinstance<py::float_>(v))
        return parse_rational(py::str(v).cast<std::string>());
    throw py::type_error("expected a number or string");
}

py::object rational_or_none(const std::optional<Rational>& q) {
    return q ? py::object(py::float_(to_double(*q))) : py::none();
}

py::dict bound_dict(const bounds::ProblemSpec& spec, const bounds::BoundResult& r) {
    py::dict d;
    d["program"] = bounds::to_string(r.program);
    d["direction"] = bounds::to_string(r.direction);
    d["degree"] = r.degree;
    d["status"] = sdp::to_string(r.status);
    d["feasible"] = r.feasible();
    d["value"] = r.bound();
    d["value_exact"] = to_string(r.value);
    d["alpha"] = rational_or_none(r.alpha);
    d["storage"] = poly::to_string(r.storage, spec.vars);
    d["certified"] = r.certified();
    d["max_residual"] = to_double(r.max_residual());
    d["min_lambda0"] = r.certificates.empty() ? 0.0 : to_double(r.min_lambda0());
    d["iterations"] = r.iterations;
    d["seconds"] = r.seconds;
    d["message"] = r.message;
    d["caveats"] = r.caveats;
    d["warnings"] = r.warnings;
    return d;
}

bounds::BoundOptions bound_options(unsigned degree, std::optional<unsigned> sdegree, unsigned precision,
                                   bool newton_prune) {
    bounds::BoundOptions o;
    o.degree = degree;
    o.multiplier_degree = sdegree;
    o.mantissa_bits = precision;
    o.newton_prune = newton_prune;
    return o;
}

bounds::BoundResult run_bound(const bounds::ProblemSpec& spec, const cli::BoundKind& k, const bounds::BoundOptions& o) {
    using bounds::Program;
    switch (k.program) {
        case Program::DetGlobal: return bounds::det_global_bound(spec, k.direction, o);
        case Program::DetLocal: return bounds::det_local_bound(spec, k.direction, o);
        case Program::Stoch: return bounds::stoch_bound(spec, k.direction, o);
        case Program::WeakNoise: return bounds::weak_noise_lower_bound(spec, o);
        case Program::VanishingNoise: return bounds::vanishing_noise_lower_bound(spec, o);
    }
    throw std::logic_error("unknown program");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sum-of-squares bounds on time averages and stationary expectations";

    py::register_exception<cli::ProblemFileError>(m, "ProblemFileError", PyExc_ValueError);
    py::register_exception<oracles::OracleError>(m, "OracleError", PyExc_RuntimeError);

    py::class_<bounds::ProblemSpec>(m, "Problem")
        .def_readonly("vars", &bounds::ProblemSpec::vars)
        .def_property_readonly("dimension", &bounds::ProblemSpec::dimension)
        .def_property_readonly("has_noise", &bounds::ProblemSpec::has_noise)
        .def_property_readonly("f", [](const bounds::ProblemSpec& s) {
            std::vector<std::string> out;
            for (const auto& fi : s.f) out.push_back(poly::to_string(fi, s.vars));
            return out;
        })
        .def_property_readonly("phi", [](const bounds::ProblemSpec& s) { return poly::to_string(s.phi, s.vars); })
        .def_property(
            "epsilon", [](const bounds::ProblemSpec& s) { return rational_or_none(s.epsilon); },
            [](bounds::ProblemSpec& s, const py::object& v) {
                if (v.is_none()) s.epsilon.reset();
                else s.epsilon = to_rational_arg(v);
                s.validate();
            })
        .def_property(
            "zeta",
            [](const bounds::ProblemSpec& s) -> py::object {
                return s.zeta ? py::object(py::str(poly::to_string(*s.zeta, s.vars))) : py::none();
            },
            [](bounds::ProblemSpec& s, const py::object& v) {
                if (v.is_none()) s.zeta.reset();
                else s.zeta = poly::parse(v.cast<std::string>(), s.vars, s.params);
                s.validate();
            })
        .def("__repr__", [](const bounds::ProblemSpec& s) {
            std::string r = "Problem(vars=[";
            for (std::size_t i = 0; i < s.vars.size(); ++i) r += (i ? ", " : "") + s.vars[i];
            return r + "])";
        });

    m.def(
        "load_problem",
        [](const std::string& path, const py::dict& params) {
            poly::ConstantMap overrides;
            for (auto [k, v] : params) overrides[k.cast<std::string>()] = to_rational_arg(v);
            return cli::load_problem(path, overrides);
        },
        py::arg("path"), py::arg("params") = py::dict());

    m.def(
        "van_der_pol", [](const py::object& mu) { return bounds::van_der_pol(to_rational_arg(mu)); },
        py::arg("mu") = 1);

    m.def("bound_kinds", &cli::bound_kind_names);

    m.def(
        "bound",
        [](const bounds::ProblemSpec& spec, const std::string& kind, unsigned degree, std::optional<unsigned> sdegree,
           unsigned precision, bool newton_prune) {
            auto k = cli::parse_bound_kind(kind);
            auto r = run_bound(spec, k, bound_options(degree, sdegree, precision, newton_prune));
            return bound_dict(spec, r);
        },
        py::arg("problem"), py::arg("kind"), py::arg("degree") = 6, py::arg("sdegree") = py::none(),
        py::arg("precision") = 0, py::arg("newton_prune") = true);

    m.def(
        "certify",
        [](const bounds::ProblemSpec& spec, const std::string& kind, unsigned degree, int digits,
           std::optional<unsigned> sdegree) {
            auto k = cli::parse_bound_kind(kind);
            certify::CertifyOptions c;
            c.digits = digits;
            auto o = certify::certify_bound(spec, k.program, k.direction, bound_options(degree, sdegree, 0, true), c);
            py::dict d = o.certified ? bound_dict(spec, o.result) : py::dict();
            d["certified"] = o.certified;
            d["optimum"] = rational_or_none(o.optimum);
            d["steps"] = o.steps.size();
            d["message"] = o.message;
            return d;
        },
        py::arg("problem"), py::arg("kind"), py::arg("degree") = 6, py::arg("digits") = 12,
        py::arg("sdegree") = py::none());

    m.def(
        "simulate",
        [](const bounds::ProblemSpec& spec, const std::vector<double>& x0, double h, double t0, double t,
           bool richardson) {
            oracles::SimOptions o;
            o.h = h;
            o.t0 = t0;
            o.t = t;
            o.richardson = richardson;
            auto r = oracles::simulate_average(spec, x0, o);
            const auto& tr = r.trajectory;
            py::array_t<double> states({tr.states.size(), spec.dimension()});
            auto s = states.mutable_unchecked<2>();
            for (std::size_t i = 0; i < tr.states.size(); ++i)
                for (std::size_t j = 0; j < spec.dimension(); ++j) s(i, j) = tr.states[i][j];
            py::dict d;
            d["average"] = r.average;
            d["average_half"] = r.average_half;
            d["richardson_change"] = r.richardson_change;
            d["extrapolated"] = r.extrapolated;
            d["seconds"] = r.seconds;
            d["times"] = py::array_t<double>(tr.times.size(), tr.times.data());
            d["states"] = states;
            return d;
        },
        py::arg("problem"), py::arg("x0") = std::vector<double>{2, 0}, py::arg("h") = 1e-3, py::arg("t0") = 100.0,
        py::arg("t") = 10100.0, py::arg("richardson") = true);

    m.def(
        "fokker_planck",
        [](const bounds::ProblemSpec& spec, std::size_t grid, double half_width) {
            oracles::FpOptions o;
            o.n = grid;
            o.half_width = half_width;
            auto r = oracles::fokker_planck_expectation(spec, o);
            const auto& g = r.grid;
            // values are stored x-fastest, so rows are y.
            py::array_t<double> rho({g.n, g.n});
            auto a = rho.mutable_unchecked<2>();
            for (std::size_t j = 0; j < g.n; ++j)
                for (std::size_t i = 0; i < g.n; ++i) a(j, i) = g.at(i, j);
            std::vector<double> axis(g.n);
            for (std::size_t i = 0; i < g.n; ++i) axis[i] = g.coordinate(i);
            py::dict d;
            d["expectation"] = r.expectation;
            d["steps"] = r.steps;
            d["boundary_mass"] = r.boundary_mass;
            d["clipped_mass"] = r.clipped_mass;
            d["mass"] = g.mass();
            d["seconds"] = r.seconds;
            d["axis"] = axis;
            d["density"] = rho;
            return d;
        },
        py::arg("problem"), py::arg("grid") = 257, py::arg("half_width") = 6.0);

    m.def(
        "absorbing_check",
        [](const bounds::ProblemSpec& spec, unsigned sdegree) {
            oracles::AbsorbOptions o;
            o.multiplier_degree = sdegree;
            auto r = oracles::absorbing_domain_check(spec, o);
            py::dict d;
            d["verdict"] = oracles::to_string(r.verdict);
            d["multiplier"] = poly::to_string(r.multiplier, spec.vars);
            d["body"] = poly::to_string(r.body, spec.vars);
            d["exact"] = r.exact;
            d["message"] = r.message;
            return d;
        },
        py::arg("problem"), py::arg("sdegree") = 2);
}
