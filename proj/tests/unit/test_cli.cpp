#include "sosbounds/certify/certificate.hpp"
#include "sosbounds/cli/run.hpp"
#include "sosbounds/poly/parser.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sosbounds;
using namespace sosbounds::cli;

namespace {

const std::vector<std::string> xy{"x", "y"};
const std::string vdp_path = std::string(SOSBOUNDS_DATA_DIR) + "/vdp.prob";

poly::RationalPolynomial P(const std::string& s) { return poly::parse(s, xy); }

bounds::ProblemSpec parse_text(const std::string& text) {
    std::istringstream is(text);
    return parse_problem(is, "test.prob");
}

std::string temp_file(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / ("sosbounds-test-" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

/// k-th comma-separated field of an unquoted row.
std::string field(const std::string& row, std::size_t k) {
    std::istringstream is(row);
    std::string f;
    for (std::size_t i = 0; i <= k; ++i) std::getline(is, f, ',');
    return f;
}

const char* deterministic = "vars x y\nparam mu 1\nf x = y\nf y = mu*(1 - x^2)*y - x\nphi = x^2 + y^2\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bundled van der Pol problem") {
    auto spec = load_problem(vdp_path);
    CHECK(spec.vars == xy);
    REQUIRE(spec.f.size() == 2);
    CHECK(spec.f[0] == P("y"));
    CHECK(spec.f[1] == P("(1 - x^2)*y - x"));
    CHECK(spec.phi == P("x^2 + y^2"));
    REQUIRE(spec.sigma);
    CHECK(*spec.sigma == poly::RationalMatrix{{Rational(0)}, {Rational(1)}});
    CHECK(spec.g == P("x^2 + y^2 - 1"));
    CHECK(spec.zeta == P("x^2 - x*y + y^2"));
    CHECK(spec.params.at("mu") == 1);

    auto b = bounds::van_der_pol(Rational(1));
    CHECK(spec.f == b.f);

    auto two = load_problem(vdp_path, {{"mu", Rational(2)}});
    CHECK(two.f[1] == P("2*(1 - x^2)*y - x"));
    CHECK_THROWS_AS(load_problem(vdp_path, {{"nu", Rational(2)}}), ProblemFileError);
}

TEST_CASE("problem file errors") {
    CHECK_THROWS_WITH_AS(parse_text(std::string(deterministic) + "zeta = x^2\n"),
                         doctest::Contains("Z not positive definite"), bounds::SpecError);
    try {
        parse_text("vars x y\nf x = y\nf y = x +* y\nphi = x\n");
        FAIL("expected a parse error");
    } catch (const ProblemFileError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).rfind("test.prob:3:", 0) == 0);
    }
    CHECK_THROWS_WITH_AS(parse_text("vars x\nf x = -x\nphi = x\nfoo = 1\n"), doctest::Contains(":4: unknown keyword"),
                         ProblemFileError);
    CHECK_THROWS_WITH_AS(parse_text("vars x\nphi = x\n"), doctest::Contains("missing 'f x"), ProblemFileError);
    CHECK_THROWS_WITH_AS(parse_text("vars x\nf x = -x\nf z = 1\nphi = x\n"), doctest::Contains("unknown variable"),
                         ProblemFileError);
    CHECK_THROWS_WITH_AS(parse_text("vars x y\nf x = y\nf y = -x\nphi = x\nsigma = 1 0; 1\n"),
                         doctest::Contains("differ in length"), ProblemFileError);
    CHECK_THROWS_WITH_AS(parse_text("vars x y\nf x = y\nf y = -x\nphi = x\nsigma = x; 1\n"),
                         doctest::Contains(":5: unknown identifier"), ProblemFileError);
    CHECK_THROWS_AS(parse_text("vars x y\nf x = y\nf y = -x\nphi = x\nsigma = 1; 0; 0\n"), bounds::SpecError);
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.prob"), ProblemFileError);
}

TEST_CASE("deterministic file and noise defaults") {
    auto spec = parse_text(std::string(deterministic) + "# comment\n\n");
    CHECK_FALSE(spec.has_noise());
    CHECK_FALSE(spec.g);
    auto noisy = parse_text(std::string(deterministic) + "sigma = 1/2, 0; 0 1\neps = 1e-2\n");
    REQUIRE(noisy.sigma);
    CHECK((*noisy.sigma)[0][0] == Rational(1, 2));
    CHECK(noisy.epsilon == Rational(1, 100));
}

TEST_CASE("ranges and lists") {
    CHECK(parse_range("1:2:1/2") == std::vector<Rational>{Rational(1), Rational(3, 2), Rational(2)});
    CHECK(parse_range("0.1:5:0.1").size() == 50);
    CHECK(parse_range("3") == std::vector<Rational>{Rational(3)});
    CHECK_THROWS_AS(parse_range("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("2:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1:2:0"), std::invalid_argument);
    CHECK(parse_list("1e-3,1e-2, 1") == std::vector<Rational>{Rational(1, 1000), Rational(1, 100), Rational(1)});
    CHECK(parse_degrees("4,6,8") == std::vector<unsigned>{4, 6, 8});
    CHECK_THROWS_AS(parse_degrees("4,x"), std::invalid_argument);
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\",") == "\"say \"\"hi\"\",\"");
    CHECK(csv_field("plain") == "plain");
    CHECK_THROWS_AS(parse_bound_kind("det-xx"), std::invalid_argument);
    CHECK(bound_kind_names().size() == 8);
}

TEST_CASE("bound sweep rows and exit codes") {
    RunConfig c;
    c.problem_path = vdp_path;
    c.degrees = {4, 6};
    c.mus = parse_range("1:3/2:1/2");
    std::ostringstream out, err;
    CHECK(run(c, out, err) == Ok);
    auto rows = lines(out.str());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].rfind("command,kind,problem,mu,eps,zeta,degree", 0) == 0);
    CHECK(rows[1].find("bound,det-ub,") == 0);
    CHECK(rows[1].find(",1,,,4,") != std::string::npos);
    CHECK(rows[4].find(",1.5,,,6,") != std::string::npos);

    // A row's echoed config reproduces its value.
    RunConfig again = c;
    again.mus = {Rational(3, 2)};
    again.degrees = {6};
    std::ostringstream out2;
    CHECK(run(again, out2, err) == Ok);
    auto rerun = lines(out2.str())[1];
    CHECK(field(rerun, 3) == "1.5");
    CHECK(field(rerun, 11) == field(rows[4], 11));

    c.degrees = {2};
    c.mus.clear();
    std::ostringstream inf, ierr;
    CHECK(run(c, inf, ierr) == Infeasible);
    CHECK(ierr.str().find("[bounds]") != std::string::npos);
    CHECK(lines(inf.str())[1].find("primal-infeasible") != std::string::npos);
}

TEST_CASE("input errors exit with 1") {
    std::ostringstream out, err;
    RunConfig c;
    CHECK(run(c, out, err) == UsageError);
    c.problem_path = "/nonexistent.prob";
    CHECK(run(c, out, err) == UsageError);
    CHECK(err.str().find("cannot open") != std::string::npos);

    c.problem_path = temp_file("det.prob", deterministic);
    c.kind = "stoch-ub";
    std::ostringstream e2;
    CHECK(run(c, out, e2) == UsageError);
    CHECK(e2.str().find("noise") != std::string::npos);

    c.problem_path = vdp_path;
    c.kind = "det-ub";
    c.mus = {Rational(1)};
    c.degrees = {};
    CHECK(run(c, out, err) == UsageError);
}

TEST_CASE("stochastic and logarithmic rows") {
    RunConfig c;
    c.problem_path = vdp_path;
    c.kind = "stoch-ub";
    c.eps = parse_list("1,1/10");
    c.degrees = {4};
    std::ostringstream out, err;
    CHECK(run(c, out, err) == Ok);
    auto rows = lines(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].find(",1,1,,4,") != std::string::npos);
    CHECK(rows[2].find(",1,0.1,,4,") != std::string::npos);

    c.kind = "vanishing-lb";
    c.eps.clear();
    c.zeta = "table1";
    c.degrees = {4};
    std::ostringstream vout;
    int code = run(c, vout, err);
    CHECK(code != UsageError);
    CHECK(lines(vout.str()).size() == 4);
}

TEST_CASE("oracle and zeta commands") {
    RunConfig c;
    c.problem_path = vdp_path;
    c.command = Command::OracleAbsorb;
    std::ostringstream out, err;
    CHECK(run(c, out, err) == Ok);
    CHECK(out.str().find("certified-no-reentry,1,2*y^2") != std::string::npos);

    c.command = Command::ZetaConstruct;
    std::ostringstream z;
    CHECK(run(c, z, err) == Ok);
    CHECK(z.str().find("x^2 - x*y + y^2,eigenvectors,positive") != std::string::npos);

    c.command = Command::OracleFp;
    c.eps = parse_list("1/10");
    c.grid = 65;
    c.density_out = (std::filesystem::temp_directory_path() / "sosbounds-test-density.bin").string();
    std::ostringstream fp;
    CHECK(run(c, fp, err) == Ok);
    auto rows = lines(fp.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].rfind("oracle fp,", 0) == 0);
    CHECK(std::filesystem::exists(c.density_out));

    c.half_width = 1;
    std::ostringstream small, serr;
    CHECK(run(c, small, serr) == SolverFailure);
    CHECK(serr.str().find("enlarge domain") != std::string::npos);

    c.command = Command::OracleSim;
    c.t0 = 0;
    c.t = 50;
    c.trajectory_out = (std::filesystem::temp_directory_path() / "sosbounds-test-traj.csv").string();
    std::ostringstream sim;
    CHECK(run(c, sim, err) == Ok);
    CHECK(lines(sim.str()).size() == 2);
    std::ifstream traj(c.trajectory_out);
    std::string header;
    std::getline(traj, header);
    CHECK(header == "t,x,y");
}

TEST_CASE("certificate files") {
    RunConfig c;
    c.problem_path = vdp_path;
    c.degrees = {6};
    c.cert_dir = (std::filesystem::temp_directory_path() / "sosbounds-test-certs").string();
    std::filesystem::remove_all(c.cert_dir);
    std::ostringstream out, err;
    CHECK(run(c, out, err) == Ok);
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(c.cert_dir)) {
        std::ifstream f(entry.path());
        CHECK_NOTHROW(certify::read_certificate(f));
        ++files;
    }
    CHECK(files >= 1);
}

}
