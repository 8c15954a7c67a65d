#include "sosbounds/cli/problem_file.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace sosbounds::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splits "head = rest"; head may hold several words.
bool split_assignment(const std::string& s, std::string& head, std::string& rest) {
    auto eq = s.find('=');
    if (eq == std::string::npos) return false;
    head = trim(s.substr(0, eq));
    rest = trim(s.substr(eq + 1));
    return true;
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

}  // namespace

ProblemFile read_problem_file(std::istream& is, std::string source) {
    ProblemFile file;
    file.source = std::move(source);
    std::string line;
    for (std::size_t no = 1; std::getline(is, line); ++no) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) file.lines.emplace_back(no, line);
    }
    return file;
}

bounds::ProblemSpec ProblemFile::instantiate(const poly::ConstantMap& overrides) const {
    bounds::ProblemSpec spec;
    std::vector<std::optional<poly::RationalPolynomial>> f;
    bool have_phi = false;
    std::set<std::string, std::less<>> used;
    auto fail = [&](std::size_t line, const std::string& msg) { return ProblemFileError(source, line, msg); };

    for (const auto& [no, text] : lines) {
        auto expr = [&, no = no](const std::string& s, const std::vector<std::string>& vars) {
            try {
                return poly::parse(s, vars, spec.params);
            } catch (const poly::ParseError& e) {
                throw fail(no, e.what());
            }
        };
        auto constant = [&, no = no](const std::string& s) {
            auto p = expr(s, {"__constant"});
            if (p.degree() > 0) throw fail(no, "'" + s + "' is not a constant");
            return p.coefficient(poly::Monomial(1));
        };
        auto w = words(text);
        const std::string& key = w.front();
        if (key == "vars") {
            if (!spec.vars.empty()) throw fail(no, "vars declared twice");
            if (w.size() < 2) throw fail(no, "vars needs at least one name");
            spec.vars.assign(w.begin() + 1, w.end());
            std::set<std::string> seen(spec.vars.begin(), spec.vars.end());
            if (seen.size() != spec.vars.size()) throw fail(no, "duplicate variable name");
            f.assign(spec.vars.size(), std::nullopt);
            continue;
        }
        if (key == "param") {
            if (w.size() != 3) throw fail(no, "expected 'param <name> <value>'");
            if (spec.params.count(w[1])) throw fail(no, "parameter '" + w[1] + "' declared twice");
            try {
                auto it = overrides.find(w[1]);
                spec.params[w[1]] = it != overrides.end() ? it->second : parse_rational(w[2]);
            } catch (const std::invalid_argument& e) {
                throw fail(no, e.what());
            }
            used.insert(w[1]);
            continue;
        }
        std::string head, rest;
        if (!split_assignment(text, head, rest)) throw fail(no, "unknown line '" + text + "'");
        if (rest.empty()) throw fail(no, "missing expression after '='");
        auto h = words(head);
        if (h.empty()) throw fail(no, "missing keyword before '='");
        if (spec.vars.empty() && h[0] != "eps") throw fail(no, "'" + h[0] + "' before vars");
        if (h[0] == "f") {
            if (h.size() != 2) throw fail(no, "expected 'f <var> = <expr>'");
            std::size_t k = 0;
            while (k < spec.vars.size() && spec.vars[k] != h[1]) ++k;
            if (k == spec.vars.size()) throw fail(no, "unknown variable '" + h[1] + "'");
            if (f[k]) throw fail(no, "f " + h[1] + " given twice");
            f[k] = expr(rest, spec.vars);
        } else if (h[0] == "phi" && h.size() == 1) {
            if (have_phi) throw fail(no, "phi given twice");
            spec.phi = expr(rest, spec.vars);
            have_phi = true;
        } else if (h[0] == "sigma" && h.size() == 1) {
            if (spec.sigma) throw fail(no, "sigma given twice");
            poly::RationalMatrix m;
            std::istringstream rows(rest);
            for (std::string row; std::getline(rows, row, ';');) {
                std::vector<Rational> r;
                for (char& c : row)
                    if (c == ',') c = ' ';
                for (const auto& entry : words(row)) r.push_back(constant(entry));
                if (r.empty()) throw fail(no, "empty sigma row");
                if (!m.empty() && r.size() != m.front().size()) throw fail(no, "sigma rows differ in length");
                m.push_back(std::move(r));
            }
            spec.sigma = std::move(m);
        } else if (h[0] == "eps" && h.size() == 1) {
            spec.epsilon = constant(rest);
        } else if (h[0] == "domain") {
            if (h.size() != 2 || h[1] != "g") throw fail(no, "expected 'domain g = <expr>'");
            if (spec.g) throw fail(no, "domain given twice");
            spec.g = expr(rest, spec.vars);
        } else if (h[0] == "zeta" && h.size() == 1) {
            if (spec.zeta) throw fail(no, "zeta given twice");
            spec.zeta = expr(rest, spec.vars);
        } else {
            throw fail(no, "unknown keyword '" + head + "'");
        }
    }
    std::size_t last = lines.empty() ? 0 : lines.back().first;
    if (spec.vars.empty()) throw fail(last, "missing vars");
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!f[k]) throw fail(last, "missing 'f " + spec.vars[k] + " = ...'");
        spec.f.push_back(std::move(*f[k]));
    }
    if (!have_phi) throw fail(last, "missing phi");
    for (const auto& [name, value] : overrides)
        if (!used.count(name)) throw fail(last, "no parameter '" + name + "' to override");
    spec.validate();
    return spec;
}

bounds::ProblemSpec parse_problem(std::istream& is, std::string source) {
    return read_problem_file(is, std::move(source)).instantiate();
}

bounds::ProblemSpec load_problem(const std::string& path, const poly::ConstantMap& overrides) {
    std::ifstream in(path);
    if (!in) throw ProblemFileError(path, 0, "cannot open file");
    return read_problem_file(in, path).instantiate(overrides);
}

}  // namespace sosbounds::cli
