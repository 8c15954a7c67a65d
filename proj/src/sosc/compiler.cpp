#include "sosbounds/sosc/compiler.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>

namespace sosbounds::sosc {

using poly::Monomial;

AffinePolynomial make_polynomial_ansatz(VarRegistry& vars, std::size_t dimension, unsigned degree,
                                        const std::string& prefix, VarKind kind) {
    AffinePolynomial p(dimension);
    for (const Monomial& m : poly::monomials_up_to(dimension, degree)) {
        std::size_t id = vars.create(prefix + "[" + m.to_string(poly::default_names(dimension)) + "]", kind);
        p.add_term(m, AffineExpr::variable(id));
    }
    return p;
}

AffinePolynomial make_storage_ansatz(VarRegistry& vars, std::size_t dimension, unsigned degree,
                                     const std::string& prefix, VarKind kind) {
    AffinePolynomial p(dimension);
    if (degree == 0) return p;
    for (const Monomial& m : poly::monomials_between(dimension, 1, degree)) {
        std::size_t id = vars.create(prefix + "[" + m.to_string(poly::default_names(dimension)) + "]", kind);
        p.add_term(m, AffineExpr::variable(id));
    }
    return p;
}

int body_degree(const AffinePolynomial& body) { return body.degree(); }

namespace {

using Point = std::vector<long long>;

Point to_point(const Monomial& m, long long scale = 1) {
    Point p(m.dimension());
    for (std::size_t i = 0; i < m.dimension(); ++i) p[i] = scale * static_cast<long long>(m[i]);
    return p;
}

long long cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Membership test for the convex hull of integer points. Exact in one and two
/// dimensions; in higher dimensions an outer approximation by the supporting
/// half-spaces with normals in {-1,0,1}^n, which can only keep extra points.
class NewtonPolytope {
public:
    explicit NewtonPolytope(std::vector<Point> pts) : dim_(pts.empty() ? 0 : pts[0].size()) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (dim_ == 2) {
            build_hull(pts);
        } else {
            pts_ = std::move(pts);
            if (dim_ > 2) build_directions();
        }
    }

    bool contains(const Point& q) const {
        if (dim_ == 1) {
            if (pts_.empty()) return false;
            return q[0] >= pts_.front()[0] && q[0] <= pts_.back()[0];
        }
        if (dim_ == 2) return hull_contains(q);
        for (std::size_t d = 0; d < dirs_.size(); ++d) {
            long long v = 0;
            for (std::size_t i = 0; i < dim_; ++i) v += dirs_[d][i] * q[i];
            if (v > support_[d]) return false;
        }
        return !pts_.empty();
    }

private:
    void build_hull(std::vector<Point>& pts) {
        if (pts.size() <= 2) {
            hull_ = pts;
            return;
        }
        std::vector<Point> h(2 * pts.size());
        std::size_t k = 0;
        for (const auto& p : pts) {
            while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
            h[k++] = p;
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
            while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
            h[k++] = pts[i];
        }
        h.resize(k - 1);
        hull_ = std::move(h);
    }

    bool hull_contains(const Point& q) const {
        if (hull_.empty()) return false;
        if (hull_.size() == 1) return q == hull_[0];
        if (hull_.size() == 2) {
            const Point &a = hull_[0], &b = hull_[1];
            if (cross(a, b, q) != 0) return false;
            return std::min(a[0], b[0]) <= q[0] && q[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= q[1] &&
                   q[1] <= std::max(a[1], b[1]);
        }
        for (std::size_t i = 0; i < hull_.size(); ++i)
            if (cross(hull_[i], hull_[(i + 1) % hull_.size()], q) < 0) return false;
        return true;
    }

    void build_directions() {
        std::size_t total = 1;
        for (std::size_t i = 0; i < dim_ && total < 100000; ++i) total *= 3;
        bool full = dim_ <= 8;
        if (full) {
            for (std::size_t code = 0; code < total; ++code) {
                Point d(dim_);
                std::size_t c = code;
                bool nonzero = false;
                for (std::size_t i = 0; i < dim_; ++i) {
                    d[i] = static_cast<long long>(c % 3) - 1;
                    c /= 3;
                    nonzero = nonzero || d[i] != 0;
                }
                if (nonzero) dirs_.push_back(std::move(d));
            }
        } else {
            for (std::size_t i = 0; i < dim_; ++i)
                for (long long s : {-1LL, 1LL}) {
                    Point d(dim_, 0);
                    d[i] = s;
                    dirs_.push_back(std::move(d));
                }
            dirs_.push_back(Point(dim_, 1));
            dirs_.push_back(Point(dim_, -1));
        }
        for (const auto& d : dirs_) {
            long long best = std::numeric_limits<long long>::min();
            for (const auto& p : pts_) {
                long long v = 0;
                for (std::size_t i = 0; i < dim_; ++i) v += d[i] * p[i];
                best = std::max(best, v);
            }
            support_.push_back(best);
        }
    }

    std::size_t dim_;
    std::vector<Point> pts_;
    std::vector<Point> hull_;
    std::vector<Point> dirs_;
    std::vector<long long> support_;
};

}  // namespace

GramBasis gram_basis_for(const AffinePolynomial& body, bool newton_prune) {
    GramBasis basis;
    int deg = body.degree();
    if (deg < 0) return basis;
    if (deg % 2 != 0)
        throw CompileError("odd-degree body (degree " + std::to_string(deg) + ") cannot be a sum of squares");
    std::vector<Monomial> candidates = poly::monomials_up_to(body.dimension(), static_cast<unsigned>(deg / 2));
    if (!newton_prune) {
        basis.z = std::move(candidates);
        return basis;
    }
    std::vector<Point> pts;
    std::set<Monomial, poly::GradedLex> support;
    for (const auto& kv : body.terms()) {
        pts.push_back(to_point(kv.first));
        support.insert(kv.first);
    }
    NewtonPolytope hull(std::move(pts));
    std::vector<Monomial> kept;
    for (const Monomial& m : candidates)
        if (hull.contains(to_point(m, 2))) kept.push_back(m);

    // A basis element whose square has coefficient zero and arises from no
    // other product forces a zero diagonal entry, hence a zero row.
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<Monomial, int, poly::GradedLex> offdiag;
        for (std::size_t i = 0; i < kept.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) offdiag[kept[i] * kept[j]]++;
        std::vector<Monomial> next;
        for (const Monomial& m : kept) {
            Monomial sq = m * m;
            if (support.count(sq) || offdiag.count(sq)) {
                next.push_back(m);
            } else {
                changed = true;
            }
        }
        kept = std::move(next);
    }
    basis.z = std::move(kept);
    return basis;
}

SosConstraint make_sos_constraint(AffinePolynomial body, std::string label, bool newton_prune) {
    SosConstraint c;
    c.basis = gram_basis_for(body, newton_prune);
    c.body = std::move(body);
    c.label = std::move(label);
    return c;
}

unsigned default_multiplier_degree(const AffinePolynomial& body, const poly::RationalPolynomial& g) {
    int d = body.degree() - g.degree();
    if (d < 0) d = 0;
    return static_cast<unsigned>(d - d % 2);
}

unsigned strict_multiplier_degree(const AffinePolynomial& body, const poly::RationalPolynomial& g) {
    int d = body.degree() - g.degree() - 1;
    if (d < 0) d = 0;
    return static_cast<unsigned>(d - d % 2);
}

SProcedure s_procedure(VarRegistry& vars, const AffinePolynomial& body, const poly::RationalPolynomial& g,
                       unsigned multiplier_degree, const std::string& prefix, bool newton_prune) {
    SProcedure out;
    out.multiplier = make_polynomial_ansatz(vars, body.dimension(), multiplier_degree, prefix, VarKind::Multiplier);
    out.body = body - g * out.multiplier;
    out.multiplier_constraint = make_sos_constraint(out.multiplier, prefix + " in SoS", newton_prune);
    return out;
}

namespace {

constexpr std::size_t kNoBlock = std::numeric_limits<std::size_t>::max();

void append_affine(sdp::LinearFunctional& row, Rational& rhs, const AffineExpr& a) {
    for (const auto& [id, w] : a.weights()) row.free_terms.push_back({id, Rational(-w)});
    rhs = a.constant();
}

}  // namespace

CompiledProgram compile(const std::vector<SosConstraint>& constraints, const std::vector<PsdConstraint>& psd,
                        const VarRegistry& vars, const Objective& objective) {
    CompiledProgram out;
    sdp::SdpProblem& p = out.problem;
    p.free_vars = vars.size();
    out.num_decision_vars = vars.size();
    std::vector<std::string> names;

    for (const SosConstraint& c : constraints) {
        const std::vector<Monomial>& z = c.basis.z;
        for (const auto& m : z)
            if (m.dimension() != c.body.dimension()) throw CompileError("basis dimension mismatch in " + c.label);
        std::size_t block = kNoBlock;
        if (!z.empty()) {
            block = p.block_sizes.size();
            p.block_sizes.push_back(z.size());
        }
        out.sos_blocks.push_back(block);
        out.bases.push_back(c.basis);

        std::map<Monomial, std::vector<std::pair<std::size_t, std::size_t>>, poly::GradedLex> products;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) products[z[i] * z[j]].emplace_back(i, j);
        std::set<Monomial, poly::GradedLex> all;
        for (const auto& kv : products) all.insert(kv.first);
        for (const auto& kv : c.body.terms()) all.insert(kv.first);

        for (const Monomial& mu : all) {
            sdp::LinearFunctional row;
            Rational rhs(0);
            if (auto it = products.find(mu); it != products.end())
                for (auto [i, j] : it->second) row.block_terms.push_back({block, i, j, Rational(i == j ? 1 : 2)});
            AffineExpr coef = c.body.coefficient(mu);
            append_affine(row, rhs, coef);
            if (row.block_terms.empty() && coef.is_constant()) {
                if (names.empty()) names = poly::default_names(mu.dimension());
                throw CompileError("uncoverable monomial " + mu.to_string(names) + " in constraint '" + c.label +
                                   "'");
            }
            p.rows.push_back(std::move(row));
            p.rhs.push_back(std::move(rhs));
        }
    }

    for (const PsdConstraint& c : psd) {
        std::size_t k = c.matrix.size();
        if (k == 0) throw CompileError("empty PSD constraint '" + c.label + "'");
        for (const auto& r : c.matrix)
            if (r.size() != k) throw CompileError("PSD constraint '" + c.label + "' is not square");
        std::size_t block = p.block_sizes.size();
        p.block_sizes.push_back(k);
        out.psd_blocks.push_back(block);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                sdp::LinearFunctional row;
                Rational rhs(0);
                row.block_terms.push_back({block, i, j, Rational(1)});
                append_affine(row, rhs, c.matrix[i][j]);
                p.rows.push_back(std::move(row));
                p.rhs.push_back(std::move(rhs));
            }
    }

    switch (objective.kind) {
    case Objective::Kind::Feasibility:
        p.sense = sdp::Sense::Minimize;
        break;
    case Objective::Kind::Minimize:
    case Objective::Kind::Maximize:
        if (objective.var >= vars.size()) throw CompileError("empty objective: unknown decision variable");
        p.objective.free_terms.push_back({objective.var, Rational(1)});
        p.sense = objective.kind == Objective::Kind::Minimize ? sdp::Sense::Minimize : sdp::Sense::Maximize;
        break;
    }
    p.validate();
    return out;
}

std::vector<Real> decision_values(const sdp::SdpSolution& s, std::size_t count) {
    if (s.free_values.size() < count) throw std::invalid_argument("solution has too few free values");
    return std::vector<Real>(s.free_values.begin(), s.free_values.begin() + static_cast<std::ptrdiff_t>(count));
}

}  // namespace sosbounds::sosc
