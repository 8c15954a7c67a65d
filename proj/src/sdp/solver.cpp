#include "sosbounds/sdp/solver.hpp"

#include "sosbounds/sdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>

namespace sosbounds::sdp {

namespace {

// ---------------------------------------------------------------------------
// Exact presolve

struct SparseRow {
    std::vector<BlockTerm> blocks;
    std::map<std::size_t, Rational> free;
    Rational rhs;
    std::size_t original = 0;
    bool removed = false;
};

struct Elimination {
    Rational constant;
    std::map<std::size_t, Rational> weights;
};

struct Presolved {
    std::vector<SparseRow> rows;
    std::vector<BlockTerm> objective_blocks;
    std::map<std::size_t, Rational> objective_free;
    Rational offset{0};
    std::vector<std::optional<Elimination>> eliminated;
    std::vector<std::size_t> kept_free;
    std::size_t dropped_rows = 0;
    bool unbounded = false;
};

/// Replaces w_p in Σ t_j w_j by e; returns the constant that appears.
Rational substitute(std::map<std::size_t, Rational>& terms, std::size_t p, const Elimination& e) {
    auto it = terms.find(p);
    if (it == terms.end()) return Rational(0);
    Rational c = it->second;
    terms.erase(it);
    for (const auto& [k, w] : e.weights) {
        auto [jt, inserted] = terms.try_emplace(k, Rational(c * w));
        if (!inserted) {
            jt->second += c * w;
            if (jt->second == 0) terms.erase(jt);
        }
    }
    return c * e.constant;
}

Presolved presolve(const SdpProblem& p, bool negate) {
    Presolved ps;
    ps.eliminated.resize(p.free_vars);
    std::vector<SparseRow> rows(p.rows.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        rows[i].blocks = p.rows[i].block_terms;
        for (const auto& t : p.rows[i].free_terms) rows[i].free[t.index] += t.coef;
        for (auto it = rows[i].free.begin(); it != rows[i].free.end();)
            it = it->second == 0 ? rows[i].free.erase(it) : std::next(it);
        rows[i].rhs = p.rhs[i];
        rows[i].original = i;
    }
    Rational sign = negate ? Rational(-1) : Rational(1);
    for (auto t : p.objective.block_terms) {
        t.coef *= sign;
        ps.objective_blocks.push_back(t);
    }
    for (const auto& t : p.objective.free_terms) ps.objective_free[t.index] += sign * t.coef;
    for (auto it = ps.objective_free.begin(); it != ps.objective_free.end();)
        it = it->second == 0 ? ps.objective_free.erase(it) : std::next(it);

    for (std::size_t r = 0; r < rows.size(); ++r) {
        SparseRow& row = rows[r];
        if (!row.blocks.empty()) continue;
        row.removed = true;
        if (row.free.empty()) {
            if (row.rhs != 0)
                throw StructuralInfeasibility("equality " + std::to_string(r) +
                                              " is inconsistent with the other linear equalities");
            ++ps.dropped_rows;
            continue;
        }
        std::size_t pivot = row.free.begin()->first;
        for (const auto& kv : row.free)
            if (!ps.objective_free.count(kv.first)) {
                pivot = kv.first;
                break;
            }
        Rational a = row.free.at(pivot);
        Elimination e;
        e.constant = row.rhs / a;
        for (const auto& [k, w] : row.free)
            if (k != pivot) e.weights[k] = -w / a;
        for (auto& other : rows) {
            if (other.removed) continue;
            other.rhs -= substitute(other.free, pivot, e);
        }
        ps.offset += substitute(ps.objective_free, pivot, e);
        for (auto& prev : ps.eliminated)
            if (prev) prev->constant += substitute(prev->weights, pivot, e);
        ps.eliminated[pivot] = e;
    }

    // Column rank of the remaining free block, objective columns first.
    std::vector<std::size_t> order;
    for (const auto& kv : ps.objective_free)
        if (!ps.eliminated[kv.first]) order.push_back(kv.first);
    for (std::size_t j = 0; j < p.free_vars; ++j)
        if (!ps.eliminated[j] && !ps.objective_free.count(j)) order.push_back(j);
    std::vector<std::size_t> live_rows;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!rows[r].removed) live_rows.push_back(r);
    std::vector<std::vector<double>> basis;
    for (std::size_t j : order) {
        std::vector<double> col(live_rows.size(), 0.0);
        double norm0 = 0;
        for (std::size_t i = 0; i < live_rows.size(); ++i) {
            auto it = rows[live_rows[i]].free.find(j);
            if (it != rows[live_rows[i]].free.end()) col[i] = to_double(it->second);
            norm0 += col[i] * col[i];
        }
        norm0 = std::sqrt(norm0);
        double norm = norm0;
        if (norm0 > 0) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) {
                    double d = 0;
                    for (std::size_t i = 0; i < col.size(); ++i) d += q[i] * col[i];
                    for (std::size_t i = 0; i < col.size(); ++i) col[i] -= d * q[i];
                }
            norm = 0;
            for (double v : col) norm += v * v;
            norm = std::sqrt(norm);
        }
        bool dependent = norm0 == 0 || norm <= 1e-10 * norm0;
        if (!dependent) {
            for (double& v : col) v /= norm;
            basis.push_back(std::move(col));
            ps.kept_free.push_back(j);
            continue;
        }
        bool has_cost = ps.objective_free.count(j) > 0;
        if (!has_cost) {
            Elimination zero;
            zero.constant = 0;
            ps.eliminated[j] = zero;
            for (std::size_t r : live_rows) rows[r].free.erase(j);
        } else if (norm0 == 0) {
            ps.unbounded = true;
            ps.kept_free.push_back(j);
        } else {
            ps.kept_free.push_back(j);
        }
    }
    std::sort(ps.kept_free.begin(), ps.kept_free.end());
    for (std::size_t r : live_rows) ps.rows.push_back(std::move(rows[r]));
    return ps;
}

// ---------------------------------------------------------------------------
// Working-precision data

struct Entry {
    std::size_t r, c;
    Real a;
};

struct RowPart {
    std::size_t row;
    std::vector<Entry> entries;
};

struct Data {
    std::vector<std::size_t> n;
    std::size_t total_dim = 0;
    std::size_t m = 0;
    std::size_t nf = 0;
    std::vector<std::vector<RowPart>> block_rows;
    RealMatrix bmat;  // m × nf
    RealVector b;
    std::vector<Real> row_scale;
    std::vector<RealMatrix> c;
    RealVector cw;
    Real norm_b, norm_c;
};

Data build(const SdpProblem& p, const Presolved& ps) {
    Data d;
    d.n = p.block_sizes;
    for (std::size_t k : d.n) d.total_dim += k;
    d.m = ps.rows.size();
    d.nf = ps.kept_free.size();
    std::map<std::size_t, std::size_t> free_index;
    for (std::size_t j = 0; j < ps.kept_free.size(); ++j) free_index[ps.kept_free[j]] = j;
    d.block_rows.resize(d.n.size());
    d.bmat = RealMatrix(d.m, d.nf);
    d.b.assign(d.m, Real(0));
    d.row_scale.assign(d.m, Real(1));
    for (std::size_t i = 0; i < d.m; ++i) {
        const SparseRow& row = ps.rows[i];
        double biggest = 0;
        for (const auto& t : row.blocks) biggest = std::max(biggest, std::fabs(to_double(t.coef)));
        for (const auto& kv : row.free) biggest = std::max(biggest, std::fabs(to_double(kv.second)));
        int e = 0;
        std::frexp(biggest > 0 ? biggest : 1.0, &e);
        Real s(1);
        mpfr_mul_2si(s.backend().data(), s.backend().data(), 1 - e, MPFR_RNDN);
        d.row_scale[i] = s;
        std::map<std::size_t, RowPart> parts;
        for (const auto& t : row.blocks) {
            RowPart& part = parts[t.block];
            part.row = i;
            part.entries.push_back({t.row, t.col, Real(to_real(t.coef) * s)});
        }
        for (auto& [k, part] : parts) {
            // Merge repeated entries so the Schur kernel sees each position once.
            std::map<std::pair<std::size_t, std::size_t>, Real> merged;
            for (auto& en : part.entries) {
                auto [it, inserted] = merged.try_emplace({en.r, en.c}, en.a);
                if (!inserted) it->second += en.a;
            }
            part.entries.clear();
            for (auto& [rc, a] : merged)
                if (a != 0) part.entries.push_back({rc.first, rc.second, a});
            d.block_rows[k].push_back(std::move(part));
        }
        for (const auto& [j, coef] : row.free) d.bmat(i, free_index.at(j)) = to_real(coef) * s;
        d.b[i] = to_real(row.rhs) * s;
    }
    d.c.reserve(d.n.size());
    for (std::size_t k : d.n) d.c.emplace_back(k, k);
    for (const auto& t : ps.objective_blocks) {
        Real v = to_real(t.coef);
        if (t.row == t.col) {
            d.c[t.block](t.row, t.row) += v;
        } else {
            d.c[t.block](t.row, t.col) += v / 2;
            d.c[t.block](t.col, t.row) += v / 2;
        }
    }
    d.cw.assign(d.nf, Real(0));
    for (const auto& [j, coef] : ps.objective_free) {
        auto it = free_index.find(j);
        if (it != free_index.end()) d.cw[it->second] = to_real(coef);
    }
    d.norm_b = 0;
    for (const auto& v : d.b) d.norm_b = std::max<Real>(d.norm_b, abs(v));
    d.norm_c = 0;
    for (const auto& ck : d.c)
        for (const auto& v : ck.data()) d.norm_c = std::max<Real>(d.norm_c, abs(v));
    for (const auto& v : d.cw) d.norm_c = std::max<Real>(d.norm_c, abs(v));
    return d;
}

// ---------------------------------------------------------------------------
// Dense kernels

using Blocks = std::vector<RealMatrix>;

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    RealMatrix c(n, m);
    Real t;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            mpfr_ptr acc = c(i, j).backend().data();
            mpfr_set_zero(acc, 1);
            for (std::size_t l = 0; l < k; ++l)
                mpfr_fma(acc, a(i, l).backend().data(), b(l, j).backend().data(), acc, MPFR_RNDN);
        }
    return c;
}

RealMatrix transpose(const RealMatrix& a) { return a.transposed(); }

void symmetrize(RealMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            Real v = (a(i, j) + a(j, i)) / 2;
            a(i, j) = v;
            a(j, i) = v;
        }
}

Real inner(const RealMatrix& a, const RealMatrix& b) {
    Real s(0);
    for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

Real max_abs(const RealMatrix& a) {
    Real s(0);
    for (const auto& v : a.data()) s = std::max<Real>(s, abs(v));
    return s;
}

Real max_abs(const RealVector& a) {
    Real s(0);
    for (const auto& v : a) s = std::max<Real>(s, abs(v));
    return s;
}

/// Cholesky with growing diagonal shifts when the plain factorization fails.
bool robust_cholesky(RealMatrix& a, unsigned bits, int* shifts = nullptr) {
    RealMatrix copy = a;
    if (linalg::cholesky(a)) return true;
    Real maxdiag(0);
    for (std::size_t i = 0; i < copy.rows(); ++i) maxdiag = std::max<Real>(maxdiag, abs(copy(i, i)));
    if (maxdiag == 0) maxdiag = 1;
    Real delta = maxdiag;
    mpfr_mul_2si(delta.backend().data(), delta.backend().data(), -static_cast<long>(bits) / 2 - 8, MPFR_RNDN);
    for (int attempt = 0; attempt < 12; ++attempt) {
        a = copy;
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += delta;
        if (linalg::cholesky(a)) {
            if (shifts) ++*shifts;
            return true;
        }
        delta *= 100;
    }
    return false;
}

struct Scaling {
    RealMatrix lx;     // chol(X)
    RealMatrix ls;     // chol(S)
    RealMatrix g;      // X̃ = G⁻¹XG⁻ᵀ = Λ, S̃ = GᵀSG = Λ
    RealMatrix ginv;
    RealMatrix w;      // GGᵀ
    RealVector lambda;
};

bool nt_scaling(const RealMatrix& x, const RealMatrix& s, Scaling& sc, unsigned bits) {
    std::size_t n = x.rows();
    sc.lx = x;
    if (!linalg::cholesky(sc.lx)) return false;
    sc.ls = s;
    if (!linalg::cholesky(sc.ls)) return false;
    (void)bits;
    RealMatrix t = matmul(transpose(sc.lx), matmul(s, sc.lx));
    symmetrize(t);
    auto eig = linalg::symmetric_eigen(t, true);
    sc.lambda.resize(n);
    std::vector<Real> root(n), invroot(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(eig.values[i] > 0)) return false;
        sc.lambda[i] = sqrt(eig.values[i]);
        root[i] = sqrt(sc.lambda[i]);
        invroot[i] = 1 / root[i];
    }
    RealMatrix lv = matmul(sc.lx, eig.vectors);
    sc.g = RealMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sc.g(i, j) = lv(i, j) * invroot[j];
    RealMatrix vt_linv = matmul(transpose(eig.vectors), linalg::lower_inverse(sc.lx));
    sc.ginv = RealMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sc.ginv(i, j) = root[i] * vt_linv(i, j);
    sc.w = matmul(sc.g, transpose(sc.g));
    symmetrize(sc.w);
    return true;
}

/// M_ij += ⟨A_i, W A_j W⟩ for the rows touching one block.
void schur_block(const std::vector<RowPart>& rows, const RealMatrix& w, RealMatrix& m) {
    Real t, in, acc;
    mpfr_ptr tp = t.backend().data(), ip = in.backend().data(), ap = acc.backend().data();
    for (std::size_t ii = 0; ii < rows.size(); ++ii) {
        const RowPart& ai = rows[ii];
        for (std::size_t jj = 0; jj <= ii; ++jj) {
            const RowPart& aj = rows[jj];
            mpfr_set_zero(ap, 1);
            for (const Entry& e : ai.entries) {
                mpfr_set_zero(ip, 1);
                for (const Entry& f : aj.entries) {
                    mpfr_fmma(tp, w(e.r, f.r).backend().data(), w(e.c, f.c).backend().data(),
                              w(e.r, f.c).backend().data(), w(e.c, f.r).backend().data(), MPFR_RNDN);
                    mpfr_fma(ip, f.a.backend().data(), tp, ip, MPFR_RNDN);
                }
                mpfr_fma(ap, e.a.backend().data(), ip, ap, MPFR_RNDN);
            }
            mpfr_div_2ui(ap, ap, 1, MPFR_RNDN);
            m(ai.row, aj.row) += acc;
            if (ai.row != aj.row) m(aj.row, ai.row) += acc;
        }
    }
}

class Ipm {
public:
    Ipm(const Data& d, const SolverSettings& s) : d_(d), s_(s) {}

    void cold_start() {
        x_.clear();
        s_blocks_.clear();
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            Real nk(static_cast<double>(d_.n[k]));
            Real xi = std::max<Real>(Real(10), sqrt(nk));
            Real eta = xi;
            for (const RowPart& part : d_.block_rows[k]) {
                Real fro(0);
                for (const Entry& e : part.entries) fro += e.a * e.a * (e.r == e.c ? 1 : Real(0.5));
                fro = sqrt(fro);
                xi = std::max<Real>(xi, nk * (1 + abs(d_.b[part.row])) / (1 + fro));
                eta = std::max<Real>(eta, fro);
            }
            Real cn(0);
            for (const auto& v : d_.c[k].data()) cn += v * v;
            eta = std::max<Real>(eta, sqrt(cn));
            eta = std::max<Real>(eta, max_abs(d_.cw) * 10);
            x_.push_back(RealMatrix::identity(d_.n[k]));
            s_blocks_.push_back(RealMatrix::identity(d_.n[k]));
            for (std::size_t i = 0; i < d_.n[k]; ++i) {
                x_[k](i, i) = xi;
                s_blocks_[k](i, i) = eta;
            }
        }
        w_.assign(d_.nf, Real(0));
        y_.assign(d_.m, Real(0));
    }

    void warm_start(const Blocks& x, const Blocks& s, const RealVector& w, const RealVector& y, const Real& shift) {
        x_ = x;
        s_blocks_ = s;
        for (auto* set : {&x_, &s_blocks_})
            for (auto& blk : *set)
                for (std::size_t i = 0; i < blk.rows(); ++i) blk(i, i) += shift;
        w_ = w;
        y_ = y;
    }

    Status run(int& iterations, std::string& message) {
        const Real tol(s_.effective_feasibility_tol());
        const Real gtol(s_.effective_gap_tol());
        const Real threshold(s_.infeasibility_threshold);
        const bool feasibility = s_.mode == Mode::FeasibilityOnly;
        int tiny_steps = 0;
        for (int it = 0;; ++it) {
            iterations = it;
            residuals();
            if (s_.verbose)
                std::cerr << "it " << it << " pobj " << to_double(pobj_) << " dobj " << to_double(dobj_) << " pinf "
                          << to_double(pinf_) << " dinf " << to_double(dinf_) << " gap " << to_double(relgap_)
                          << " mu " << to_double(mu_) << '\n';
            if (feasibility ? pinf_ <= tol : (pinf_ <= tol && dinf_ <= tol && relgap_ <= gtol)) return Status::Optimal;
            if (dobj_ > threshold * (1 + d_.norm_c) && dray_ <= Real(1e-8)) {
                message = "dual ray certifies primal infeasibility";
                return Status::PrimalInfeasible;
            }
            if (-pobj_ > threshold * (1 + d_.norm_b) && pray_ <= Real(1e-8)) {
                message = "primal ray certifies dual infeasibility";
                return Status::DualInfeasible;
            }
            if (it >= s_.max_iterations) return Status::IterLimit;
            Real ap, ad;
            if (!step(ap, ad, message)) return Status::Stalled;
            if (ap < Real(1e-10) && ad < Real(1e-10)) {
                if (++tiny_steps >= 3) {
                    message = "step lengths collapsed";
                    return Status::Stalled;
                }
            } else {
                tiny_steps = 0;
            }
        }
    }

    const Blocks& x() const { return x_; }
    const Blocks& s() const { return s_blocks_; }
    const RealVector& w() const { return w_; }
    const RealVector& y() const { return y_; }
    const Real& pobj() const { return pobj_; }
    const Real& dobj() const { return dobj_; }
    double pinf() const { return to_double(pinf_); }
    double dinf() const { return to_double(dinf_); }
    double relgap() const { return to_double(relgap_); }

private:
    RealVector apply_a(const Blocks& z) const {
        RealVector out(d_.m, Real(0));
        for (std::size_t k = 0; k < d_.n.size(); ++k)
            for (const RowPart& part : d_.block_rows[k]) {
                Real& o = out[part.row];
                for (const Entry& e : part.entries) o += e.a * z[k](e.r, e.c);
            }
        return out;
    }

    Blocks apply_at(const RealVector& y) const {
        Blocks out;
        for (std::size_t k : d_.n) out.emplace_back(k, k);
        for (std::size_t k = 0; k < d_.n.size(); ++k)
            for (const RowPart& part : d_.block_rows[k]) {
                const Real& yi = y[part.row];
                if (yi == 0) continue;
                for (const Entry& e : part.entries) {
                    if (e.r == e.c) {
                        out[k](e.r, e.r) += e.a * yi;
                    } else {
                        Real h = e.a * yi / 2;
                        out[k](e.r, e.c) += h;
                        out[k](e.c, e.r) += h;
                    }
                }
            }
        return out;
    }

    RealVector apply_b(const RealVector& w) const {
        RealVector out(d_.m, Real(0));
        for (std::size_t i = 0; i < d_.m; ++i)
            for (std::size_t j = 0; j < d_.nf; ++j)
                if (d_.bmat(i, j) != 0) out[i] += d_.bmat(i, j) * w[j];
        return out;
    }

    RealVector apply_bt(const RealVector& y) const {
        RealVector out(d_.nf, Real(0));
        for (std::size_t i = 0; i < d_.m; ++i)
            for (std::size_t j = 0; j < d_.nf; ++j)
                if (d_.bmat(i, j) != 0) out[j] += d_.bmat(i, j) * y[i];
        return out;
    }

    void residuals() {
        RealVector ax = apply_a(x_);
        RealVector bw = apply_b(w_);
        rp_.assign(d_.m, Real(0));
        Real rp_norm(0), ax_norm(0);
        for (std::size_t i = 0; i < d_.m; ++i) {
            rp_[i] = d_.b[i] - ax[i] - bw[i];
            rp_norm = std::max<Real>(rp_norm, abs(rp_[i]));
            ax_norm = std::max<Real>(ax_norm, abs(ax[i] + bw[i]));
        }
        Blocks aty = apply_at(y_);
        rd_.clear();
        Real rd_norm(0), aty_norm(0);
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            RealMatrix r(d_.n[k], d_.n[k]);
            for (std::size_t i = 0; i < r.data().size(); ++i) {
                r.data()[i] = d_.c[k].data()[i] - aty[k].data()[i] - s_blocks_[k].data()[i];
                rd_norm = std::max<Real>(rd_norm, abs(r.data()[i]));
                aty_norm = std::max<Real>(aty_norm, abs(aty[k].data()[i] + s_blocks_[k].data()[i]));
            }
            rd_.push_back(std::move(r));
        }
        RealVector bty = apply_bt(y_);
        rw_.assign(d_.nf, Real(0));
        for (std::size_t j = 0; j < d_.nf; ++j) {
            rw_[j] = d_.cw[j] - bty[j];
            rd_norm = std::max<Real>(rd_norm, abs(rw_[j]));
            aty_norm = std::max<Real>(aty_norm, abs(bty[j]));
        }
        pobj_ = 0;
        for (std::size_t k = 0; k < d_.n.size(); ++k) pobj_ += inner(d_.c[k], x_[k]);
        for (std::size_t j = 0; j < d_.nf; ++j) pobj_ += d_.cw[j] * w_[j];
        dobj_ = 0;
        for (std::size_t i = 0; i < d_.m; ++i) dobj_ += d_.b[i] * y_[i];
        Real xs(0);
        for (std::size_t k = 0; k < d_.n.size(); ++k) xs += inner(x_[k], s_blocks_[k]);
        mu_ = d_.total_dim ? Real(xs / d_.total_dim) : Real(0);
        pinf_ = rp_norm / (1 + d_.norm_b);
        dinf_ = rd_norm / (1 + d_.norm_c);
        relgap_ = abs(pobj_ - dobj_) / (1 + abs(pobj_) + abs(dobj_));
        dray_ = dobj_ > 0 ? Real(aty_norm > 0 ? Real((rd_norm + d_.norm_c) / dobj_) : Real(0)) : Real(1);
        pray_ = pobj_ < 0 ? Real((rp_norm + d_.norm_b) / -pobj_) : Real(1);
    }

    struct Direction {
        Blocks dx, ds;
        RealVector dw, dy;
    };

    bool factor(std::string& message) {
        unsigned bits = s_.mantissa_bits;
        sc_.resize(d_.n.size());
        for (std::size_t k = 0; k < d_.n.size(); ++k)
            if (!nt_scaling(x_[k], s_blocks_[k], sc_[k], bits)) {
                message = "iterate left the cone";
                return false;
            }
        m_ = RealMatrix(d_.m, d_.m);
        for (std::size_t k = 0; k < d_.n.size(); ++k) schur_block(d_.block_rows[k], sc_[k].w, m_);
        if (!robust_cholesky(m_, bits)) {
            message = "Schur complement factorization failed";
            return false;
        }
        if (d_.nf > 0) {
            yb_ = RealMatrix(d_.m, d_.nf);
            RealVector col(d_.m);
            for (std::size_t j = 0; j < d_.nf; ++j) {
                for (std::size_t i = 0; i < d_.m; ++i) col[i] = d_.bmat(i, j);
                linalg::forward_solve(m_, col);
                for (std::size_t i = 0; i < d_.m; ++i) yb_(i, j) = col[i];
            }
            k_ = matmul(transpose(yb_), yb_);
            symmetrize(k_);
            if (!robust_cholesky(k_, bits)) {
                message = "free-variable system factorization failed";
                return false;
            }
        }
        return true;
    }

    Direction solve_direction(const Blocks& rc) const {
        Direction dir;
        Blocks wrdw;
        for (std::size_t k = 0; k < d_.n.size(); ++k) wrdw.push_back(matmul(sc_[k].w, matmul(rd_[k], sc_[k].w)));
        RealVector arc = apply_a(rc), awrdw = apply_a(wrdw);
        RealVector v(d_.m);
        for (std::size_t i = 0; i < d_.m; ++i) v[i] = rp_[i] - arc[i] + awrdw[i];
        linalg::forward_solve(m_, v);
        dir.dw.assign(d_.nf, Real(0));
        if (d_.nf > 0) {
            RealVector rhs(d_.nf);
            for (std::size_t j = 0; j < d_.nf; ++j) {
                Real s(0);
                for (std::size_t i = 0; i < d_.m; ++i) s += yb_(i, j) * v[i];
                rhs[j] = s - rw_[j];
            }
            linalg::forward_solve(k_, rhs);
            linalg::backward_solve(k_, rhs);
            dir.dw = rhs;
            for (std::size_t i = 0; i < d_.m; ++i) {
                Real s(0);
                for (std::size_t j = 0; j < d_.nf; ++j) s += yb_(i, j) * dir.dw[j];
                v[i] -= s;
            }
        }
        linalg::backward_solve(m_, v);
        dir.dy = std::move(v);
        Blocks aty = apply_at(dir.dy);
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            RealMatrix ds(d_.n[k], d_.n[k]);
            for (std::size_t i = 0; i < ds.data().size(); ++i) ds.data()[i] = rd_[k].data()[i] - aty[k].data()[i];
            RealMatrix wdsw = matmul(sc_[k].w, matmul(ds, sc_[k].w));
            RealMatrix dx(d_.n[k], d_.n[k]);
            for (std::size_t i = 0; i < dx.data().size(); ++i) dx.data()[i] = rc[k].data()[i] - wdsw.data()[i];
            symmetrize(dx);
            dir.dx.push_back(std::move(dx));
            dir.ds.push_back(std::move(ds));
        }
        return dir;
    }

    void step_lengths(const Direction& dir, Real& ap, Real& ad) const {
        Real cap(1e30);
        ap = cap;
        ad = cap;
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            ap = std::min<Real>(ap, linalg::max_step(sc_[k].lx, dir.dx[k], cap));
            ad = std::min<Real>(ad, linalg::max_step(sc_[k].ls, dir.ds[k], cap));
        }
    }

    bool step(Real& ap_out, Real& ad_out, std::string& message) {
        if (!factor(message)) return false;
        // Predictor: R_c = −X.
        Blocks rc;
        for (const auto& x : x_) {
            RealMatrix r = x;
            for (auto& v : r.data()) v = -v;
            rc.push_back(std::move(r));
        }
        Direction pred = solve_direction(rc);
        Real ap, ad;
        step_lengths(pred, ap, ad);
        Real one(1);
        Real ap1 = std::min(ap, one), ad1 = std::min(ad, one);
        Real mu_aff(0);
        if (d_.total_dim > 0) {
            for (std::size_t k = 0; k < d_.n.size(); ++k) {
                RealMatrix xa = x_[k], sa = s_blocks_[k];
                for (std::size_t i = 0; i < xa.data().size(); ++i) {
                    xa.data()[i] += ap1 * pred.dx[k].data()[i];
                    sa.data()[i] += ad1 * pred.ds[k].data()[i];
                }
                mu_aff += inner(xa, sa);
            }
            mu_aff /= d_.total_dim;
        }
        Real sigma(0);
        if (mu_ > 0) {
            Real ratio = std::max<Real>(Real(0), mu_aff / mu_);
            Real mn = std::min(ap1, ad1);
            Real expon = std::max<Real>(Real(1), 3 * mn * mn);
            sigma = std::min<Real>(Real(1), pow(ratio, expon));
        }
        // Corrector in the scaled space.
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            const Scaling& sc = sc_[k];
            std::size_t n = d_.n[k];
            RealMatrix dxt = matmul(sc.ginv, matmul(pred.dx[k], transpose(sc.ginv)));
            RealMatrix dst = matmul(transpose(sc.g), matmul(pred.ds[k], sc.g));
            RealMatrix cross = matmul(dxt, dst);
            RealMatrix t(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Real v = -(cross(i, j) + cross(j, i));
                    if (i == j) v += 2 * sigma * mu_ - 2 * sc.lambda[i] * sc.lambda[i];
                    t(i, j) = v / (sc.lambda[i] + sc.lambda[j]);
                }
            rc[k] = matmul(sc.g, matmul(t, transpose(sc.g)));
            symmetrize(rc[k]);
        }
        Direction corr = solve_direction(rc);
        step_lengths(corr, ap, ad);
        Real gamma = std::min<Real>(Real(s_.step_fraction), Real(0.9) + Real(0.09) * std::min(ap1, ad1));
        ap = std::min<Real>(one, Real(gamma * ap));
        ad = std::min<Real>(one, Real(gamma * ad));
        for (std::size_t k = 0; k < d_.n.size(); ++k) {
            for (std::size_t i = 0; i < x_[k].data().size(); ++i) {
                x_[k].data()[i] += ap * corr.dx[k].data()[i];
                s_blocks_[k].data()[i] += ad * corr.ds[k].data()[i];
            }
            symmetrize(x_[k]);
            symmetrize(s_blocks_[k]);
        }
        for (std::size_t j = 0; j < d_.nf; ++j) w_[j] += ap * corr.dw[j];
        for (std::size_t i = 0; i < d_.m; ++i) y_[i] += ad * corr.dy[i];
        ap_out = ap;
        ad_out = ad;
        return true;
    }

    const Data& d_;
    const SolverSettings& s_;
    Blocks x_, s_blocks_;
    RealVector w_, y_;
    RealVector rp_, rw_;
    Blocks rd_;
    Real pobj_, dobj_, mu_, pinf_, dinf_, relgap_, dray_, pray_;
    std::vector<Scaling> sc_;
    RealMatrix m_, yb_, k_;
};

SdpSolution assemble(const SdpProblem& p, const Presolved& ps, const Data& d, const Ipm& ipm, Status status,
                     int iterations, const std::string& message, const SolverSettings& s) {
    SdpSolution sol;
    sol.status = status;
    sol.iterations = iterations;
    sol.message = message;
    sol.mantissa_bits = s.mantissa_bits;
    sol.blocks = ipm.x();
    sol.dual_blocks = ipm.s();
    Real sign = p.sense == Sense::Maximize ? Real(-1) : Real(1);
    Real offset = to_real(ps.offset);
    sol.primal_objective = sign * (ipm.pobj() + offset);
    sol.dual_objective = sign * (ipm.dobj() + offset);
    sol.primal_residual = ipm.pinf();
    sol.dual_residual = ipm.dinf();
    sol.gap = ipm.relgap();

    sol.free_values.assign(p.free_vars, Real(0));
    for (std::size_t j = 0; j < ps.kept_free.size(); ++j) sol.free_values[ps.kept_free[j]] = ipm.w()[j];
    for (std::size_t j = 0; j < p.free_vars; ++j) {
        if (!ps.eliminated[j]) continue;
        const Elimination& e = *ps.eliminated[j];
        Real v = to_real(e.constant);
        for (const auto& [k, c] : e.weights) v += to_real(c) * sol.free_values[k];
        sol.free_values[j] = v;
    }
    sol.duals.assign(p.rows.size(), Real(0));
    for (std::size_t i = 0; i < ps.rows.size(); ++i)
        sol.duals[ps.rows[i].original] = sign * ipm.y()[i] * d.row_scale[i];
    return sol;
}

SdpSolution solve_impl(const SdpProblem& problem, const SolverSettings& settings, const SdpSolution* warm) {
    settings.validate();
    problem.validate();
    PrecisionGuard guard(settings.mantissa_bits);
    Presolved ps = presolve(problem, problem.sense == Sense::Maximize);
    Data d = build(problem, ps);
    Ipm ipm(d, settings);
    if (ps.unbounded) {
        ipm.cold_start();
        int iters = 0;
        std::string msg;
        SdpSolution sol = assemble(problem, ps, d, ipm, Status::DualInfeasible, iters,
                                   "objective variable appears in no constraint", settings);
        return sol;
    }
    int iterations = 0;
    std::string message;
    Status status = Status::Stalled;
    bool done = false;
    if (warm && warm->blocks.size() == d.n.size() && warm->dual_blocks.size() == d.n.size()) {
        Blocks wx, ws;
        for (std::size_t k = 0; k < d.n.size(); ++k) {
            RealMatrix a(d.n[k], d.n[k]), b(d.n[k], d.n[k]);
            for (std::size_t i = 0; i < a.data().size(); ++i) {
                a.data()[i] = at_working_precision(warm->blocks[k].data()[i]);
                b.data()[i] = at_working_precision(warm->dual_blocks[k].data()[i]);
            }
            wx.push_back(std::move(a));
            ws.push_back(std::move(b));
        }
        RealVector ww(d.nf), wy(d.m);
        for (std::size_t j = 0; j < d.nf; ++j) ww[j] = at_working_precision(warm->free_values[ps.kept_free[j]]);
        Real sign = problem.sense == Sense::Maximize ? Real(-1) : Real(1);
        for (std::size_t i = 0; i < d.m; ++i)
            wy[i] = sign * at_working_precision(warm->duals[ps.rows[i].original]) / d.row_scale[i];
        Real shift(std::sqrt(std::max(warm->gap, settings.effective_gap_tol())));
        ipm.warm_start(wx, ws, ww, wy, shift);
        status = ipm.run(iterations, message);
        done = status == Status::Optimal;
    }
    if (!done) {
        ipm.cold_start();
        status = ipm.run(iterations, message);
    }
    return assemble(problem, ps, d, ipm, status, iterations, message, settings);
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings) {
    return solve_impl(problem, settings, nullptr);
}

SdpSolution refine(const SdpProblem& problem, const SdpSolution& warm, const SolverSettings& settings) {
    if (warm.status != Status::Optimal && warm.status != Status::Stalled)
        throw std::invalid_argument("refine needs an optimal or stalled warm start");
    SdpSolution out = solve_impl(problem, settings, &warm);
    PrecisionGuard guard(settings.mantissa_bits);
    out.drift = to_double(abs(out.primal_objective - warm.primal_objective));
    return out;
}

}  // namespace sosbounds::sdp
