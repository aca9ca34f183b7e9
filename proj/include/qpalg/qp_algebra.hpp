#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpalg/errors.hpp"
#include "qpalg/linalg.hpp"
#include "qpalg/scalar.hpp"

namespace qpalg {

/// Sparse coordinate vector over an algebra basis: sorted (index, nonzero value).
using SparseVec = std::vector<std::pair<int, Scalar>>;

inline bool sv_is_zero(const SparseVec& v) { return v.empty(); }

inline SparseVec sv_from_dense(const Vec& v) {
    SparseVec r;
    for (size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) r.emplace_back(static_cast<int>(i), v[i]);
    return r;
}

inline Vec sv_to_dense(const SparseVec& v, size_t dim) {
    Vec r(dim);
    for (const auto& [i, c] : v) r[static_cast<size_t>(i)] = c;
    return r;
}

inline SparseVec sv_scale(const Scalar& c, const SparseVec& v) {
    SparseVec r;
    if (c.is_zero()) return r;
    r.reserve(v.size());
    for (const auto& [i, x] : v) r.emplace_back(i, c * x);
    return r;
}

/// Accumulator for sums of sparse vectors over a fixed-dimension basis.
class SvAccum {
  public:
    explicit SvAccum(size_t dim) : buf_(dim), used_(dim, false) {}

    void axpy(const Scalar& c, const SparseVec& v) {
        if (c.is_zero()) return;
        for (const auto& [i, x] : v) add(i, c * x);
    }

    void add(int i, const Scalar& v) {
        if (v.is_zero()) return;
        if (!used_[i]) {
            used_[i] = true;
            dirty_.push_back(i);
            buf_[i] = v;
        } else {
            buf_[i] += v;
        }
    }

    /// Extracts the accumulated vector and resets the accumulator.
    SparseVec take() {
        std::sort(dirty_.begin(), dirty_.end());
        SparseVec r;
        r.reserve(dirty_.size());
        for (int i : dirty_) {
            if (!buf_[i].is_zero()) r.emplace_back(i, buf_[i]);
            buf_[i] = Scalar();
            used_[i] = false;
        }
        dirty_.clear();
        return r;
    }

  private:
    Vec buf_;
    std::vector<bool> used_;
    std::vector<int> dirty_;
};

inline SparseVec sv_add(const SparseVec& a, const SparseVec& b) {
    SparseVec r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            Scalar s = a[i].second + b[j].second;
            if (!s.is_zero()) r.emplace_back(a[i].first, s);
            ++i;
            ++j;
        }
    }
    return r;
}

inline SparseVec sv_sub(const SparseVec& a, const SparseVec& b) { return sv_add(a, sv_scale(Scalar(-1), b)); }

/// Finite-dimensional quasi-Poisson superalgebra given by structure constants:
/// a supercommutative product, a super Lie bracket and the even operator P.
/// Immutable once built; all verification routines are pure.
class QPAlgebra {
  public:
    QPAlgebra() = default;

    QPAlgebra(std::vector<std::string> labels, std::vector<int> parity, Vec unit, Matrix p)
        : dim_(labels.size()),
          labels_(std::move(labels)),
          parity_(std::move(parity)),
          unit_(std::move(unit)),
          p_(std::move(p)),
          prod_(dim_ * dim_),
          brack_(dim_ * dim_) {
        if (parity_.size() != dim_ || unit_.size() != dim_ || p_.rows() != dim_ || p_.cols() != dim_)
            throw ShapeError("QPAlgebra: inconsistent construction data");
        p_cols_.resize(dim_);
        for (size_t j = 0; j < dim_; ++j) {
            SparseVec col;
            for (size_t i = 0; i < dim_; ++i)
                if (!p_.at(i, j).is_zero()) col.emplace_back(static_cast<int>(i), p_.at(i, j));
            p_cols_[j] = std::move(col);
        }
    }

    size_t dim() const { return dim_; }
    const std::vector<std::string>& labels() const { return labels_; }
    int parity(size_t i) const { return parity_[i]; }
    const std::vector<int>& parities() const { return parity_; }
    const Vec& unit() const { return unit_; }
    const Matrix& p_matrix() const { return p_; }
    SparseVec unit_sv() const { return sv_from_dense(unit_); }

    std::map<std::string, std::string>& metadata() { return metadata_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    void set_product(size_t i, size_t j, SparseVec v) { prod_[i * dim_ + j] = std::move(v); }
    void set_bracket(size_t i, size_t j, SparseVec v) { brack_[i * dim_ + j] = std::move(v); }
    const SparseVec& product(size_t i, size_t j) const { return prod_[i * dim_ + j]; }
    const SparseVec& bracket(size_t i, size_t j) const { return brack_[i * dim_ + j]; }
    const std::vector<SparseVec>& bracket_table() const { return brack_; }

    /// Copy of this algebra with a replaced bracket table.
    QPAlgebra with_bracket(std::vector<SparseVec> table) const {
        QPAlgebra r = *this;
        if (table.size() != dim_ * dim_) throw ShapeError("with_bracket: wrong table size");
        r.brack_ = std::move(table);
        return r;
    }

    SparseVec mul(const SparseVec& a, const SparseVec& b) const {
        SvAccum acc(dim_);
        for (const auto& [i, ca] : a)
            for (const auto& [j, cb] : b) acc.axpy(ca * cb, product(i, j));
        return acc.take();
    }

    SparseVec brk(const SparseVec& a, const SparseVec& b) const {
        SvAccum acc(dim_);
        for (const auto& [i, ca] : a)
            for (const auto& [j, cb] : b) acc.axpy(ca * cb, bracket(i, j));
        return acc.take();
    }

    SparseVec apply_p(const SparseVec& a) const {
        SvAccum acc(dim_);
        for (const auto& [j, c] : a) acc.axpy(c, p_cols_[j]);
        return acc.take();
    }

    const SparseVec& p_column(size_t j) const { return p_cols_[j]; }

    /// Parity of a homogeneous coordinate vector; nullopt when mixed.
    std::optional<int> sv_parity(const SparseVec& v) const {
        std::optional<int> p;
        for (const auto& [i, c] : v) {
            if (!p) p = parity_[i];
            else if (*p != parity_[i]) return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

  private:
    size_t dim_ = 0;
    std::vector<std::string> labels_;
    std::vector<int> parity_;
    Vec unit_;
    Matrix p_;
    std::vector<SparseVec> prod_;
    std::vector<SparseVec> brack_;
    std::vector<SparseVec> p_cols_;
    std::map<std::string, std::string> metadata_;
};

inline int koszul(int pa, int pb) { return (pa & pb & 1) ? -1 : 1; }

// --- axiom verification -----------------------------------------------------

struct CheckResult {
    bool passed = true;
    std::string witness;  // earliest violating tuple, human-readable

    void fail(const std::string& w) {
        if (passed) {
            passed = false;
            witness = w;
        }
    }
};

struct AxiomReport {
    CheckResult qp1, qp2, qp3, qp4;
    bool passed() const { return qp1.passed && qp2.passed && qp3.passed && qp4.passed; }
    std::string first_witness() const {
        if (!qp1.passed) return "QP1: " + qp1.witness;
        if (!qp2.passed) return "QP2: " + qp2.witness;
        if (!qp3.passed) return "QP3: " + qp3.witness;
        if (!qp4.passed) return "QP4: " + qp4.witness;
        return "";
    }
};

namespace detail {

inline std::string tuple_str(const QPAlgebra& a, std::initializer_list<size_t> idx) {
    std::string s = "(";
    bool first = true;
    for (size_t i : idx) {
        if (!first) s += ",";
        s += a.labels()[i];
        first = false;
    }
    return s + ")";
}

inline std::string residual_str(const QPAlgebra& a, const SparseVec& r) {
    std::string s = "residual ";
    bool first = true;
    for (const auto& [i, c] : r) {
        if (!first) s += " + ";
        s += "(" + to_string(c) + ")*" + a.labels()[i];
        first = false;
        if (s.size() > 160) {
            s += " ...";
            break;
        }
    }
    return s;
}

}  // namespace detail

/// Exhaustive check of axioms QP1-QP4 over all basis pairs/triples, exact.
/// Axiom failures are reported as data with the earliest violating tuple.
inline AxiomReport verify_axioms(const QPAlgebra& a) {
    AxiomReport rep;
    size_t n = a.dim();
    SparseVec one = a.unit_sv();

    // QP1 parity compatibility and unit laws
    for (size_t i = 0; i < n && rep.qp1.passed; ++i) {
        for (size_t j = 0; j < n && rep.qp1.passed; ++j) {
            for (const auto& [k, c] : a.product(i, j))
                if ((a.parity(i) + a.parity(j)) % 2 != a.parity(k))
                    rep.qp1.fail("parity violation in product at " + detail::tuple_str(a, {i, j}));
        }
        SparseVec ei{{static_cast<int>(i), Scalar(1)}};
        if (a.mul(one, ei) != ei || a.mul(ei, one) != ei)
            rep.qp1.fail("unit law fails at " + detail::tuple_str(a, {i}));
    }
    // P parity (even operator)
    for (size_t i = 0; i < n && rep.qp1.passed; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!a.p_matrix().at(i, j).is_zero() && a.parity(i) != a.parity(j)) {
                rep.qp1.fail("P is not even at entry (" + a.labels()[i] + "," + a.labels()[j] + ")");
                break;
            }
    // supercommutativity and associativity
    for (size_t i = 0; i < n && rep.qp1.passed; ++i)
        for (size_t j = 0; j < n && rep.qp1.passed; ++j) {
            SparseVec ij = a.product(i, j);
            SparseVec ji = sv_scale(Scalar(koszul(a.parity(i), a.parity(j))), a.product(j, i));
            if (ij != ji) {
                rep.qp1.fail("supercommutativity fails at " + detail::tuple_str(a, {i, j}) + "; " +
                             detail::residual_str(a, sv_sub(ij, ji)));
                break;
            }
            for (size_t k = 0; k < n; ++k) {
                SparseVec lhs = a.mul(a.product(i, j), SparseVec{{static_cast<int>(k), Scalar(1)}});
                SparseVec rhs = a.mul(SparseVec{{static_cast<int>(i), Scalar(1)}}, a.product(j, k));
                if (lhs != rhs) {
                    rep.qp1.fail("associativity fails at " + detail::tuple_str(a, {i, j, k}) + "; " +
                                 detail::residual_str(a, sv_sub(lhs, rhs)));
                    break;
                }
            }
        }

    // QP2: bracket parity, super anticommutativity, super Jacobi
    for (size_t i = 0; i < n && rep.qp2.passed; ++i)
        for (size_t j = 0; j < n && rep.qp2.passed; ++j) {
            for (const auto& [k, c] : a.bracket(i, j))
                if ((a.parity(i) + a.parity(j)) % 2 != a.parity(k)) {
                    rep.qp2.fail("parity violation in bracket at " + detail::tuple_str(a, {i, j}));
                    break;
                }
            SparseVec ij = a.bracket(i, j);
            SparseVec ji = sv_scale(Scalar(-koszul(a.parity(i), a.parity(j))), a.bracket(j, i));
            if (ij != ji) {
                rep.qp2.fail("super anticommutativity fails at " + detail::tuple_str(a, {i, j}) + "; " +
                             detail::residual_str(a, sv_sub(ij, ji)));
                break;
            }
        }
    for (size_t i = 0; i < n && rep.qp2.passed; ++i)
        for (size_t j = 0; j < n && rep.qp2.passed; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            Scalar sij(koszul(a.parity(i), a.parity(j)));
            for (size_t k = 0; k < n; ++k) {
                // {e_i, {e_j, e_k}} = {{e_i, e_j}, e_k} + (-1)^{p_i p_j} {e_j, {e_i, e_k}}
                SparseVec ek{{static_cast<int>(k), Scalar(1)}};
                SparseVec lhs = a.brk(ei, a.bracket(j, k));
                SparseVec rhs = sv_add(a.brk(a.bracket(i, j), ek), sv_scale(sij, a.brk(ej, a.bracket(i, k))));
                if (lhs != rhs) {
                    rep.qp2.fail("super Jacobi fails at " + detail::tuple_str(a, {i, j, k}) + "; " +
                                 detail::residual_str(a, sv_sub(lhs, rhs)));
                    break;
                }
            }
        }

    // QP3: P(a b) = P(a) b + a P(b) - a b
    for (size_t i = 0; i < n && rep.qp3.passed; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec lhs = a.apply_p(a.product(i, j));
            SparseVec rhs = sv_sub(sv_add(a.mul(a.p_column(i), ej), a.mul(ei, a.p_column(j))), a.product(i, j));
            if (lhs != rhs) {
                rep.qp3.fail("QP3 fails at " + detail::tuple_str(a, {i, j}) + "; " +
                             detail::residual_str(a, sv_sub(lhs, rhs)));
                break;
            }
        }

    // QP4: a P({b,c}) = {a P(b), c} + (-1)^{p_a p_b} {b, a P(c)}
    //                   + {a,b} P(c) - (-1)^{p_a p_b} P(b) {a,c}
    for (size_t i = 0; i < n && rep.qp4.passed; ++i)
        for (size_t j = 0; j < n && rep.qp4.passed; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec aipj = a.mul(ei, a.p_column(j));  // a P(b)
            Scalar sij(koszul(a.parity(i), a.parity(j)));
            for (size_t k = 0; k < n; ++k) {
                SparseVec ek{{static_cast<int>(k), Scalar(1)}};
                SparseVec lhs = a.mul(ei, a.apply_p(a.bracket(j, k)));
                SvAccum acc(n);
                acc.axpy(Scalar(1), a.brk(aipj, ek));
                acc.axpy(sij, a.brk(ej, a.mul(ei, a.p_column(k))));
                acc.axpy(Scalar(1), a.mul(a.bracket(i, j), a.p_column(k)));
                acc.axpy(-sij, a.mul(a.p_column(j), a.bracket(i, k)));
                SparseVec rhs = acc.take();
                if (lhs != rhs) {
                    rep.qp4.fail("QP4 fails at " + detail::tuple_str(a, {i, j, k}) + "; " +
                                 detail::residual_str(a, sv_sub(lhs, rhs)));
                    break;
                }
            }
        }
    return rep;
}

// --- derived identities -----------------------------------------------------

struct DerivedReport {
    CheckResult pbracket, pad, adiff;
    bool passed() const { return pbracket.passed && pad.passed && adiff.passed; }
};

/// The three consequences of QP1-QP4: must hold whenever the axioms pass.
inline DerivedReport derived_identities(const QPAlgebra& a) {
    DerivedReport rep;
    size_t n = a.dim();
    SparseVec one = a.unit_sv();
    for (size_t b = 0; b < n; ++b) {
        SparseVec eb{{static_cast<int>(b), Scalar(1)}};
        // (Pad): P({1,c}) = {1, P(c)}
        SparseVec lhs = a.apply_p(a.brk(one, eb));
        SparseVec rhs = a.brk(one, a.p_column(b));
        if (lhs != rhs) rep.pad.fail("(Pad) fails at " + detail::tuple_str(a, {b}));
        for (size_t c = 0; c < n; ++c) {
            SparseVec ec{{static_cast<int>(c), Scalar(1)}};
            // (Pbracket): P({b,c}) = {P(b),c} + {b,P(c)} + {1,b} P(c) - P(b) {1,c}
            SparseVec l1 = a.apply_p(a.bracket(b, c));
            SvAccum acc(n);
            acc.axpy(Scalar(1), a.brk(a.p_column(b), ec));
            acc.axpy(Scalar(1), a.brk(eb, a.p_column(c)));
            acc.axpy(Scalar(1), a.mul(a.brk(one, eb), a.p_column(c)));
            acc.axpy(Scalar(-1), a.mul(a.p_column(b), a.brk(one, ec)));
            if (l1 != acc.take()) rep.pbracket.fail("(Pbracket) fails at " + detail::tuple_str(a, {b, c}));
            // (adiff): {1, a P(b)} = {1,a} P(b) + a {1, P(b)}
            SparseVec apb = a.mul(eb, a.p_column(c));
            SparseVec l2 = a.brk(one, apb);
            SparseVec r2 = sv_add(a.mul(a.brk(one, eb), a.p_column(c)), a.mul(eb, a.brk(one, a.p_column(c))));
            if (l2 != r2) rep.adiff.fail("(adiff) fails at " + detail::tuple_str(a, {b, c}));
        }
    }
    return rep;
}

// --- Q operator, angle bracket, compatibility -------------------------------

/// Matrix of Q = ad(1) = {1, .}.
inline Matrix q_operator(const QPAlgebra& a) {
    size_t n = a.dim();
    Matrix q(n, n);
    SparseVec one = a.unit_sv();
    for (size_t j = 0; j < n; ++j) {
        SparseVec col = a.brk(one, SparseVec{{static_cast<int>(j), Scalar(1)}});
        for (const auto& [i, c] : col) q.at(i, j) = c;
    }
    return q;
}

/// <a,b> = Q(a) P(b) - P(a) Q(b).
inline SparseVec angle_bracket(const QPAlgebra& a, const SparseVec& x, const SparseVec& y) {
    SparseVec one = a.unit_sv();
    SparseVec qx = a.brk(one, x), qy = a.brk(one, y);
    SparseVec px = a.apply_p(x), py = a.apply_p(y);
    return sv_sub(a.mul(qx, py), a.mul(px, qy));
}

/// Full table of <e_i, e_j>.
inline std::vector<SparseVec> angle_table(const QPAlgebra& a) {
    size_t n = a.dim();
    std::vector<SparseVec> t(n * n);
    SparseVec one = a.unit_sv();
    std::vector<SparseVec> q_cols(n);
    for (size_t j = 0; j < n; ++j) q_cols[j] = a.brk(one, SparseVec{{static_cast<int>(j), Scalar(1)}});
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            t[i * n + j] = sv_sub(a.mul(q_cols[i], a.p_column(j)), a.mul(a.p_column(i), q_cols[j]));
    return t;
}

/// Independent route for QP3: P - Id must be a derivation of the product.
/// Returns the earliest violating pair, or nullopt.
inline std::optional<std::string> p_minus_id_derivation_witness(const QPAlgebra& a) {
    size_t n = a.dim();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec di = sv_sub(a.p_column(i), ei);
            SparseVec dj = sv_sub(a.p_column(j), ej);
            SparseVec lhs = sv_sub(a.apply_p(a.product(i, j)), a.product(i, j));
            SparseVec rhs = sv_add(a.mul(di, ej), a.mul(ei, dj));
            if (lhs != rhs) return "P - Id fails the Leibniz rule at " + detail::tuple_str(a, {i, j});
        }
    return std::nullopt;
}

struct CompatibilityReport {
    CheckResult cyclic;     // mixed cyclic identity of { , } and < , >
    CheckResult double_qp;  // sampled linear combinations satisfy QP2 and QP4
    bool passed() const { return cyclic.passed && double_qp.passed; }
};

/// Checks that { , } and < , > are compatible Lie brackets and that sampled
/// linear combinations s1 { , } + s2 < , > again give quasi-Poisson structures.
inline CompatibilityReport compatibility_check(const QPAlgebra& a) {
    CompatibilityReport rep;
    size_t n = a.dim();
    std::vector<SparseVec> ang = angle_table(a);

    // sum over cyclic permutations of (-1)^{p_x p_z} ({x, <y,z>} + <x, {y,z}>) = 0,
    // where <x, v> for a vector v expands through the angle table.
    auto brk_angle = [&](size_t x, const SparseVec& v) {
        SvAccum acc(n);
        for (const auto& [j, c] : v) acc.axpy(c, ang[x * n + j]);
        return acc.take();
    };
    SparseVec ex, ey;
    for (size_t i = 0; i < n && rep.cyclic.passed; ++i)
        for (size_t j = 0; j < n && rep.cyclic.passed; ++j)
            for (size_t k = 0; k < n; ++k) {
                SvAccum acc(n);
                const size_t idx[3] = {i, j, k};
                for (int c = 0; c < 3; ++c) {
                    size_t x = idx[c], y = idx[(c + 1) % 3], z = idx[(c + 2) % 3];
                    Scalar sign(koszul(a.parity(x), a.parity(z)));
                    acc.axpy(sign, a.brk(SparseVec{{static_cast<int>(x), Scalar(1)}}, ang[y * n + z]));
                    acc.axpy(sign, brk_angle(x, a.bracket(y, z)));
                }
                SparseVec res = acc.take();
                if (!sv_is_zero(res)) {
                    rep.cyclic.fail("compatibility fails at " + detail::tuple_str(a, {i, j, k}) + "; " +
                                    detail::residual_str(a, res));
                    break;
                }
            }

    // sampled combined brackets (fixed seed for reproducibility)
    std::mt19937 gen(7u);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int sample = 0; sample < 3 && rep.double_qp.passed; ++sample) {
        Scalar s1(coef(gen)), s2(coef(gen));
        if (sample == 0) {
            s1 = Scalar(1);
            s2 = Scalar(1);
        }
        std::vector<SparseVec> comb(n * n);
        for (size_t t = 0; t < n * n; ++t) comb[t] = sv_add(sv_scale(s1, a.bracket_table()[t]), sv_scale(s2, ang[t]));
        QPAlgebra mixed = a.with_bracket(std::move(comb));
        AxiomReport ax = verify_axioms(mixed);
        if (!ax.qp2.passed)
            rep.double_qp.fail("combined bracket (s1=" + to_string(s1) + ", s2=" + to_string(s2) +
                               ") violates QP2: " + ax.qp2.witness);
        else if (!ax.qp4.passed)
            rep.double_qp.fail("combined bracket (s1=" + to_string(s1) + ", s2=" + to_string(s2) +
                               ") violates QP4: " + ax.qp4.witness);
    }
    return rep;
}

// --- reduction ---------------------------------------------------------------

/// The reduced algebra: same space, product and P, with the bold bracket
/// {a,b} + <a,b>. Satisfies Q = ad(1) = 0.
inline QPAlgebra reduce(const QPAlgebra& a) {
    size_t n = a.dim();
    std::vector<SparseVec> ang = angle_table(a);
    std::vector<SparseVec> bold(n * n);
    for (size_t t = 0; t < n * n; ++t) bold[t] = sv_add(a.bracket_table()[t], ang[t]);
    QPAlgebra r = a.with_bracket(std::move(bold));
    r.metadata()["reduced"] = "true";
    return r;
}

// --- Leibniz probe (Poisson vs quasi-Poisson) --------------------------------

/// Returns the earliest triple violating the Poisson Leibniz rule
/// {a, b c} = {a,b} c + (-1)^{p_a p_b} b {a,c}, or nullopt when the algebra
/// is Poisson.
inline std::optional<std::string> poisson_leibniz_witness(const QPAlgebra& a) {
    size_t n = a.dim();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                SparseVec ei{{static_cast<int>(i), Scalar(1)}};
                SparseVec ej{{static_cast<int>(j), Scalar(1)}};
                SparseVec ek{{static_cast<int>(k), Scalar(1)}};
                SparseVec lhs = a.brk(ei, a.product(j, k));
                SparseVec rhs = sv_add(a.mul(a.bracket(i, j), ek),
                                       sv_scale(Scalar(koszul(a.parity(i), a.parity(j))), a.mul(ej, a.bracket(i, k))));
                if (lhs != rhs)
                    return "Leibniz fails at " + detail::tuple_str(a, {i, j, k}) + "; " +
                           detail::residual_str(a, sv_sub(lhs, rhs));
            }
    return std::nullopt;
}

// --- generic constructors ----------------------------------------------------

namespace detail {

inline void require_even_derivation(const QPAlgebra& a, const Matrix& d, const std::string& who) {
    size_t n = a.dim();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!d.at(i, j).is_zero() && a.parity(i) != a.parity(j))
                throw ConstructionError(who + ": operator is not even");
    std::vector<SparseVec> cols(n);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i)
            if (!d.at(i, j).is_zero()) cols[j].emplace_back(static_cast<int>(i), d.at(i, j));
    }
    auto apply_d = [&](const SparseVec& v) {
        SvAccum acc(n);
        for (const auto& [j, c] : v) acc.axpy(c, cols[j]);
        return acc.take();
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec lhs = apply_d(a.product(i, j));
            SparseVec rhs = sv_add(a.mul(cols[i], ej), a.mul(ei, cols[j]));
            if (lhs != rhs)
                throw ConstructionError(who + ": D is not a derivation of the product at " + tuple_str(a, {i, j}));
        }
}

}  // namespace detail

/// Lemma-style constructor: a Poisson superalgebra with an even product
/// derivation D such that P = D + Id is a bracket derivation.
inline QPAlgebra from_poisson(const QPAlgebra& poisson, const Matrix& d) {
    AxiomReport base = verify_axioms(poisson);
    if (!base.qp1.passed || !base.qp2.passed)
        throw ConstructionError("from_poisson: input is not a superalgebra: " + base.first_witness());
    if (auto w = poisson_leibniz_witness(poisson))
        throw ConstructionError("from_poisson: input is not Poisson: " + *w);
    detail::require_even_derivation(poisson, d, "from_poisson");
    size_t n = poisson.dim();
    Matrix p = d + Matrix::identity(n);
    QPAlgebra out(poisson.labels(), poisson.parities(), poisson.unit(), p);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            out.set_product(i, j, poisson.product(i, j));
            out.set_bracket(i, j, poisson.bracket(i, j));
        }
    // P must be a derivation of the bracket
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec lhs = out.apply_p(out.bracket(i, j));
            SparseVec rhs = sv_add(out.brk(out.p_column(i), ej), out.brk(ei, out.p_column(j)));
            if (lhs != rhs)
                throw ConstructionError("from_poisson: P = D + Id is not a bracket derivation at " +
                                        detail::tuple_str(out, {i, j}));
        }
    return out;
}

/// Lemma-style constructor: bracket {a,b} = a D(b) - D(a) b from an even
/// derivation D of a commutative superalgebra; P = D + Id.
inline QPAlgebra from_derivation(const QPAlgebra& comm, const Matrix& d) {
    detail::require_even_derivation(comm, d, "from_derivation");
    size_t n = comm.dim();
    Matrix p = d + Matrix::identity(n);
    QPAlgebra out(comm.labels(), comm.parities(), comm.unit(), p);
    std::vector<SparseVec> d_cols(n);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            if (!d.at(i, j).is_zero()) d_cols[j].emplace_back(static_cast<int>(i), d.at(i, j));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            out.set_product(i, j, comm.product(i, j));
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            out.set_bracket(i, j, sv_sub(comm.mul(ei, d_cols[j]), comm.mul(d_cols[i], ej)));
        }
    return out;
}

/// Lemma-style constructor from commuting operators P, Q with the stated
/// compatibility conditions; bracket <a,b> = Q(a) P(b) - P(a) Q(b).
inline QPAlgebra from_PQ(const QPAlgebra& comm, const Matrix& p, const Matrix& q) {
    size_t n = comm.dim();
    if (!(p * q == q * p)) throw ConstructionError("from_PQ: P and Q do not commute");
    QPAlgebra staged(comm.labels(), comm.parities(), comm.unit(), p);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) staged.set_product(i, j, comm.product(i, j));
    // P satisfies QP3
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            SparseVec lhs = staged.apply_p(staged.product(i, j));
            SparseVec rhs =
                sv_sub(sv_add(staged.mul(staged.p_column(i), ej), staged.mul(ei, staged.p_column(j))),
                       staged.product(i, j));
            if (lhs != rhs)
                throw ConstructionError("from_PQ: P violates QP3 at " + detail::tuple_str(staged, {i, j}));
        }
    std::vector<SparseVec> q_cols(n);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            if (!q.at(i, j).is_zero()) q_cols[j].emplace_back(static_cast<int>(i), q.at(i, j));
    auto apply_q = [&](const SparseVec& v) {
        SvAccum acc(n);
        for (const auto& [j, c] : v) acc.axpy(c, q_cols[j]);
        return acc.take();
    };
    // Q(a P(b)) = Q(a) P(b) + a P(Q(b))
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec lhs = apply_q(staged.mul(ei, staged.p_column(j)));
            SparseVec rhs = sv_add(staged.mul(q_cols[i], staged.p_column(j)),
                                   staged.mul(ei, staged.apply_p(q_cols[j])));
            if (lhs != rhs)
                throw ConstructionError("from_PQ: Q violates the differential condition at " +
                                        detail::tuple_str(staged, {i, j}));
        }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            staged.set_bracket(i, j, sv_sub(staged.mul(q_cols[i], staged.p_column(j)),
                                            staged.mul(staged.p_column(i), q_cols[j])));
    return staged;
}

// --- primary elements ---------------------------------------------------------

/// Common eigenvector of P and Q with its exact eigenvalues.
struct PrimaryElement {
    Vec coords;
    Scalar chi;    // Q eigenvalue
    Scalar omega;  // P eigenvalue
};

struct PrimaryBasisResult {
    bool ok = false;
    std::string obstruction;  // which operator fails to split/diagonalize
    std::vector<PrimaryElement> elements;
};

/// Simultaneous eigenbasis of the commuting operators P and Q when both split
/// over the Scalar field; otherwise reports the obstructing operator.
inline PrimaryBasisResult primary_basis(const QPAlgebra& a) {
    PrimaryBasisResult out;
    size_t n = a.dim();
    Matrix p = a.p_matrix();
    Matrix q = q_operator(a);
    if (!(p * q == q * p)) throw InternalError("primary_basis: P and Q do not commute");

    EigenReport pe = eigen(p);
    if (!pe.splits) {
        out.obstruction = "P does not split over the base field (residual degree " +
                          std::to_string(pe.residual_degree) + ")";
        return out;
    }
    if (!pe.diagonalizable) {
        out.obstruction = "P is not diagonalizable";
        return out;
    }
    for (const auto& ep : pe.values) {
        // restrict Q to the P-eigenspace
        size_t d = ep.vectors.size();
        Decomposer dec(ep.vectors);
        Matrix qr(d, d);
        for (size_t j = 0; j < d; ++j) {
            auto img = dec.solve(q.apply(ep.vectors[j]));
            if (!img) throw InternalError("primary_basis: Q does not preserve a P-eigenspace");
            for (size_t i = 0; i < d; ++i) qr.at(i, j) = (*img)[i];
        }
        EigenReport qe = eigen(qr);
        if (!qe.splits) {
            out.obstruction = "Q does not split over the base field (residual degree " +
                              std::to_string(qe.residual_degree) + ")";
            return out;
        }
        if (!qe.diagonalizable) {
            out.obstruction = "Q is not diagonalizable";
            return out;
        }
        for (const auto& eq : qe.values)
            for (const auto& w : eq.vectors) {
                Vec v(n);
                for (size_t j = 0; j < d; ++j)
                    if (!w[j].is_zero()) v = vec_add(v, vec_scale(w[j], ep.vectors[j]));
                out.elements.push_back(PrimaryElement{std::move(v), eq.value, ep.value});
            }
    }
    out.ok = true;
    return out;
}

/// Closure of primary elements under a1 P(a2) and {a1,a2} + <a1,a2>
/// with the stated eigenvalue arithmetic; returns the first violation.
inline std::optional<std::string> primary_closure_witness(const QPAlgebra& a,
                                                          const std::vector<PrimaryElement>& prim) {
    SparseVec one = a.unit_sv();
    auto eig_check = [&](const SparseVec& v, const Scalar& chi, const Scalar& omega) -> bool {
        if (sv_is_zero(v)) return true;
        SparseVec pv = a.apply_p(v);
        SparseVec qv = a.brk(one, v);
        return pv == sv_scale(omega, v) && qv == sv_scale(chi, v);
    };
    for (size_t x = 0; x < prim.size(); ++x)
        for (size_t y = 0; y < prim.size(); ++y) {
            SparseVec a1 = sv_from_dense(prim[x].coords);
            SparseVec a2 = sv_from_dense(prim[y].coords);
            SparseVec prod = a.mul(a1, a.apply_p(a2));
            if (!eig_check(prod, prim[x].chi + prim[y].chi, prim[x].omega + prim[y].omega - Scalar(1)))
                return "a1 P(a2) not primary with expected eigenvalues for pair (" + std::to_string(x) + "," +
                       std::to_string(y) + ")";
            SparseVec bold = sv_add(a.brk(a1, a2), angle_bracket(a, a1, a2));
            if (!eig_check(bold, prim[x].chi + prim[y].chi, prim[x].omega + prim[y].omega))
                return "{a1,a2}+<a1,a2> not primary with expected eigenvalues for pair (" + std::to_string(x) +
                       "," + std::to_string(y) + ")";
        }
    return std::nullopt;
}

// --- informational ideal probe ------------------------------------------------

/// Dimension of the smallest subspace containing e_seed that is closed under
/// multiplication and bracket with the whole algebra and under P. The paper
/// defines no ideal notion for QP algebras; this probe is informational only.
inline size_t ideal_closure_dimension(const QPAlgebra& a, size_t seed) {
    size_t n = a.dim();
    std::vector<Vec> span;
    Decomposer dec;
    auto contains = [&](const Vec& v) {
        if (span.empty()) return vec_is_zero(v);
        return dec.solve(v).has_value();
    };
    std::vector<Vec> queue{sv_to_dense(SparseVec{{static_cast<int>(seed), Scalar(1)}}, n)};
    while (!queue.empty()) {
        Vec v = queue.back();
        queue.pop_back();
        if (contains(v)) continue;
        span.push_back(v);
        dec = Decomposer(span);
        SparseVec sv = sv_from_dense(v);
        for (size_t j = 0; j < n; ++j) {
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            queue.push_back(sv_to_dense(a.mul(sv, ej), n));
            queue.push_back(sv_to_dense(a.brk(sv, ej), n));
            queue.push_back(sv_to_dense(a.brk(ej, sv), n));
        }
        queue.push_back(sv_to_dense(a.apply_p(sv), n));
    }
    return span.size();
}

}  // namespace qpalg
