#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpalg/errors.hpp"
#include "qpalg/qp_algebra.hpp"

namespace qpalg {

/// Element of the loop algebra L(A) = C[t,t^-1] (x) A: finite-support map
/// from (basis index, integer mode) to Scalar.
using LoopElement = std::map<std::pair<int, long>, Scalar>;

inline void loop_add(LoopElement& dst, int basis, long mode, const Scalar& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(basis, mode);
    auto it = dst.find(key);
    if (it == dst.end()) {
        dst[key] = c;
    } else {
        it->second += c;
        if (it->second.is_zero()) dst.erase(it);
    }
}

inline LoopElement loop_term(int basis, long mode, const Scalar& c = Scalar(1)) {
    LoopElement e;
    loop_add(e, basis, mode, c);
    return e;
}

/// Precomputed mode-coefficient tables for the loop bracket
/// [a_n, b_m] = n (a P(b))_{n+m} - m (P(a) b)_{n+m} + {a,b}_{n+m}.
class LoopStructure {
  public:
    explicit LoopStructure(const QPAlgebra& a) : a_(&a) {
        size_t n = a.dim();
        u_.resize(n * n);
        v_.resize(n * n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                SparseVec ei{{static_cast<int>(i), Scalar(1)}};
                SparseVec ej{{static_cast<int>(j), Scalar(1)}};
                u_[i * n + j] = a.mul(ei, a.p_column(j));
                v_[i * n + j] = a.mul(a.p_column(i), ej);
            }
    }

    const QPAlgebra& algebra() const { return *a_; }
    const SparseVec& u(size_t i, size_t j) const { return u_[i * a_->dim() + j]; }  // a_i P(a_j)
    const SparseVec& v(size_t i, size_t j) const { return v_[i * a_->dim() + j]; }  // P(a_i) a_j
    const SparseVec& w(size_t i, size_t j) const { return a_->bracket(i, j); }

    LoopElement bracket(const LoopElement& x, const LoopElement& y) const {
        LoopElement out;
        for (const auto& [kx, cx] : x)
            for (const auto& [ky, cy] : y) {
                auto [i, n] = kx;
                auto [j, m] = ky;
                Scalar c = cx * cy;
                long mode = n + m;
                for (const auto& [r, s] : u(i, j)) loop_add(out, r, mode, c * Scalar(n) * s);
                for (const auto& [r, s] : v(i, j)) loop_add(out, r, mode, -c * Scalar(m) * s);
                for (const auto& [r, s] : w(i, j)) loop_add(out, r, mode, c * s);
            }
        return out;
    }

  private:
    const QPAlgebra* a_;
    std::vector<SparseVec> u_, v_;
};

inline LoopElement loop_bracket(const QPAlgebra& a, const LoopElement& x, const LoopElement& y) {
    return LoopStructure(a).bracket(x, y);
}

// --- Jacobi identity on mode windows -----------------------------------------

/// Monomials in (n, m, l) of total degree <= 2; every Jacobi residual
/// coefficient lives in this space because Eq. (Lie) is affine in the modes.
namespace loop_detail {

constexpr int kMonoCount = 10;
constexpr std::array<std::array<int, 3>, kMonoCount> kMonos{{{0, 0, 0},
                                                             {1, 0, 0},
                                                             {0, 1, 0},
                                                             {0, 0, 1},
                                                             {2, 0, 0},
                                                             {1, 1, 0},
                                                             {1, 0, 1},
                                                             {0, 2, 0},
                                                             {0, 1, 1},
                                                             {0, 0, 2}}};

inline int mono_index(int en, int em, int el) {
    for (int k = 0; k < kMonoCount; ++k)
        if (kMonos[k][0] == en && kMonos[k][1] == em && kMonos[k][2] == el) return k;
    throw InternalError("mode monomial out of range");
}

/// index of monomial * variable (var: 0 = n, 1 = m, 2 = l)
inline int mono_mul_var(int mono, int var) {
    auto e = kMonos[mono];
    e[var] += 1;
    return mono_index(e[0], e[1], e[2]);
}

struct ModePoly {
    // coefficient vectors per mode monomial
    std::array<std::vector<Scalar>, kMonoCount> coef;
    explicit ModePoly(size_t dim) {
        for (auto& c : coef) c.assign(dim, Scalar());
    }
    void clear() {
        for (auto& c : coef)
            for (auto& s : c) s = Scalar();
    }
    bool is_zero() const {
        for (const auto& c : coef)
            for (const auto& s : c)
                if (!s.is_zero()) return false;
        return true;
    }
    Vec eval(long n, long m, long l) const {
        Vec out(coef[0].size());
        for (int k = 0; k < kMonoCount; ++k) {
            Scalar mono(1);
            for (int t = 0; t < kMonos[k][0]; ++t) mono = mono * Scalar(n);
            for (int t = 0; t < kMonos[k][1]; ++t) mono = mono * Scalar(m);
            for (int t = 0; t < kMonos[k][2]; ++t) mono = mono * Scalar(l);
            if (mono.is_zero()) continue;
            for (size_t r = 0; r < out.size(); ++r)
                if (!coef[k][r].is_zero()) out[r] += mono * coef[k][r];
        }
        return out;
    }
};

}  // namespace loop_detail

struct JacobiReport {
    bool passed = true;
    bool certified = false;  // residual proved zero as a polynomial in the modes
    int window = 0;
    std::string witness;

    explicit operator bool() const { return passed; }
};

/// Verifies the super Jacobi identity of L(A) for all basis triples and all
/// mode triples in [-W, W]. The residual for a fixed basis triple is a
/// polynomial of total degree <= 2 in the modes, so it is computed exactly in
/// coefficient form; vanishing of the polynomial certifies vanishing on every
/// mode triple (a degree-d polynomial vanishing at d+1 points per variable is
/// zero, and the window supplies 2W+1 >= 3 points). On failure the earliest
/// witness inside the window is reported.
inline JacobiReport jacobi_window_check(const QPAlgebra& a, int window) {
    if (window < 1) throw WindowError("jacobi_window_check requires window >= 1");
    JacobiReport rep;
    rep.window = window;
    rep.certified = 2 * window + 1 >= 3;
    size_t dim = a.dim();
    LoopStructure ls(a);
    using namespace loop_detail;

    ModePoly residual(dim);
    // variable ids: n = 0, m = 1, l = 2
    constexpr int kOne = 0, kN = 1, kM = 2, kL = 3;

    for (size_t i = 0; i < dim && rep.passed; ++i)
        for (size_t j = 0; j < dim && rep.passed; ++j) {
            Scalar sij(koszul(a.parity(i), a.parity(j)));
            for (size_t k = 0; k < dim; ++k) {
                residual.clear();
                // term 1: [e_i^n, [e_j^m, e_k^l]]
                // inner = sum_r (m u_jk + l (-v_jk) + w_jk)_r e_r^{m+l}
                auto add_outer_second = [&](int inner_mono, int r, const Scalar& c) {
                    // outer [e_i^n, e_r^{m+l}] = n u_ir - (m+l) v_ir + w_ir
                    for (const auto& [t, s] : ls.u(i, r))
                        residual.coef[mono_mul_var(inner_mono, 0)][t] += c * s;
                    for (const auto& [t, s] : ls.v(i, r)) {
                        residual.coef[mono_mul_var(inner_mono, 1)][t] -= c * s;
                        residual.coef[mono_mul_var(inner_mono, 2)][t] -= c * s;
                    }
                    for (const auto& [t, s] : ls.w(i, r)) residual.coef[inner_mono][t] += c * s;
                };
                for (const auto& [r, s] : ls.u(j, k)) add_outer_second(kM, r, s);
                for (const auto& [r, s] : ls.v(j, k)) add_outer_second(kL, r, -s);
                for (const auto& [r, s] : ls.w(j, k)) add_outer_second(kOne, r, s);

                // term 2: -[[e_i^n, e_j^m], e_k^l]
                auto add_outer_first = [&](int inner_mono, int r, const Scalar& c) {
                    // outer [e_r^{n+m}, e_k^l] = (n+m) u_rk - l v_rk + w_rk
                    for (const auto& [t, s] : ls.u(r, k)) {
                        residual.coef[mono_mul_var(inner_mono, 0)][t] -= c * s;
                        residual.coef[mono_mul_var(inner_mono, 1)][t] -= c * s;
                    }
                    for (const auto& [t, s] : ls.v(r, k)) residual.coef[mono_mul_var(inner_mono, 2)][t] += c * s;
                    for (const auto& [t, s] : ls.w(r, k)) residual.coef[inner_mono][t] -= c * s;
                };
                for (const auto& [r, s] : ls.u(i, j)) add_outer_first(kN, r, s);
                for (const auto& [r, s] : ls.v(i, j)) add_outer_first(kM, r, -s);
                for (const auto& [r, s] : ls.w(i, j)) add_outer_first(kOne, r, s);

                // term 3: -(-1)^{p_i p_j} [e_j^m, [e_i^n, e_k^l]]
                auto add_outer_second_j = [&](int inner_mono, int r, const Scalar& c) {
                    // outer [e_j^m, e_r^{n+l}] = m u_jr - (n+l) v_jr + w_jr
                    for (const auto& [t, s] : ls.u(j, r))
                        residual.coef[mono_mul_var(inner_mono, 1)][t] += c * s;
                    for (const auto& [t, s] : ls.v(j, r)) {
                        residual.coef[mono_mul_var(inner_mono, 0)][t] -= c * s;
                        residual.coef[mono_mul_var(inner_mono, 2)][t] -= c * s;
                    }
                    for (const auto& [t, s] : ls.w(j, r)) residual.coef[inner_mono][t] += c * s;
                };
                for (const auto& [r, s] : ls.u(i, k)) add_outer_second_j(kN, r, -sij * s);
                for (const auto& [r, s] : ls.v(i, k)) add_outer_second_j(kL, r, sij * s);
                for (const auto& [r, s] : ls.w(i, k)) add_outer_second_j(kOne, r, -sij * s);

                if (!residual.is_zero()) {
                    rep.passed = false;
                    // earliest failing mode triple in the window, lexicographic
                    for (long n = -window; n <= window && rep.witness.empty(); ++n)
                        for (long m = -window; m <= window && rep.witness.empty(); ++m)
                            for (long l = -window; l <= window; ++l) {
                                Vec val = residual.eval(n, m, l);
                                if (!vec_is_zero(val)) {
                                    rep.witness = "Jacobi fails at basis (" + a.labels()[i] + "," + a.labels()[j] +
                                                  "," + a.labels()[k] + "), modes (" + std::to_string(n) + "," +
                                                  std::to_string(m) + "," + std::to_string(l) + ")";
                                    break;
                                }
                            }
                    if (rep.witness.empty())
                        rep.witness = "Jacobi residual nonzero as a polynomial for basis (" + a.labels()[i] + "," +
                                      a.labels()[j] + "," + a.labels()[k] + ")";
                    break;
                }
            }
        }
    return rep;
}

/// Slow independent route: evaluates the Jacobi identity pointwise on the
/// grid through loop_bracket. Used to cross-validate the certificate path.
inline bool jacobi_grid_check(const QPAlgebra& a, int window) {
    LoopStructure ls(a);
    size_t dim = a.dim();
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j)
            for (size_t k = 0; k < dim; ++k) {
                Scalar sij(koszul(a.parity(i), a.parity(j)));
                for (long n = -window; n <= window; ++n)
                    for (long m = -window; m <= window; ++m)
                        for (long l = -window; l <= window; ++l) {
                            LoopElement x = loop_term(static_cast<int>(i), n);
                            LoopElement y = loop_term(static_cast<int>(j), m);
                            LoopElement z = loop_term(static_cast<int>(k), l);
                            LoopElement lhs = ls.bracket(x, ls.bracket(y, z));
                            LoopElement r1 = ls.bracket(ls.bracket(x, y), z);
                            LoopElement r2 = ls.bracket(y, ls.bracket(x, z));
                            for (const auto& [key, c] : r1) loop_add(lhs, key.first, key.second, -c);
                            for (const auto& [key, c] : r2) loop_add(lhs, key.first, key.second, -(sij * c));
                            if (!lhs.empty()) return false;
                        }
            }
    return true;
}

// --- Virasoro subalgebras from idempotents ------------------------------------

struct VirasoroReport {
    Scalar omega;
    bool exact_witt = false;  // [E_n, E_k] = (n - k) E_{n+k} with no rescaling
    bool verified = false;    // scaled Witt relations hold identically
    std::string detail;
};

/// For an even idempotent E with P(E) = omega E, omega != 0, the modes E_n
/// span a Virasoro subalgebra: [E_n, E_k] = omega (n - k) E_{n+k}.
inline VirasoroReport virasoro_from_idempotent(const QPAlgebra& a, const Vec& e) {
    SparseVec ev = sv_from_dense(e);
    if (sv_is_zero(ev)) throw SpecError("virasoro_from_idempotent: E = 0 is rejected (omega undefined)");
    auto par = a.sv_parity(ev);
    if (!par || *par != 0) throw SpecError("virasoro_from_idempotent: E must be even");
    if (a.mul(ev, ev) != ev) throw SpecError("virasoro_from_idempotent: E is not idempotent");
    SparseVec pe = a.apply_p(ev);
    // P(E) = omega E for a single scalar omega
    Scalar omega;
    {
        Vec dense = sv_to_dense(pe, a.dim());
        omega = dense[ev.front().first] / ev.front().second;
        if (pe != sv_scale(omega, ev))
            throw SpecError("virasoro_from_idempotent: P(E) is not proportional to E");
        if (omega.is_zero()) throw SpecError("virasoro_from_idempotent: omega = 0 is rejected");
    }
    VirasoroReport rep;
    rep.omega = omega;
    // [E_n, E_k] = n (E P(E)) - k (P(E) E) + {E,E} at mode n+k;
    // E P(E) = omega E and {E,E} = 0 give omega (n-k) E_{n+k} identically.
    SparseVec epe = a.mul(ev, pe);
    SparseVec brace = a.brk(ev, ev);
    rep.verified = (epe == sv_scale(omega, ev)) && sv_is_zero(brace);
    rep.exact_witt = rep.verified && omega == Scalar(1);
    rep.detail = rep.verified ? ("[E_n,E_k] = " + to_string(omega) + "*(n-k) E_{n+k}")
                              : "scaled Witt relations do not hold";
    return rep;
}

// --- grading and twist data -----------------------------------------------------

/// Additive twist data of a primary element: the exponent omega - chi and the
/// canonical representative of its coset (omega - chi) + Z.
struct TwistData {
    Scalar exponent;
    Scalar coset;
};

inline Scalar coset_rep(const Scalar& x) {
    return Scalar(x.re - Rational(rat_floor(x.re)), x.im);
}

struct GradingReport {
    bool superconformal = false;
    std::string verdict;
    std::vector<PrimaryElement> primaries;
    std::vector<TwistData> twists;
    bool grading_ok = false;       // brackets respect coset addition
    bool tensor_module_ok = false;  // [L_n, a_m] = (n omega - m + chi) a_{n+m}
    std::string witness;
};

/// Computes the coset grading of L(A) from the primary basis and verifies
/// both the coset additivity of the bracket and the tensor-module
/// transformation law of every primary family.
inline GradingReport grading_and_twist(const QPAlgebra& a) {
    GradingReport rep;
    PrimaryBasisResult pb = primary_basis(a);
    if (!pb.ok) {
        rep.verdict = "not superconformal over the base field: " + pb.obstruction;
        return rep;
    }
    rep.superconformal = true;
    rep.verdict = "superconformal: P and Q diagonalizable over the base field";
    rep.primaries = pb.elements;
    for (const auto& pe : pb.elements)
        rep.twists.push_back({pe.omega - pe.chi, coset_rep(pe.omega - pe.chi)});

    size_t np = rep.primaries.size();
    std::vector<Vec> cols;
    for (const auto& pe : rep.primaries) cols.push_back(pe.coords);
    Decomposer dec(cols);

    rep.grading_ok = true;
    rep.tensor_module_ok = true;
    SparseVec one = a.unit_sv();
    for (size_t x = 0; x < np && rep.grading_ok; ++x) {
        SparseVec ax = sv_from_dense(rep.primaries[x].coords);
        // tensor module law needs 1 . P(a) = omega a, P(1) a = a, {1, a} = chi a
        if (a.mul(one, a.apply_p(ax)) != sv_scale(rep.primaries[x].omega, ax) ||
            a.mul(a.apply_p(one), ax) != ax ||
            a.brk(one, ax) != sv_scale(rep.primaries[x].chi, ax)) {
            rep.tensor_module_ok = false;
            rep.witness = "tensor-module law fails for primary " + std::to_string(x);
        }
        for (size_t y = 0; y < np; ++y) {
            SparseVec ay = sv_from_dense(rep.primaries[y].coords);
            Scalar target = coset_rep(rep.twists[x].coset + rep.twists[y].coset);
            const SparseVec parts[3] = {a.mul(ax, a.apply_p(ay)), a.mul(a.apply_p(ax), ay), a.brk(ax, ay)};
            for (const auto& part : parts) {
                if (sv_is_zero(part)) continue;
                auto comps = dec.solve(sv_to_dense(part, a.dim()));
                if (!comps) throw InternalError("grading: decomposition over the primary basis failed");
                for (size_t z = 0; z < np; ++z)
                    if (!(*comps)[z].is_zero() && rep.twists[z].coset != target) {
                        rep.grading_ok = false;
                        rep.witness = "coset grading violated at primary pair (" + std::to_string(x) + "," +
                                      std::to_string(y) + ")";
                        break;
                    }
                if (!rep.grading_ok) break;
            }
            if (!rep.grading_ok) break;
        }
    }
    return rep;
}

// --- n-th product tables ----------------------------------------------------------

/// Products of the conformal algebra attached to L(A) on generators:
/// a_(0) b = D(P(a) b) + {a,b} + <a,b>  (stored as D-part and plain part),
/// a_(1) b = P(a) b + a P(b), and a_(n) b = 0 for n >= 2.
struct NthProductTable {
    size_t dim = 0;
    std::vector<SparseVec> p0_dpart;  // P(a) b
    std::vector<SparseVec> p0_plain;  // {a,b} + <a,b>
    std::vector<SparseVec> p1;        // P(a) b + a P(b)

    const SparseVec& dpart(size_t i, size_t j) const { return p0_dpart[i * dim + j]; }
    const SparseVec& plain(size_t i, size_t j) const { return p0_plain[i * dim + j]; }
    const SparseVec& first(size_t i, size_t j) const { return p1[i * dim + j]; }

    friend bool operator==(const NthProductTable& a, const NthProductTable& b) {
        return a.dim == b.dim && a.p0_dpart == b.p0_dpart && a.p0_plain == b.p0_plain && a.p1 == b.p1;
    }
};

inline NthProductTable nth_products(const QPAlgebra& a) {
    size_t n = a.dim();
    NthProductTable t;
    t.dim = n;
    t.p0_dpart.resize(n * n);
    t.p0_plain.resize(n * n);
    t.p1.resize(n * n);
    LoopStructure ls(a);
    std::vector<SparseVec> ang = angle_table(a);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            t.p0_dpart[i * n + j] = ls.v(i, j);
            t.p0_plain[i * n + j] = sv_add(a.bracket(i, j), ang[i * n + j]);
            t.p1[i * n + j] = sv_add(ls.v(i, j), ls.u(i, j));
        }
    return t;
}

/// Structural symmetry of the table (verified, not assumed):
/// b_(1) a = (-1)^{p_a p_b} a_(1) b, and the conformal skew-symmetry of the
/// 0-th product, b_(0) a = -(-1)^{p_a p_b} (a_(0) b - D(a_(1) b)).
inline std::optional<std::string> nth_table_symmetry_witness(const QPAlgebra& a, const NthProductTable& t) {
    size_t n = t.dim;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Scalar s(koszul(a.parity(i), a.parity(j)));
            if (t.first(j, i) != sv_scale(s, t.first(i, j)))
                return "first-product symmetry fails at (" + a.labels()[i] + "," + a.labels()[j] + ")";
            // D-part of b_(0) a: P(b) a must equal (-1)^{pq} (a_(1) b - P(a) b)
            SparseVec expect_d = sv_scale(s, sv_sub(t.first(i, j), t.dpart(i, j)));
            if (t.dpart(j, i) != expect_d)
                return "zeroth-product D-part skew fails at (" + a.labels()[i] + "," + a.labels()[j] + ")";
            if (t.plain(j, i) != sv_scale(-s, t.plain(i, j)))
                return "zeroth-product plain-part skew fails at (" + a.labels()[i] + "," + a.labels()[j] + ")";
        }
    return std::nullopt;
}

/// Table comparison behind the twisted-form statement: the conformal algebras
/// of L(A) and L(reduce(A)) share the same n-th products.
inline bool reduced_form_comparison(const QPAlgebra& a) {
    return nth_products(a) == nth_products(reduce(a));
}

/// Checks that a linear map phi is a QP automorphism (respects product,
/// bracket, P and the unit) and that the induced conformal-algebra map
/// respects the n-th product table: phi(a)_(k) phi(b) = phi(a_(k) b).
inline std::optional<std::string> automorphism_respects_table(const QPAlgebra& a, const Matrix& phi) {
    size_t n = a.dim();
    auto apply = [&](const SparseVec& v) { return sv_from_dense(phi.apply(sv_to_dense(v, n))); };
    SparseVec one = a.unit_sv();
    if (apply(one) != one) return std::string("phi does not fix the unit");
    if (!(phi * a.p_matrix() == a.p_matrix() * phi)) return std::string("phi does not commute with P");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec ei{{static_cast<int>(i), Scalar(1)}};
            SparseVec ej{{static_cast<int>(j), Scalar(1)}};
            if (a.mul(apply(ei), apply(ej)) != apply(a.product(i, j)))
                return "phi is not multiplicative at (" + a.labels()[i] + "," + a.labels()[j] + ")";
            if (a.brk(apply(ei), apply(ej)) != apply(a.bracket(i, j)))
                return "phi does not respect the bracket at (" + a.labels()[i] + "," + a.labels()[j] + ")";
        }
    NthProductTable t = nth_products(a);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            SparseVec pi = apply(SparseVec{{static_cast<int>(i), Scalar(1)}});
            SparseVec pj = apply(SparseVec{{static_cast<int>(j), Scalar(1)}});
            // evaluate the table bilinearly on the images
            SvAccum d(n), pl(n), f1(n);
            for (const auto& [x, cx] : pi)
                for (const auto& [y, cy] : pj) {
                    Scalar c = cx * cy;
                    d.axpy(c, t.dpart(x, y));
                    pl.axpy(c, t.plain(x, y));
                    f1.axpy(c, t.first(x, y));
                }
            if (d.take() != apply(t.dpart(i, j)) || pl.take() != apply(t.plain(i, j)) ||
                f1.take() != apply(t.first(i, j)))
                return "induced map fails on the n-th product table at (" + a.labels()[i] + "," + a.labels()[j] +
                       ")";
        }
    return std::nullopt;
}

}  // namespace qpalg
