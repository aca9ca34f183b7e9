#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpalg/errors.hpp"
#include "qpalg/linalg.hpp"
#include "qpalg/scalar.hpp"

namespace qpalg {

/// Monomial in xi_1 ... xi_N as an index-set bitmask; bit i-1 is xi_i.
using Monomial = std::uint32_t;

inline int monomial_degree(Monomial m) { return std::popcount(m); }

/// Degree, then lexicographic on the ascending index tuple. This is the basis
/// order used everywhere (note it is not plain bitmask order: {1,4} < {2,3}).
inline bool monomial_less(Monomial a, Monomial b) {
    int da = monomial_degree(a), db = monomial_degree(b);
    if (da != db) return da < db;
    while (a != 0 && b != 0) {
        int ia = std::countr_zero(a), ib = std::countr_zero(b);
        if (ia != ib) return ia < ib;
        a &= a - 1;
        b &= b - 1;
    }
    return false;
}

struct MonomialOrder {
    bool operator()(Monomial a, Monomial b) const { return monomial_less(a, b); }
};

/// Sign of sorting the concatenation xi_A xi_B into ascending order,
/// for disjoint index sets A and B.
inline int merge_sign(Monomial a, Monomial b) {
    int swaps = 0;
    Monomial bb = b;
    while (bb != 0) {
        int j = std::countr_zero(bb);
        swaps += std::popcount(a >> (j + 1));
        bb &= bb - 1;
    }
    return (swaps % 2 == 0) ? 1 : -1;
}

/// Maximum generator count; dimensions grow as 2^N. Overridable through the
/// QPALG_MAX_N environment variable.
inline int generator_cap() {
    if (const char* env = std::getenv("QPALG_MAX_N")) {
        int v = std::atoi(env);
        if (v > 0 && v <= 20) return v;
    }
    return 8;
}

inline void check_generator_count(int n) {
    if (n < 0) throw SizeError("generator count must be nonnegative");
    if (n > generator_cap()) throw SizeError("generator count " + std::to_string(n) + " exceeds cap " + std::to_string(generator_cap()));
}

/// Element of the Grassmann algebra Lambda(N): a finite linear combination of
/// sign-normalized monomials with Scalar coefficients. Immutable value type.
class GrassmannElement {
  public:
    explicit GrassmannElement(int n = 0) : n_(n) { check_generator_count(n); }

    static GrassmannElement zero(int n) { return GrassmannElement(n); }

    static GrassmannElement one(int n) { return monomial_term(n, 0, Scalar(1)); }

    /// xi_i, 1-based index.
    static GrassmannElement generator(int n, int i) {
        if (i < 1 || i > n) throw IndexError("generator index out of range");
        return monomial_term(n, Monomial(1) << (i - 1), Scalar(1));
    }

    static GrassmannElement monomial_term(int n, Monomial m, const Scalar& c) {
        GrassmannElement e(n);
        if (m >= (Monomial(1) << n)) throw IndexError("monomial outside Lambda(N)");
        if (!c.is_zero()) e.terms_[m] = c;
        return e;
    }

    int generators() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Scalar, MonomialOrder>& terms() const { return terms_; }

    Scalar coefficient(Monomial m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Scalar() : it->second;
    }

    /// 0 or 1 when all monomials share degree parity (zero counts as even);
    /// nullopt for mixed elements.
    std::optional<int> parity() const {
        std::optional<int> p;
        for (const auto& [m, c] : terms_) {
            int mp = monomial_degree(m) % 2;
            if (!p) p = mp;
            else if (*p != mp) return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    bool is_homogeneous() const { return parity().has_value(); }

    int max_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
        return d;
    }

    GrassmannElement operator-() const {
        GrassmannElement r(n_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    friend GrassmannElement operator+(const GrassmannElement& a, const GrassmannElement& b) {
        a.check_same(b);
        GrassmannElement r = a;
        for (const auto& [m, c] : b.terms_) {
            auto it = r.terms_.find(m);
            if (it == r.terms_.end()) {
                r.terms_[m] = c;
            } else {
                it->second += c;
                if (it->second.is_zero()) r.terms_.erase(it);
            }
        }
        return r;
    }

    friend GrassmannElement operator-(const GrassmannElement& a, const GrassmannElement& b) { return a + (-b); }

    friend GrassmannElement operator*(const Scalar& c, const GrassmannElement& a) {
        GrassmannElement r(a.n_);
        if (c.is_zero()) return r;
        for (const auto& [m, v] : a.terms_) r.terms_[m] = c * v;
        return r;
    }

    /// Supercommutative product; signs come from the sorting permutation.
    friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
        a.check_same(b);
        GrassmannElement r(a.n_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                if ((ma & mb) != 0) continue;  // nilpotence
                Scalar c = ca * cb;
                if (merge_sign(ma, mb) < 0) c = -c;
                Monomial m = ma | mb;
                auto it = r.terms_.find(m);
                if (it == r.terms_.end()) {
                    if (!c.is_zero()) r.terms_[m] = c;
                } else {
                    it->second += c;
                    if (it->second.is_zero()) r.terms_.erase(it);
                }
            }
        return r;
    }

    friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    void check_same(const GrassmannElement& o) const {
        if (n_ != o.n_) throw DimensionError("Grassmann elements over different generator counts");
    }

  private:
    int n_;
    std::map<Monomial, Scalar, MonomialOrder> terms_;
};

inline GrassmannElement gr_mul(const GrassmannElement& a, const GrassmannElement& b) { return a * b; }

/// Left derivation d/d xi_i.
inline GrassmannElement left_deriv(int i, const GrassmannElement& f) {
    if (i < 1 || i > f.generators()) throw IndexError("derivation index out of range");
    Monomial bit = Monomial(1) << (i - 1);
    GrassmannElement r(f.generators());
    for (const auto& [m, c] : f.terms()) {
        if ((m & bit) == 0) continue;
        int below = std::popcount(m & (bit - 1));
        Scalar v = (below % 2 == 0) ? c : -c;
        r = r + GrassmannElement::monomial_term(f.generators(), m ^ bit, v);
    }
    return r;
}

/// Right derivation, (f xi_i) *d_i = f and f *d_i = 0 for f free of xi_i.
inline GrassmannElement right_deriv(const GrassmannElement& f, int i) {
    if (i < 1 || i > f.generators()) throw IndexError("derivation index out of range");
    Monomial bit = Monomial(1) << (i - 1);
    GrassmannElement r(f.generators());
    for (const auto& [m, c] : f.terms()) {
        if ((m & bit) == 0) continue;
        int above = std::popcount(m >> i);
        Scalar v = (above % 2 == 0) ? c : -c;
        r = r + GrassmannElement::monomial_term(f.generators(), m ^ bit, v);
    }
    return r;
}

/// Coefficient of the top monomial xi_1 ... xi_N.
inline Scalar berezin_integral(const GrassmannElement& f) {
    Monomial top = (Monomial(1) << f.generators()) - 1;
    return f.coefficient(top);
}

/// Membership in Lambda°(N), the kernel of the Berezin integral.
inline bool lambda_circle_member(const GrassmannElement& f) { return berezin_integral(f).is_zero(); }

/// Hodge dual of a monomial for N = 6: the signed complement with
/// m * dual(m) = xi_1 ... xi_6.
inline std::pair<int, Monomial> hodge_dual(Monomial m, int n = 6) {
    if (n != 6) throw UnsupportedError("Hodge dual is defined for N = 6 only");
    Monomial full = (Monomial(1) << 6) - 1;
    if (m > full) throw IndexError("monomial outside Lambda(6)");
    Monomial comp = full ^ m;
    return {merge_sign(m, comp), comp};
}

inline GrassmannElement hodge_dual(const GrassmannElement& f) {
    if (f.generators() != 6) throw UnsupportedError("Hodge dual is defined for N = 6 only");
    GrassmannElement r(6);
    for (const auto& [m, c] : f.terms()) {
        auto [sign, comp] = hodge_dual(m);
        r = r + GrassmannElement::monomial_term(6, comp, sign < 0 ? -c : c);
    }
    return r;
}

/// Element of W(N) = sum_i Lambda(N) d_i, stored by its N coefficients.
class SuperDerivation {
  public:
    explicit SuperDerivation(int n = 0) : n_(n), comps_(static_cast<size_t>(n), GrassmannElement(n)) {
        check_generator_count(n);
    }

    static SuperDerivation zero(int n) { return SuperDerivation(n); }

    /// P * d_i for a single coefficient.
    static SuperDerivation term(const GrassmannElement& p, int i) {
        SuperDerivation r(p.generators());
        if (i < 1 || i > p.generators()) throw IndexError("derivation component out of range");
        r.comps_[i - 1] = p;
        return r;
    }

    static SuperDerivation partial(int n, int i) { return term(GrassmannElement::one(n), i); }

    int generators() const { return n_; }
    const GrassmannElement& component(int i) const { return comps_.at(i - 1); }
    const std::vector<GrassmannElement>& components() const { return comps_; }

    bool is_zero() const {
        for (const auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    /// Parity of sum P_i d_i is parity(P_i) + 1; defined when uniform.
    std::optional<int> parity() const {
        std::optional<int> p;
        for (const auto& c : comps_) {
            if (c.is_zero()) continue;
            auto cp = c.parity();
            if (!cp) return std::nullopt;
            int dp = (*cp + 1) % 2;
            if (!p) p = dp;
            else if (*p != dp) return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    GrassmannElement apply(const GrassmannElement& f) const {
        if (f.generators() != n_) throw DimensionError("derivation applied across generator counts");
        GrassmannElement r(n_);
        for (int i = 1; i <= n_; ++i)
            if (!comps_[i - 1].is_zero()) r = r + comps_[i - 1] * left_deriv(i, f);
        return r;
    }

    SuperDerivation operator-() const {
        SuperDerivation r(n_);
        for (int i = 0; i < n_; ++i) r.comps_[i] = -comps_[i];
        return r;
    }

    friend SuperDerivation operator+(const SuperDerivation& a, const SuperDerivation& b) {
        a.check_same(b);
        SuperDerivation r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.comps_[i] = a.comps_[i] + b.comps_[i];
        return r;
    }

    friend SuperDerivation operator-(const SuperDerivation& a, const SuperDerivation& b) { return a + (-b); }

    friend SuperDerivation operator*(const Scalar& c, const SuperDerivation& a) {
        SuperDerivation r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.comps_[i] = c * a.comps_[i];
        return r;
    }

    /// Left module action f * (sum P_i d_i) = sum (f P_i) d_i.
    friend SuperDerivation operator*(const GrassmannElement& f, const SuperDerivation& a) {
        if (f.generators() != a.n_) throw DimensionError("module action across generator counts");
        SuperDerivation r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.comps_[i] = f * a.comps_[i];
        return r;
    }

    friend bool operator==(const SuperDerivation& a, const SuperDerivation& b) {
        return a.n_ == b.n_ && a.comps_ == b.comps_;
    }

    void check_same(const SuperDerivation& o) const {
        if (n_ != o.n_) throw DimensionError("derivations over different generator counts");
    }

  private:
    int n_;
    std::vector<GrassmannElement> comps_;
};

namespace detail {

/// Splits into (even part, odd part) by derivation parity.
inline std::pair<SuperDerivation, SuperDerivation> split_parity(const SuperDerivation& a) {
    int n = a.generators();
    SuperDerivation even(n), odd(n);
    for (int i = 1; i <= n; ++i) {
        GrassmannElement ce(n), co(n);
        for (const auto& [m, c] : a.component(i).terms()) {
            // coefficient degree odd -> derivation even
            if (monomial_degree(m) % 2 == 1) ce = ce + GrassmannElement::monomial_term(n, m, c);
            else co = co + GrassmannElement::monomial_term(n, m, c);
        }
        even = even + SuperDerivation::term(ce, i);
        odd = odd + SuperDerivation::term(co, i);
    }
    return {even, odd};
}

inline SuperDerivation w_bracket_homogeneous(const SuperDerivation& a, int pa, const SuperDerivation& b, int pb) {
    int n = a.generators();
    SuperDerivation r(n);
    int sign = (pa * pb) % 2 == 0 ? 1 : -1;
    for (int i = 1; i <= n; ++i) {
        GrassmannElement comp = a.apply(b.component(i)) - Scalar(sign) * b.apply(a.component(i));
        r = r + SuperDerivation::term(comp, i);
    }
    return r;
}

}  // namespace detail

/// Supercommutator [a, b] = a b - (-1)^{p(a) p(b)} b a in canonical
/// sum Q_i d_i form; components recovered by applying to each xi_i.
inline SuperDerivation w_bracket(const SuperDerivation& a, const SuperDerivation& b) {
    a.check_same(b);
    auto [ae, ao] = detail::split_parity(a);
    auto [be, bo] = detail::split_parity(b);
    SuperDerivation r(a.generators());
    r = r + detail::w_bracket_homogeneous(ae, 0, be, 0);
    r = r + detail::w_bracket_homogeneous(ae, 0, bo, 1);
    r = r + detail::w_bracket_homogeneous(ao, 1, be, 0);
    r = r + detail::w_bracket_homogeneous(ao, 1, bo, 1);
    return r;
}

/// div(sum P_i d_i) = - sum (P_i) *d_i.
inline GrassmannElement divergence(const SuperDerivation& a) {
    GrassmannElement r(a.generators());
    for (int i = 1; i <= a.generators(); ++i) r = r - right_deriv(a.component(i), i);
    return r;
}

/// The Euler-type derivation d = -(1/N) sum xi_i d_i.
inline SuperDerivation make_d(int n) {
    if (n < 1) throw SizeError("d requires at least one generator");
    SuperDerivation r(n);
    Scalar c = Scalar(-1, n);
    for (int i = 1; i <= n; ++i)
        r = r + SuperDerivation::term(c * GrassmannElement::generator(n, i), i);
    return r;
}

// --- coordinates ------------------------------------------------------------

/// Monomials of Lambda(N) in degree-lex order.
inline std::vector<Monomial> lambda_basis(int n) {
    std::vector<Monomial> all;
    for (Monomial m = 0; m < (Monomial(1) << n); ++m) all.push_back(m);
    std::sort(all.begin(), all.end(), monomial_less);
    return all;
}

/// Basis of W(N): (monomial in degree-lex order, component index 1..N).
inline std::vector<std::pair<Monomial, int>> w_basis(int n) {
    std::vector<std::pair<Monomial, int>> out;
    for (Monomial m : lambda_basis(n))
        for (int i = 1; i <= n; ++i) out.emplace_back(m, i);
    return out;
}

inline Vec lambda_to_vec(const GrassmannElement& f) {
    auto basis = lambda_basis(f.generators());
    Vec v(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) v[k] = f.coefficient(basis[k]);
    return v;
}

inline GrassmannElement lambda_from_vec(int n, const Vec& v) {
    auto basis = lambda_basis(n);
    if (v.size() != basis.size()) throw ShapeError("lambda_from_vec: wrong length");
    GrassmannElement f(n);
    for (size_t k = 0; k < basis.size(); ++k)
        if (!v[k].is_zero()) f = f + GrassmannElement::monomial_term(n, basis[k], v[k]);
    return f;
}

inline Vec w_to_vec(const SuperDerivation& a) {
    auto basis = w_basis(a.generators());
    Vec v(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) v[k] = a.component(basis[k].second).coefficient(basis[k].first);
    return v;
}

inline SuperDerivation w_from_vec(int n, const Vec& v) {
    auto basis = w_basis(n);
    if (v.size() != basis.size()) throw ShapeError("w_from_vec: wrong length");
    SuperDerivation a(n);
    for (size_t k = 0; k < basis.size(); ++k)
        if (!v[k].is_zero())
            a = a + SuperDerivation::term(GrassmannElement::monomial_term(n, basis[k].first, v[k]), basis[k].second);
    return a;
}

/// Matrix of a derivation acting on Lambda(N) in the degree-lex monomial basis.
inline Matrix derivation_matrix(const SuperDerivation& a) {
    auto basis = lambda_basis(a.generators());
    Matrix m(basis.size(), basis.size());
    for (size_t j = 0; j < basis.size(); ++j) {
        GrassmannElement img = a.apply(GrassmannElement::monomial_term(a.generators(), basis[j], Scalar(1)));
        Vec col = lambda_to_vec(img);
        for (size_t i = 0; i < basis.size(); ++i) m.at(i, j) = col[i];
    }
    return m;
}

/// Exact kernel basis of the divergence map on W(N). Deterministic: vectors
/// are ordered by their leading W(N) coordinate (free columns of the kernel).
inline std::vector<SuperDerivation> s_basis(int n) {
    auto wb = w_basis(n);
    auto lb = lambda_basis(n);
    Matrix div_matrix(lb.size(), wb.size());
    for (size_t col = 0; col < wb.size(); ++col) {
        SuperDerivation e = SuperDerivation::term(
            GrassmannElement::monomial_term(n, wb[col].first, Scalar(1)), wb[col].second);
        Vec image = lambda_to_vec(divergence(e));
        for (size_t row = 0; row < lb.size(); ++row) div_matrix.at(row, col) = image[row];
    }
    std::vector<SuperDerivation> out;
    for (const auto& v : kernel(div_matrix)) out.push_back(w_from_vec(n, v));
    return out;
}

// --- text format: "3/2*x1x3 - i*x2" ----------------------------------------

inline std::string to_string(const GrassmannElement& f) {
    if (f.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : f.terms()) {
        std::string mono;
        for (Monomial mm = m; mm != 0; mm &= mm - 1)
            mono += "x" + std::to_string(std::countr_zero(mm) + 1);
        std::string term;
        if (mono.empty()) {
            term = to_string(c);
        } else if (c.is_one()) {
            term = mono;
        } else if ((-c).is_one()) {
            term = "-" + mono;
        } else {
            bool mixed = sgn(c.re) != 0 && sgn(c.im) != 0;
            term = (mixed ? "(" + to_string(c) + ")" : to_string(c)) + "*" + mono;
        }
        if (first) {
            out = term;
        } else if (!term.empty() && term[0] == '-') {
            out += " - " + term.substr(1);
        } else {
            out += " + " + term;
        }
        first = false;
    }
    return out;
}

inline GrassmannElement parse_grassmann(int n, std::string_view input) {
    std::string s;
    for (char c : input)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty Grassmann element");
    if (s == "0") return GrassmannElement::zero(n);

    GrassmannElement result(n);
    size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        Scalar sign(1);
        if (s[pos] == '+') {
            ++pos;
        } else if (s[pos] == '-') {
            sign = Scalar(-1);
            ++pos;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms");
        }
        first = false;
        if (pos >= s.size()) throw ParseError("dangling sign");

        Scalar coef(1);
        bool have_coef = false;
        if (s[pos] == '(') {
            size_t close = s.find(')', pos);
            if (close == std::string::npos) throw ParseError("unbalanced parenthesis");
            coef = parse_scalar(s.substr(pos + 1, close - pos - 1));
            have_coef = true;
            pos = close + 1;
            if (pos < s.size() && s[pos] == '*') ++pos;
        } else if (s[pos] != 'x') {
            // scalar prefix up to the next 'x' at this nesting level or end of term
            size_t end = pos;
            while (end < s.size() && s[end] != 'x' && !((s[end] == '+' || s[end] == '-') && end > pos && s[end - 1] != '*' && s[end - 1] != '/'))
                ++end;
            std::string prefix(s.substr(pos, end - pos));
            // a trailing '*' separates coefficient from monomial
            if (!prefix.empty() && prefix.back() == '*') prefix.pop_back();
            coef = parse_scalar(prefix);
            have_coef = true;
            pos = end;
        }

        GrassmannElement term = Scalar(sign * coef) * GrassmannElement::one(n);
        bool have_mono = false;
        while (pos < s.size() && s[pos] == 'x') {
            ++pos;
            size_t dstart = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == dstart) throw ParseError("expected generator index after 'x'");
            int idx = std::stoi(std::string(s.substr(dstart, pos - dstart)));
            term = term * GrassmannElement::generator(n, idx);
            have_mono = true;
        }
        if (!have_coef && !have_mono) throw ParseError("empty term in Grassmann element");
        result = result + term;
    }
    return result;
}

}  // namespace qpalg
