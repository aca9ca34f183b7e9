#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpalg/errors.hpp"
#include "qpalg/scalar.hpp"

namespace qpalg {

using Vec = std::vector<Scalar>;

inline bool vec_is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_zero(); });
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    Vec r(a);
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec vec_scale(const Scalar& c, const Vec& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
    return r;
}

/// Dense matrix over the Scalar field. Operations never mutate their inputs.
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    Scalar& at(size_t r, size_t c) { return a_[r * cols_ + c]; }
    const Scalar& at(size_t r, size_t c) const { return a_[r * cols_ + c]; }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

    friend Matrix operator+(const Matrix& x, const Matrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw ShapeError("matrix add: shape mismatch");
        Matrix r(x.rows_, x.cols_);
        for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
        return r;
    }

    friend Matrix operator-(const Matrix& x, const Matrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw ShapeError("matrix sub: shape mismatch");
        Matrix r(x.rows_, x.cols_);
        for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
        return r;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.cols_ != y.rows_) throw ShapeError("matrix mul: shape mismatch");
        Matrix r(x.rows_, y.cols_);
        for (size_t i = 0; i < x.rows_; ++i)
            for (size_t k = 0; k < x.cols_; ++k) {
                const Scalar& xik = x.at(i, k);
                if (xik.is_zero()) continue;
                for (size_t j = 0; j < y.cols_; ++j) {
                    const Scalar& ykj = y.at(k, j);
                    if (!ykj.is_zero()) r.at(i, j) += xik * ykj;
                }
            }
        return r;
    }

    friend Matrix operator*(const Scalar& c, const Matrix& y) {
        Matrix r(y.rows_, y.cols_);
        for (size_t i = 0; i < y.a_.size(); ++i) r.a_[i] = c * y.a_[i];
        return r;
    }

    Vec apply(const Vec& v) const {
        if (v.size() != cols_) throw ShapeError("matrix apply: size mismatch");
        Vec r(rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) {
                const Scalar& m = at(i, j);
                if (!m.is_zero() && !v[j].is_zero()) r[i] += m * v[j];
            }
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const Scalar& s) { return s.is_zero(); });
    }

  private:
    size_t rows_, cols_;
    std::vector<Scalar> a_;
};

struct RrefResult {
    Matrix r;
    std::vector<size_t> pivot_cols;
    size_t rank = 0;
};

inline RrefResult rref(Matrix m) {
    RrefResult out;
    size_t rows = m.rows(), cols = m.cols();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t pivot = rows;
        for (size_t i = row; i < rows; ++i)
            if (!m.at(i, col).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot == rows) continue;
        if (pivot != row)
            for (size_t j = 0; j < cols; ++j) std::swap(m.at(pivot, j), m.at(row, j));
        Scalar inv = m.at(row, col).inv();
        for (size_t j = col; j < cols; ++j) m.at(row, j) = inv * m.at(row, j);
        for (size_t i = 0; i < rows; ++i) {
            if (i == row || m.at(i, col).is_zero()) continue;
            Scalar f = m.at(i, col);
            for (size_t j = col; j < cols; ++j) m.at(i, j) = m.at(i, j) - f * m.at(row, j);
        }
        out.pivot_cols.push_back(col);
        ++row;
    }
    out.rank = row;
    out.r = std::move(m);
    return out;
}

inline size_t rank(const Matrix& m) { return rref(m).rank; }

/// Exact kernel basis. Vectors are indexed by free columns in ascending order;
/// each has a 1 at its free column and 0 at all other free columns.
inline std::vector<Vec> kernel(const Matrix& m) {
    RrefResult rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vec v(m.cols());
        v[free] = Scalar(1);
        for (size_t r = 0; r < rr.pivot_cols.size(); ++r) v[rr.pivot_cols[r]] = -rr.r.at(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves a linear system with columns of `basis_cols` as unknown coefficients;
/// reusable for many right-hand sides. Rejects inconsistent systems.
class Decomposer {
  public:
    Decomposer() = default;

    /// columns: d vectors of length n, treated as the columns of B.
    explicit Decomposer(const std::vector<Vec>& columns) {
        d_ = columns.size();
        n_ = d_ == 0 ? 0 : columns[0].size();
        Matrix aug(n_, d_ + n_);
        for (size_t j = 0; j < d_; ++j)
            for (size_t i = 0; i < n_; ++i) aug.at(i, j) = columns[j][i];
        for (size_t i = 0; i < n_; ++i) aug.at(i, d_ + i) = Scalar(1);
        RrefResult rr = rref(std::move(aug));
        rank_ = 0;
        for (size_t c : rr.pivot_cols)
            if (c < d_) ++rank_;
        rr_ = std::move(rr);
    }

    size_t rank() const { return rank_; }
    bool full_column_rank() const { return rank_ == d_; }

    /// Returns x with B x = v, or nullopt when v is not in the column span.
    std::optional<Vec> solve(const Vec& v) const {
        if (v.size() != n_) throw ShapeError("decomposer: size mismatch");
        // E v where [R | E] = rref([B | I])
        Vec ev(n_);
        for (size_t r = 0; r < n_; ++r)
            for (size_t i = 0; i < n_; ++i) {
                const Scalar& e = rr_.r.at(r, d_ + i);
                if (!e.is_zero() && !v[i].is_zero()) ev[r] += e * v[i];
            }
        Vec x(d_);
        size_t pr = 0;
        for (size_t c : rr_.pivot_cols) {
            if (c < d_) {
                x[c] = ev[pr];
                ++pr;
            }
        }
        // rows whose pivot is not a B-column (or no pivot) must vanish
        for (size_t r = pr; r < n_; ++r) {
            bool pivot_in_b = false;
            if (r < rr_.pivot_cols.size() && rr_.pivot_cols[r] < d_) pivot_in_b = true;
            if (!pivot_in_b && !ev[r].is_zero()) return std::nullopt;
        }
        // free B-columns would make solutions non-unique; x as built sets them to 0,
        // which is still a valid solution of B x = v.
        return x;
    }

  private:
    size_t n_ = 0, d_ = 0, rank_ = 0;
    RrefResult rr_;
};

inline std::optional<Vec> solve(const Matrix& a, const Vec& b) {
    std::vector<Vec> cols(a.cols(), Vec(a.rows()));
    for (size_t j = 0; j < a.cols(); ++j)
        for (size_t i = 0; i < a.rows(); ++i) cols[j][i] = a.at(i, j);
    return Decomposer(cols).solve(b);
}

inline std::optional<Matrix> inverse(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("inverse: non-square matrix");
    size_t n = a.rows();
    Matrix aug(n, 2 * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, n + i) = Scalar(1);
    }
    RrefResult rr = rref(std::move(aug));
    if (rr.rank < n || rr.pivot_cols[n - 1] != n - 1) return std::nullopt;
    Matrix inv(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv.at(i, j) = rr.r.at(i, n + j);
    return inv;
}

// --- polynomials over Scalar (coefficient index = degree) -----------------

using Poly = std::vector<Scalar>;

inline void poly_trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int poly_deg(const Poly& p) {
    for (size_t i = p.size(); i > 0; --i)
        if (!p[i - 1].is_zero()) return static_cast<int>(i - 1);
    return -1;
}

inline Scalar poly_eval(const Poly& p, const Scalar& x) {
    Scalar acc;
    for (size_t i = p.size(); i > 0; --i) acc = acc * x + p[i - 1];
    return acc;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j)
            if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline Poly poly_deriv(const Poly& p) {
    Poly r;
    for (size_t i = 1; i < p.size(); ++i) r.push_back(Scalar(static_cast<long>(i)) * p[i]);
    return r;
}

/// Exact division with remainder; the divisor must be nonzero.
inline std::pair<Poly, Poly> poly_divmod(Poly num, const Poly& den) {
    int dd = poly_deg(den);
    if (dd < 0) throw DivisionByZero("polynomial division by zero");
    Poly q;
    int dn = poly_deg(num);
    if (dn < dd) return {q, num};
    q.assign(dn - dd + 1, Scalar());
    Scalar lead_inv = den[dd].inv();
    for (int k = dn - dd; k >= 0; --k) {
        Scalar c = num[k + dd] * lead_inv;
        q[k] = c;
        if (c.is_zero()) continue;
        for (int j = 0; j <= dd; ++j) num[k + j] -= c * den[j];
    }
    poly_trim(num);
    return {q, num};
}

inline Poly poly_monic(Poly p) {
    int d = poly_deg(p);
    if (d < 0) return p;
    Scalar inv = p[d].inv();
    for (auto& c : p) c = inv * c;
    p.resize(d + 1);
    return p;
}

inline Poly poly_gcd(Poly a, Poly b) {
    poly_trim(a);
    poly_trim(b);
    while (poly_deg(b) >= 0) {
        Poly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (poly_deg(a) >= 0) a = poly_monic(std::move(a));
    return a;
}

// --- characteristic polynomial via Hessenberg reduction -------------------

namespace detail {

inline Matrix to_hessenberg(Matrix h) {
    size_t n = h.rows();
    if (n < 3) return h;
    for (size_t k = 0; k + 2 < n; ++k) {
        size_t pivot = n;
        for (size_t i = k + 1; i < n; ++i)
            if (!h.at(i, k).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot == n) continue;
        if (pivot != k + 1) {
            for (size_t j = 0; j < n; ++j) std::swap(h.at(pivot, j), h.at(k + 1, j));
            for (size_t i = 0; i < n; ++i) std::swap(h.at(i, pivot), h.at(i, k + 1));
        }
        Scalar inv = h.at(k + 1, k).inv();
        for (size_t i = k + 2; i < n; ++i) {
            if (h.at(i, k).is_zero()) continue;
            Scalar f = h.at(i, k) * inv;
            for (size_t j = 0; j < n; ++j) h.at(i, j) -= f * h.at(k + 1, j);
            for (size_t r = 0; r < n; ++r) h.at(r, k + 1) += f * h.at(r, i);
        }
    }
    return h;
}

}  // namespace detail

/// det(x I - A), monic of degree n.
inline Poly charpoly(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("charpoly: non-square matrix");
    size_t n = a.rows();
    Matrix h = detail::to_hessenberg(a);
    // p_k = det(x I_k - H_k), expanded along the last row of the leading minor
    std::vector<Poly> p(n + 1);
    p[0] = Poly{Scalar(1)};
    for (size_t k = 1; k <= n; ++k) {
        Poly term = poly_mul(Poly{-h.at(k - 1, k - 1), Scalar(1)}, p[k - 1]);
        Scalar sub(1);
        for (size_t m = k - 1; m >= 1; --m) {
            sub = sub * h.at(m, m - 1);  // subdiagonal product h_{m+1,m} ... h_{k,k-1}
            if (sub.is_zero()) break;
            const Scalar& hm = h.at(m - 1, k - 1);
            if (hm.is_zero()) continue;
            Scalar c = hm * sub;
            for (size_t j = 0; j < p[m - 1].size(); ++j) {
                if (term.size() <= j) term.resize(j + 1);
                term[j] -= c * p[m - 1][j];
            }
        }
        p[k] = std::move(term);
    }
    Poly out = std::move(p[n]);
    out.resize(n + 1);
    return out;
}

// --- Gaussian integers, used to locate rational eigenvalues ---------------

namespace detail {

struct GaussInt {
    mpz_class re, im;
    bool operator==(const GaussInt& o) const { return re == o.re && im == o.im; }
    bool operator<(const GaussInt& o) const { return re < o.re || (re == o.re && im < o.im); }
};

inline mpz_class gint_norm(const GaussInt& g) { return g.re * g.re + g.im * g.im; }

inline GaussInt gint_mul(const GaussInt& a, const GaussInt& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

/// Exact division a / b when b | a in Z[i].
inline std::optional<GaussInt> gint_exact_div(const GaussInt& a, const GaussInt& b) {
    mpz_class n = gint_norm(b);
    if (n == 0) return std::nullopt;
    mpz_class re = a.re * b.re + a.im * b.im;
    mpz_class im = a.im * b.re - a.re * b.im;
    if (re % n != 0 || im % n != 0) return std::nullopt;
    return GaussInt{re / n, im / n};
}

/// Square root of -1 modulo a prime p = 1 (mod 4).
inline mpz_class sqrt_minus_one(const mpz_class& p) {
    mpz_class e = (p - 1) / 4;
    for (mpz_class a = 2; a < p; ++a) {
        mpz_class x;
        mpz_powm(x.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        if ((x * x) % p == p - 1) return x;
    }
    throw InternalError("no sqrt(-1) mod p found");
}

inline GaussInt gint_gcd(GaussInt a, GaussInt b) {
    while (gint_norm(b) != 0) {
        // nearest-integer quotient keeps the remainder norm strictly decreasing
        mpz_class n = gint_norm(b);
        mpz_class re2 = 2 * (a.re * b.re + a.im * b.im);
        mpz_class im2 = 2 * (a.im * b.re - a.re * b.im);
        auto round_div = [&](const mpz_class& num) {
            mpz_class q;
            mpz_class adj = num >= 0 ? mpz_class(num + n) : mpz_class(num - n);
            mpz_class den2 = 2 * n;
            mpz_fdiv_q(q.get_mpz_t(), adj.get_mpz_t(), den2.get_mpz_t());
            return q;
        };
        GaussInt q{round_div(re2), round_div(im2)};
        GaussInt r{a.re - (q.re * b.re - q.im * b.im), a.im - (q.re * b.im + q.im * b.re)};
        a = b;
        b = r;
    }
    return a;
}

/// All divisors of g up to units. Throws UnsupportedError if the norm cannot
/// be factored by trial division within the bound.
inline std::vector<GaussInt> gint_divisors(const GaussInt& g) {
    mpz_class n = gint_norm(g);
    if (n == 0) throw InternalError("divisors of zero requested");
    // factor the integer norm
    std::map<mpz_class, unsigned> nf;
    mpz_class m = n;
    for (mpz_class p = 2; p * p <= m; p == 2 ? p = 3 : p += 2) {
        if (p > (1 << 21)) break;
        while (m % p == 0) {
            ++nf[p];
            m /= p;
        }
    }
    if (m > 1) {
        if (!mpz_probab_prime_p(m.get_mpz_t(), 40))
            throw UnsupportedError("eigen: constant term norm too large to factor exactly");
        ++nf[m];
    }
    // Gaussian prime candidates from the rational primes of the norm
    std::vector<GaussInt> primes;
    for (const auto& [p, e] : nf) {
        (void)e;
        if (p == 2) {
            primes.push_back({1, 1});
        } else if (p % 4 == 3) {
            primes.push_back({p, 0});
        } else {
            mpz_class x = sqrt_minus_one(p);
            GaussInt pi = gint_gcd(GaussInt{p, 0}, GaussInt{x, 1});
            primes.push_back(pi);
            primes.push_back({pi.re, -pi.im});
        }
    }
    // exponents of each Gaussian prime in g by repeated exact division
    std::vector<std::pair<GaussInt, unsigned>> fact;
    GaussInt rest = g;
    for (const auto& pi : primes) {
        unsigned e = 0;
        while (true) {
            auto q = gint_exact_div(rest, pi);
            if (!q) break;
            rest = *q;
            ++e;
        }
        if (e > 0) fact.emplace_back(pi, e);
    }
    if (gint_norm(rest) != 1) throw InternalError("gaussian factorization incomplete");
    std::vector<GaussInt> divs{GaussInt{1, 0}};
    for (const auto& [pi, e] : fact) {
        std::vector<GaussInt> next;
        GaussInt pw{1, 0};
        for (unsigned k = 0; k <= e; ++k) {
            for (const auto& d : divs) next.push_back(gint_mul(d, pw));
            pw = gint_mul(pw, pi);
        }
        divs = std::move(next);
    }
    return divs;
}

}  // namespace detail

/// Roots of p lying in Q(i), with multiplicities, plus the degree of the
/// unfactored remainder (0 when p splits over Q(i)).
struct RootReport {
    std::vector<std::pair<Scalar, size_t>> roots;  // sorted by Scalar order
    size_t residual_degree = 0;
};

inline RootReport gaussian_rational_roots(Poly p) {
    poly_trim(p);
    RootReport out;
    int deg = poly_deg(p);
    if (deg <= 0) return out;

    // strip zero roots
    size_t zero_mult = 0;
    while (!p.empty() && p.front().is_zero()) {
        p.erase(p.begin());
        ++zero_mult;
    }
    Poly stripped = p;
    std::vector<Scalar> found;
    if (poly_deg(stripped) > 0) {
        Poly sf = poly_divmod(stripped, poly_gcd(stripped, poly_deriv(stripped))).first;
        sf = poly_monic(std::move(sf));
        int n = poly_deg(sf);
        // scale x = mu / D so candidate roots become Gaussian integers
        mpz_class d(1);
        for (const auto& c : sf) {
            mpz_class dr = c.re.get_den(), di = c.im.get_den();
            mpz_class t;
            mpz_lcm(t.get_mpz_t(), d.get_mpz_t(), dr.get_mpz_t());
            mpz_lcm(d.get_mpz_t(), t.get_mpz_t(), di.get_mpz_t());
        }
        // constant term of the integer-scaled monic polynomial
        Rational c0re = sf[0].re, c0im = sf[0].im;
        mpz_class dp(1);
        for (int k = 0; k < n; ++k) dp *= d;
        detail::GaussInt c0{mpz_class(c0re.get_num() * (dp / c0re.get_den())),
                            mpz_class(c0im.get_num() * (dp / c0im.get_den()))};
        const detail::GaussInt units[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& dv : detail::gint_divisors(c0)) {
            for (const auto& u : units) {
                detail::GaussInt mu = detail::gint_mul(dv, u);
                Scalar cand(Rational(mu.re) / d, Rational(mu.im) / d);
                if (poly_eval(sf, cand).is_zero() &&
                    std::find(found.begin(), found.end(), cand) == found.end())
                    found.push_back(cand);
            }
        }
    }
    // multiplicities from the original (zero-stripped) polynomial
    size_t extracted = zero_mult;
    if (zero_mult > 0) out.roots.emplace_back(Scalar(), zero_mult);
    for (const auto& r : found) {
        size_t mult = 0;
        Poly cur = stripped;
        while (true) {
            auto [q, rem] = poly_divmod(cur, Poly{-r, Scalar(1)});
            if (poly_deg(rem) >= 0) break;
            cur = std::move(q);
            ++mult;
        }
        if (mult > 0) {
            out.roots.emplace_back(r, mult);
            extracted += mult;
        }
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out.residual_degree = static_cast<size_t>(deg) - extracted;
    return out;
}

// --- eigen decomposition ---------------------------------------------------

struct EigenPair {
    Scalar value;
    size_t algebraic = 0;
    std::vector<Vec> vectors;  // exact eigenspace basis (geometric multiplicity)
};

struct EigenReport {
    bool splits = false;          // characteristic polynomial splits over Q(i)
    bool diagonalizable = false;  // splits and eigenvectors span
    size_t residual_degree = 0;   // degree of the unfactored charpoly part
    std::vector<EigenPair> values;
};

/// Exact eigenvalues over Q(i). Eigenvalues outside Q(i) are reported as an
/// unfactored residual, never approximated.
inline EigenReport eigen(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("eigen: non-square matrix");
    size_t n = a.rows();
    EigenReport rep;
    RootReport roots = gaussian_rational_roots(charpoly(a));
    rep.residual_degree = roots.residual_degree;
    rep.splits = roots.residual_degree == 0;
    size_t geo_total = 0;
    for (const auto& [val, mult] : roots.roots) {
        EigenPair ep;
        ep.value = val;
        ep.algebraic = mult;
        Matrix shifted = a;
        for (size_t i = 0; i < n; ++i) shifted.at(i, i) -= val;
        ep.vectors = kernel(shifted);
        geo_total += ep.vectors.size();
        rep.values.push_back(std::move(ep));
    }
    rep.diagonalizable = rep.splits && geo_total == n;
    return rep;
}

}  // namespace qpalg
