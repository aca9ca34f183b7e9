#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpalg/errors.hpp"
#include "qpalg/grassmann.hpp"
#include "qpalg/qp_algebra.hpp"

namespace qpalg {

/// The contact-type Poisson bracket on Lambda(N):
/// {f, g} = sum_i (f)*d_i d_i(g).
inline GrassmannElement poisson_bracket(const GrassmannElement& f, const GrassmannElement& g) {
    f.check_same(g);
    GrassmannElement r(f.generators());
    for (int i = 1; i <= f.generators(); ++i) r = r + right_deriv(f, i) * left_deriv(i, g);
    return r;
}

inline std::string to_string(const SuperDerivation& a) {
    std::string out;
    bool first = true;
    for (int i = 1; i <= a.generators(); ++i) {
        for (const auto& [m, c] : a.component(i).terms()) {
            std::string mono;
            for (Monomial mm = m; mm != 0; mm &= mm - 1) mono += "x" + std::to_string(std::countr_zero(mm) + 1);
            std::string head = mono.empty() ? "" : mono + "*";
            std::string term;
            if (c.is_one()) term = head + "d" + std::to_string(i);
            else if ((-c).is_one()) term = "-" + head + "d" + std::to_string(i);
            else {
                bool mixed = sgn(c.re) != 0 && sgn(c.im) != 0;
                term = (mixed ? "(" + to_string(c) + ")" : to_string(c)) + "*" + head + "d" + std::to_string(i);
            }
            if (first) out = term;
            else if (term[0] == '-') out += " - " + term.substr(1);
            else out += " + " + term;
            first = false;
        }
    }
    return out.empty() ? "0" : out;
}

namespace catalog_detail {

inline std::string monomial_label(int n, Monomial m) {
    return to_string(GrassmannElement::monomial_term(n, m, Scalar(1)));
}

}  // namespace catalog_detail

// --- contact type K_N --------------------------------------------------------

/// K_N: Lambda(N) with the Poisson bracket and P = Id - (1/2) sum xi_i d_i.
inline QPAlgebra build_K(int n) {
    check_generator_count(n);
    auto basis = lambda_basis(n);
    size_t dim = basis.size();
    std::vector<std::string> labels;
    std::vector<int> parity;
    for (Monomial m : basis) {
        labels.push_back(catalog_detail::monomial_label(n, m));
        parity.push_back(monomial_degree(m) % 2);
    }
    Vec unit(dim);
    unit[0] = Scalar(1);
    Matrix p(dim, dim);
    for (size_t k = 0; k < dim; ++k) p.at(k, k) = Scalar(1) - Scalar(monomial_degree(basis[k]), 2);
    QPAlgebra a(labels, parity, unit, p);
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            GrassmannElement fi = GrassmannElement::monomial_term(n, basis[i], Scalar(1));
            GrassmannElement fj = GrassmannElement::monomial_term(n, basis[j], Scalar(1));
            a.set_product(i, j, sv_from_dense(lambda_to_vec(fi * fj)));
            a.set_bracket(i, j, sv_from_dense(lambda_to_vec(poisson_bracket(fi, fj))));
        }
    a.metadata()["family"] = "K";
    a.metadata()["N"] = std::to_string(n);
    a.metadata()["basis_convention"] = "monomials by degree then lexicographic";
    return a;
}

// --- Witt type W_N -----------------------------------------------------------

/// W_N: Lambda(N) + W(N) with f.eta the module action, {eta, f} = eta(f),
/// {eta, tau} the supercommutator, P(f) = f, P(eta) = 0.
inline QPAlgebra build_W(int n) {
    check_generator_count(n);
    auto lb = lambda_basis(n);
    auto wb = w_basis(n);
    size_t ld = lb.size(), wd = wb.size(), dim = ld + wd;
    std::vector<std::string> labels;
    std::vector<int> parity;
    for (Monomial m : lb) {
        labels.push_back(catalog_detail::monomial_label(n, m));
        parity.push_back(monomial_degree(m) % 2);
    }
    for (const auto& [m, i] : wb) {
        std::string head = m == 0 ? "" : catalog_detail::monomial_label(n, m) + "*";
        labels.push_back(head + "d" + std::to_string(i));
        parity.push_back((monomial_degree(m) + 1) % 2);
    }
    Vec unit(dim);
    unit[0] = Scalar(1);
    Matrix p(dim, dim);
    for (size_t k = 0; k < ld; ++k) p.at(k, k) = Scalar(1);
    QPAlgebra a(labels, parity, unit, p);

    auto lam_coords = [&](const GrassmannElement& f) {
        Vec full(dim);
        Vec lv = lambda_to_vec(f);
        for (size_t k = 0; k < ld; ++k) full[k] = lv[k];
        return sv_from_dense(full);
    };
    auto w_coords = [&](const SuperDerivation& e) {
        Vec full(dim);
        Vec wv = w_to_vec(e);
        for (size_t k = 0; k < wd; ++k) full[ld + k] = wv[k];
        return sv_from_dense(full);
    };
    auto basis_f = [&](size_t i) { return GrassmannElement::monomial_term(n, lb[i], Scalar(1)); };
    auto basis_eta = [&](size_t i) {
        return SuperDerivation::term(GrassmannElement::monomial_term(n, wb[i].first, Scalar(1)), wb[i].second);
    };

    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            bool fi = i < ld, fj = j < ld;
            int pi = parity[i], pj = parity[j];
            Scalar sij(koszul(pi, pj));
            if (fi && fj) {
                a.set_product(i, j, lam_coords(basis_f(i) * basis_f(j)));
                a.set_bracket(i, j, SparseVec{});
            } else if (fi && !fj) {
                a.set_product(i, j, w_coords(basis_f(i) * basis_eta(j - ld)));
                // {f, eta} = -(-1)^{p_f p_eta} eta(f)
                a.set_bracket(i, j, sv_scale(-sij, lam_coords(basis_eta(j - ld).apply(basis_f(i)))));
            } else if (!fi && fj) {
                a.set_product(i, j, sv_scale(sij, w_coords(basis_f(j) * basis_eta(i - ld))));
                a.set_bracket(i, j, lam_coords(basis_eta(i - ld).apply(basis_f(j))));
            } else {
                a.set_product(i, j, SparseVec{});
                a.set_bracket(i, j, w_coords(w_bracket(basis_eta(i - ld), basis_eta(j - ld))));
            }
        }
    a.metadata()["family"] = "W";
    a.metadata()["N"] = std::to_string(n);
    a.metadata()["basis_convention"] =
        "Lambda monomials by degree-lex, then W(N) pairs (monomial degree-lex, component)";
    return a;
}

// --- divergence-zero types S_{N,alpha} and S~_N -------------------------------

namespace catalog_detail {

/// Shared construction context for the S families: the space
/// Lambda°(N) + S(N) with the product (commult) and P of (SP).
struct SContext {
    int n;
    std::vector<Monomial> circ;              // Lambda°(N) monomials, degree-lex
    std::vector<SuperDerivation> s_vectors;  // kernel basis of the divergence
    Decomposer s_decomp;
    SuperDerivation d;
    GrassmannElement top;
    size_t ld, sd, dim;

    explicit SContext(int n_) : n(n_), d(make_d(n_)), top(GrassmannElement::one(n_)) {
        for (Monomial m : lambda_basis(n))
            if (monomial_degree(m) < n) circ.push_back(m);
        s_vectors = s_basis(n);
        std::vector<Vec> cols;
        for (const auto& v : s_vectors) cols.push_back(w_to_vec(v));
        s_decomp = Decomposer(cols);
        for (int i = 1; i <= n; ++i) top = top * GrassmannElement::generator(n, i);
        ld = circ.size();
        sd = s_vectors.size();
        dim = ld + sd;
    }

    GrassmannElement p_lambda(const GrassmannElement& f) const { return f + d.apply(f); }

    /// P^{-1} on Lambda°(N): multiplication by N/(N-k) on degree k.
    GrassmannElement p_inv_lambda(const GrassmannElement& f) const {
        GrassmannElement r(n);
        for (const auto& [m, c] : f.terms()) {
            int k = monomial_degree(m);
            if (k == n) throw SingularError("P-inverse applied to a degree-N component");
            r = r + GrassmannElement::monomial_term(n, m, Scalar(n, n - k) * c);
        }
        return r;
    }

    /// Quotient map Lambda(N) -> Lambda°(N): drop the top coefficient.
    GrassmannElement truncate(const GrassmannElement& f) const {
        Monomial topm = (Monomial(1) << n) - 1;
        GrassmannElement r(n);
        for (const auto& [m, c] : f.terms())
            if (m != topm) r = r + GrassmannElement::monomial_term(n, m, c);
        return r;
    }

    /// (commult): f . eta = f eta - (-1)^{p(f) p(eta)} P^{-1}(eta(f)) d,
    /// for homogeneous f in Lambda°, eta in S(N); lands in S(N).
    SuperDerivation commult(const GrassmannElement& f, int pf, const SuperDerivation& eta, int pe) const {
        SuperDerivation r = f * eta;
        Scalar sign(koszul(pf, pe));
        return r - Scalar(sign) * (p_inv_lambda(eta.apply(f)) * d);
    }

    Vec coords(const GrassmannElement& f, const SuperDerivation& eta) const {
        Vec out(dim);
        Monomial topm = (Monomial(1) << n) - 1;
        if (!f.coefficient(topm).is_zero())
            throw InternalError("S-family element has a top-monomial component");
        for (size_t k = 0; k < ld; ++k) out[k] = f.coefficient(circ[k]);
        if (!eta.is_zero()) {
            auto sol = s_decomp.solve(w_to_vec(eta));
            if (!sol) throw InternalError("S-family element leaves Lambda°(N) + S(N)");
            for (size_t k = 0; k < sd; ++k) out[ld + k] = (*sol)[k];
        }
        return out;
    }

    GrassmannElement basis_f(size_t i) const { return GrassmannElement::monomial_term(n, circ[i], Scalar(1)); }
    const SuperDerivation& basis_eta(size_t i) const { return s_vectors[i]; }
};

/// Assembles the S-type algebra from the context plus the two bracket choices.
template <typename BracketFF, typename BracketFE, typename BracketEE>
QPAlgebra build_s_like(const SContext& ctx, BracketFF&& bff, BracketFE&& bfe, BracketEE&& bee,
                       const std::string& family) {
    std::vector<std::string> labels;
    std::vector<int> parity;
    for (Monomial m : ctx.circ) {
        labels.push_back(monomial_label(ctx.n, m));
        parity.push_back(monomial_degree(m) % 2);
    }
    for (size_t k = 0; k < ctx.sd; ++k) {
        labels.push_back("s" + std::to_string(k + 1));
        auto pp = ctx.s_vectors[k].parity();
        if (!pp) throw InternalError("inhomogeneous divergence-kernel basis vector");
        parity.push_back(*pp);
    }
    Vec unit(ctx.dim);
    unit[0] = Scalar(1);

    Matrix p(ctx.dim, ctx.dim);
    for (size_t k = 0; k < ctx.ld; ++k)
        p.at(k, k) = Scalar(1) - Scalar(monomial_degree(ctx.circ[k]), ctx.n);
    for (size_t k = 0; k < ctx.sd; ++k) {
        Vec img = ctx.coords(GrassmannElement(ctx.n), w_bracket(ctx.d, ctx.basis_eta(k)));
        for (size_t r = 0; r < ctx.dim; ++r) p.at(r, ctx.ld + k) = img[r];
    }

    QPAlgebra a(labels, parity, unit, p);
    for (size_t i = 0; i < ctx.dim; ++i)
        for (size_t j = 0; j < ctx.dim; ++j) {
            bool fi = i < ctx.ld, fj = j < ctx.ld;
            int pi = parity[i], pj = parity[j];
            Scalar sij(koszul(pi, pj));
            // product
            if (fi && fj) {
                GrassmannElement prod = ctx.truncate(ctx.basis_f(i) * ctx.basis_f(j));
                a.set_product(i, j, sv_from_dense(ctx.coords(prod, SuperDerivation(ctx.n))));
            } else if (fi && !fj) {
                SuperDerivation prod = ctx.commult(ctx.basis_f(i), pi, ctx.basis_eta(j - ctx.ld), pj);
                a.set_product(i, j, sv_from_dense(ctx.coords(GrassmannElement(ctx.n), prod)));
            } else if (!fi && fj) {
                SuperDerivation prod = ctx.commult(ctx.basis_f(j), pj, ctx.basis_eta(i - ctx.ld), pi);
                a.set_product(i, j, sv_scale(sij, sv_from_dense(ctx.coords(GrassmannElement(ctx.n), prod))));
            } else {
                a.set_product(i, j, SparseVec{});
            }
            // bracket
            if (fi && fj) {
                a.set_bracket(i, j, sv_from_dense(ctx.coords(bff(i, j), SuperDerivation(ctx.n))));
            } else if (fi && !fj) {
                auto [lam, der] = bfe(i, j - ctx.ld);
                a.set_bracket(i, j, sv_from_dense(ctx.coords(lam, der)));
            } else if (!fi && fj) {
                auto [lam, der] = bfe(j, i - ctx.ld);
                a.set_bracket(i, j, sv_scale(-sij, sv_from_dense(ctx.coords(lam, der))));
            } else {
                a.set_bracket(i, j, sv_from_dense(ctx.coords(GrassmannElement(ctx.n), bee(i - ctx.ld, j - ctx.ld))));
            }
        }
    a.metadata()["family"] = family;
    a.metadata()["N"] = std::to_string(ctx.n);
    a.metadata()["basis_convention"] =
        "Lambda° monomials by degree-lex, then divergence-kernel vectors in kernel order";
    for (size_t k = 0; k < ctx.sd; ++k)
        a.metadata()["s" + std::to_string(k + 1)] = to_string(ctx.s_vectors[k]);
    return a;
}

}  // namespace catalog_detail

/// S_{N,alpha} on Lambda°(N) + S(N); requires N >= 2. alpha enters only the
/// Lie bracket. Products of Lambda°-elements are taken in the quotient of
/// Lambda(N) by the span of the top monomial.
inline QPAlgebra build_S(int n, const Scalar& alpha) {
    if (n < 2) throw SpecError("S requires N >= 2");
    check_generator_count(n);
    catalog_detail::SContext ctx(n);
    Scalar a1 = alpha + Scalar(1);

    auto bff = [&](size_t i, size_t j) {
        GrassmannElement f = ctx.basis_f(i), g = ctx.basis_f(j);
        return ctx.truncate(a1 * (f * ctx.d.apply(g) - ctx.d.apply(f) * g));
    };
    auto bfe = [&](size_t i, size_t j) {
        GrassmannElement f = ctx.basis_f(i);
        int pf = monomial_degree(ctx.circ[i]) % 2;
        const SuperDerivation& eta = ctx.basis_eta(j);
        int pe = *eta.parity();
        SuperDerivation der = a1 * ctx.commult(f, pf, w_bracket(ctx.d, eta), pe);
        Scalar sign(koszul(pf, pe));
        GrassmannElement lam = -sign * ctx.p_inv_lambda(eta.apply(ctx.p_lambda(f)));
        return std::make_pair(lam, der);
    };
    auto bee = [&](size_t i, size_t j) { return w_bracket(ctx.basis_eta(i), ctx.basis_eta(j)); };

    QPAlgebra a = catalog_detail::build_s_like(ctx, bff, bfe, bee, "S");
    a.metadata()["alpha"] = to_string(alpha);
    return a;
}

/// S~_N for even N: same commutative algebra and P as S_N, brackets twisted
/// by F = 1 + xi_1 ... xi_N.
inline QPAlgebra build_S_tilde(int n) {
    if (n < 2 || n % 2 != 0) throw SpecError("S_tilde requires even N >= 2");
    check_generator_count(n);
    catalog_detail::SContext ctx(n);
    const GrassmannElement& top = ctx.top;
    GrassmannElement one_minus_top = GrassmannElement::one(n) - top;

    auto bff = [&](size_t i, size_t j) {
        GrassmannElement f = ctx.basis_f(i), g = ctx.basis_f(j);
        return ctx.truncate(f * ctx.d.apply(g) - ctx.d.apply(f) * g);
    };
    auto bfe = [&](size_t i, size_t j) {
        GrassmannElement f = ctx.basis_f(i);
        int pf = monomial_degree(ctx.circ[i]) % 2;
        const SuperDerivation& eta = ctx.basis_eta(j);
        int pe = *eta.parity();
        SuperDerivation der = ctx.commult(f, pf, w_bracket(ctx.d, eta), pe);
        Scalar sign(koszul(pf, pe));
        GrassmannElement lam = -sign * ctx.p_inv_lambda(eta.apply(one_minus_top * ctx.p_lambda(f)));
        return std::make_pair(lam, der);
    };
    auto bee = [&](size_t i, size_t j) {
        const SuperDerivation& eta = ctx.basis_eta(i);
        const SuperDerivation& tau = ctx.basis_eta(j);
        Scalar sign(koszul(*eta.parity(), *tau.parity()));
        SuperDerivation r = one_minus_top * w_bracket(eta, tau);
        r = r - eta.apply(top) * tau;
        r = r + sign * (tau.apply(top) * eta);
        return r;
    };

    return catalog_detail::build_s_like(ctx, bff, bfe, bee, "S_tilde");
}

// --- Cheng-Kac algebra CK_6 ---------------------------------------------------

/// CK_6: degrees 0..2 of Lambda(6) plus the +i-polarized half of degree 3,
/// with the restricted Poisson bracket and the phi-twisted quotient product.
inline QPAlgebra build_CK6() {
    const int n = 6;
    std::vector<Monomial> low, reps, deg3;
    for (Monomial m : lambda_basis(n)) {
        int k = monomial_degree(m);
        if (k <= 2) low.push_back(m);
        if (k == 3) {
            deg3.push_back(m);
            if (m & 1) reps.push_back(m);  // contains xi_1
        }
    }
    size_t ld = low.size(), wd = reps.size(), dim = ld + wd;

    auto embed_w = [&](Monomial m, const Scalar& sign_i) {
        GrassmannElement e = GrassmannElement::monomial_term(n, m, Scalar(1));
        return e + sign_i * hodge_dual(e);
    };

    // change of basis on degree 3: columns w+_A then w-_A over the 20 monomials
    auto deg3_vec = [&](const GrassmannElement& f) {
        Vec v(deg3.size());
        for (size_t k = 0; k < deg3.size(); ++k) v[k] = f.coefficient(deg3[k]);
        return v;
    };
    std::vector<Vec> cols;
    for (Monomial m : reps) cols.push_back(deg3_vec(embed_w(m, Scalar::i())));
    for (Monomial m : reps) cols.push_back(deg3_vec(embed_w(m, -Scalar::i())));
    Decomposer deg3_decomp(cols);
    if (!deg3_decomp.full_column_rank()) throw InternalError("CK6 polarization basis is degenerate");

    std::map<Monomial, size_t> low_index;
    for (size_t k = 0; k < ld; ++k) low_index[low[k]] = k;

    // coordinates of an ambient element; exact = no component in the dropped
    // ideal (minus-polarized degree 3 and degrees >= 4)
    auto project = [&](const GrassmannElement& f, bool* exact) -> Vec {
        Vec out(dim);
        GrassmannElement d3(n);
        bool ok = true;
        for (const auto& [m, c] : f.terms()) {
            int k = monomial_degree(m);
            if (k <= 2) out[low_index[m]] = c;
            else if (k == 3) d3 = d3 + GrassmannElement::monomial_term(n, m, c);
            else ok = false;
        }
        if (!d3.is_zero()) {
            auto sol = deg3_decomp.solve(deg3_vec(d3));
            if (!sol) throw InternalError("CK6 degree-3 decomposition failed");
            for (size_t k = 0; k < wd; ++k) out[ld + k] = (*sol)[k];
            for (size_t k = wd; k < 2 * wd; ++k)
                if (!(*sol)[k].is_zero()) ok = false;
        }
        if (exact) *exact = ok;
        return out;
    };

    auto embed_basis = [&](size_t i) {
        if (i < ld) return GrassmannElement::monomial_term(n, low[i], Scalar(1));
        return embed_w(reps[i - ld], Scalar::i());
    };

    std::vector<std::string> labels;
    std::vector<int> parity;
    for (Monomial m : low) {
        labels.push_back(catalog_detail::monomial_label(n, m));
        parity.push_back(monomial_degree(m) % 2);
    }
    for (Monomial m : reps) {
        std::string s = "w";
        for (Monomial mm = m; mm != 0; mm &= mm - 1) s += std::to_string(std::countr_zero(mm) + 1);
        labels.push_back(s);
        parity.push_back(1);
    }
    Vec unit(dim);
    unit[0] = Scalar(1);
    Matrix p(dim, dim);
    for (size_t k = 0; k < ld; ++k) p.at(k, k) = Scalar(1) - Scalar(monomial_degree(low[k]), 2);
    for (size_t k = 0; k < wd; ++k) p.at(ld + k, ld + k) = Scalar(-1, 2);

    QPAlgebra a(labels, parity, unit, p);
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            // twisted product a.b = phi(pi(phi^{-1}(a) phi^{-1}(b)))
            Scalar ci = i >= ld ? Scalar(1, 2) : Scalar(1);
            Scalar cj = j >= ld ? Scalar(1, 2) : Scalar(1);
            GrassmannElement prod = (ci * embed_basis(i)) * (cj * embed_basis(j));
            Vec coords = project(prod, nullptr);
            for (size_t k = ld; k < dim; ++k) coords[k] = Scalar(2) * coords[k];
            a.set_product(i, j, sv_from_dense(coords));

            // bracket: restriction of the K_6 Poisson bracket; must close
            GrassmannElement br = poisson_bracket(embed_basis(i), embed_basis(j));
            bool exact = true;
            Vec bcoords = project(br, &exact);
            if (!exact)
                throw InternalError("CK6 Poisson bracket left the subspace at pair (" + labels[i] + "," +
                                    labels[j] + ")");
            a.set_bracket(i, j, sv_from_dense(bcoords));
        }
    a.metadata()["family"] = "CK6";
    a.metadata()["N"] = "6";
    a.metadata()["polarization"] = "+i";
    a.metadata()["basis_convention"] =
        "monomials of degree <= 2 by degree-lex, then w_A = xi_A + i (xi_A)* over degree-3 monomials containing xi_1";
    return a;
}

// --- catalog dispatch ----------------------------------------------------------

struct CatalogSpec {
    enum class Family { K, W, S, S_tilde, CK6 };
    Family family = Family::K;
    int n = 0;
    Scalar alpha;

    /// Parses "K:3", "W:2", "S:2:alpha=1/2", "S_tilde:4", "CK6".
    static CatalogSpec parse(const std::string& text) {
        CatalogSpec spec;
        std::vector<std::string> parts;
        size_t start = 0;
        while (start <= text.size()) {
            size_t colon = text.find(':', start);
            if (colon == std::string::npos) {
                parts.push_back(text.substr(start));
                break;
            }
            parts.push_back(text.substr(start, colon - start));
            start = colon + 1;
        }
        const std::string& fam = parts[0];
        if (fam == "CK6") {
            spec.family = Family::CK6;
            spec.n = 6;
            if (parts.size() > 1) throw SpecError("CK6 takes no parameters");
            return spec;
        }
        if (fam == "K") spec.family = Family::K;
        else if (fam == "W") spec.family = Family::W;
        else if (fam == "S") spec.family = Family::S;
        else if (fam == "S_tilde") spec.family = Family::S_tilde;
        else throw SpecError("unknown catalog family '" + fam + "'");
        if (parts.size() < 2 || parts[1].empty()) throw SpecError("missing generator count in '" + text + "'");
        try {
            spec.n = std::stoi(parts[1]);
        } catch (const std::exception&) {
            throw SpecError("bad generator count in '" + text + "'");
        }
        for (size_t k = 2; k < parts.size(); ++k) {
            if (parts[k].rfind("alpha=", 0) == 0 && spec.family == Family::S)
                spec.alpha = parse_scalar(parts[k].substr(6));
            else
                throw SpecError("unexpected parameter '" + parts[k] + "' in '" + text + "'");
        }
        spec.validate();
        return spec;
    }

    void validate() const {
        if (family == Family::S && n < 2) throw SpecError("S requires N >= 2");
        if (family == Family::S_tilde && (n < 2 || n % 2 != 0)) throw SpecError("S_tilde requires even N >= 2");
        if (family == Family::CK6 && n != 6) throw SpecError("CK6 fixes N = 6");
        if (n < 0) throw SpecError("negative generator count");
    }

    std::string str() const {
        switch (family) {
            case Family::K: return "K:" + std::to_string(n);
            case Family::W: return "W:" + std::to_string(n);
            case Family::S: return "S:" + std::to_string(n) + ":alpha=" + to_string(alpha);
            case Family::S_tilde: return "S_tilde:" + std::to_string(n);
            case Family::CK6: return "CK6";
        }
        return "";
    }
};

inline QPAlgebra build_catalog(const CatalogSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case CatalogSpec::Family::K: return build_K(spec.n);
        case CatalogSpec::Family::W: return build_W(spec.n);
        case CatalogSpec::Family::S: return build_S(spec.n, spec.alpha);
        case CatalogSpec::Family::S_tilde: return build_S_tilde(spec.n);
        case CatalogSpec::Family::CK6: return build_CK6();
    }
    throw SpecError("unreachable catalog family");
}

inline QPAlgebra build_catalog(const std::string& text) { return build_catalog(CatalogSpec::parse(text)); }

}  // namespace qpalg
