#include <catch2/catch_amalgamated.hpp>

#include "qpalg/linalg.hpp"
#include "test_util.hpp"

using namespace qpalg;

namespace {

Matrix from_rows(const std::vector<std::vector<long>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = Scalar(rows[i][j]);
    return m;
}

// independent oracle: det(xI - A) by cofactor expansion with polynomial entries
Poly charpoly_cofactor(const Matrix& a) {
    size_t n = a.rows();
    std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            m[i][j] = Poly{-a.at(i, j)};
            if (i == j) m[i][j].push_back(Scalar(1));
        }
    std::function<Poly(std::vector<std::vector<Poly>>)> det = [&](std::vector<std::vector<Poly>> mm) -> Poly {
        size_t k = mm.size();
        if (k == 1) return mm[0][0];
        Poly acc;
        for (size_t i = 0; i < k; ++i) {
            std::vector<std::vector<Poly>> minor;
            for (size_t r = 0; r < k; ++r) {
                if (r == i) continue;
                std::vector<Poly> row(mm[r].begin() + 1, mm[r].end());
                minor.push_back(std::move(row));
            }
            Poly term = poly_mul(mm[i][0], det(minor));
            Scalar sign((i % 2 == 0) ? 1 : -1);
            for (size_t j = 0; j < term.size(); ++j) {
                if (acc.size() <= j) acc.resize(j + 1);
                acc[j] += sign * term[j];
            }
        }
        return acc;
    };
    Poly p = det(m);
    p.resize(n + 1);
    return p;
}

}  // namespace

TEST_CASE("kernel of the spec example") {
    auto k = kernel(from_rows({{1, 1}, {1, 1}}));
    REQUIRE(k.size() == 1);
    // spans the line through (1, -1)
    CHECK(k[0][0] * Scalar(-1) == k[0][1]);
    CHECK_FALSE(k[0][0].is_zero());
}

TEST_CASE("kernel dimension plus rank equals column count") {
    for (int t = 0; t < 60; ++t) {
        size_t r = 1 + t % 5, c = 1 + (t * 7) % 6;
        Matrix m = testutil::random_matrix(r, c);
        CHECK(kernel(m).size() + rank(m) == c);
        for (const auto& v : kernel(m)) CHECK(vec_is_zero(m.apply(v)));
    }
}

TEST_CASE("solve and inverse") {
    for (int t = 0; t < 40; ++t) {
        Matrix a = testutil::random_matrix(4, 4);
        Vec x(4);
        for (auto& s : x) s = testutil::random_scalar();
        Vec b = a.apply(x);
        auto sol = solve(a, b);
        REQUIRE(sol.has_value());
        CHECK(vec_is_zero(vec_add(a.apply(*sol), vec_scale(Scalar(-1), b))));
        auto inv = inverse(a);
        if (inv) CHECK(*inv * a == Matrix::identity(4));
    }
    CHECK_FALSE(inverse(from_rows({{1, 1}, {1, 1}})).has_value());
    CHECK_FALSE(solve(from_rows({{1, 0}, {1, 0}}), Vec{Scalar(1), Scalar(2)}).has_value());
}

TEST_CASE("charpoly agrees with cofactor oracle") {
    for (int t = 0; t < 25; ++t) {
        size_t n = 2 + t % 3;
        Matrix a = testutil::random_matrix(n, n);
        CHECK(charpoly(a) == charpoly_cofactor(a));
    }
}

TEST_CASE("Cayley-Hamilton") {
    for (int t = 0; t < 10; ++t) {
        Matrix a = testutil::random_matrix(4, 4);
        Poly p = charpoly(a);
        Matrix acc(4, 4);
        Matrix pw = Matrix::identity(4);
        for (size_t k = 0; k < p.size(); ++k) {
            acc = acc + p[k] * pw;
            pw = pw * a;
        }
        CHECK(acc.is_zero());
    }
}

TEST_CASE("eigen on spec examples") {
    Matrix d(2, 2);
    d.at(0, 0) = Scalar(1);
    d.at(1, 1) = Scalar(-1, 2);
    auto rep = eigen(d);
    REQUIRE(rep.splits);
    REQUIRE(rep.diagonalizable);
    REQUIRE(rep.values.size() == 2);
    CHECK(rep.values[0].value == Scalar(-1, 2));
    CHECK(rep.values[1].value == Scalar(1));

    auto rot = eigen(from_rows({{0, -1}, {1, 0}}));
    REQUIRE(rot.splits);
    REQUIRE(rot.diagonalizable);
    REQUIRE(rot.values.size() == 2);
    CHECK(rot.values[0].value == -Scalar::i());
    CHECK(rot.values[1].value == Scalar::i());

    CHECK_THROWS_AS(eigen(Matrix(2, 3)), ShapeError);
}

TEST_CASE("eigen reports non-splitting exactly") {
    auto rep = eigen(from_rows({{0, 1}, {2, 0}}));  // x^2 - 2, no roots in Q(i)
    CHECK_FALSE(rep.splits);
    CHECK(rep.residual_degree == 2);
    CHECK_FALSE(rep.diagonalizable);
}

TEST_CASE("eigen detects non-diagonalizable matrices") {
    auto rep = eigen(from_rows({{0, 1}, {0, 0}}));
    REQUIRE(rep.splits);
    CHECK_FALSE(rep.diagonalizable);
    REQUIRE(rep.values.size() == 1);
    CHECK(rep.values[0].algebraic == 2);
    CHECK(rep.values[0].vectors.size() == 1);
}

TEST_CASE("diagonalizable verdict is re-verified by multiplication") {
    for (int t = 0; t < 15; ++t) {
        // conjugate a random diagonal by a random invertible matrix
        Matrix d(3, 3);
        d.at(0, 0) = Scalar(t % 3);
        d.at(1, 1) = Scalar(1, 2);
        d.at(2, 2) = Scalar::i() * Scalar(t % 2 + 1);
        Matrix s = testutil::random_matrix(3, 3);
        auto sinv = inverse(s);
        if (!sinv) continue;
        Matrix a = s * d * *sinv;
        auto rep = eigen(a);
        REQUIRE(rep.splits);
        REQUIRE(rep.diagonalizable);
        // assemble eigenbasis and check A * V = V * Lambda column-wise
        for (const auto& ep : rep.values)
            for (const auto& v : ep.vectors) {
                Vec av = a.apply(v);
                CHECK(vec_is_zero(vec_add(av, vec_scale(-ep.value, v))));
            }
        size_t total = 0;
        std::vector<Vec> all;
        for (const auto& ep : rep.values)
            for (const auto& v : ep.vectors) {
                all.push_back(v);
                ++total;
            }
        REQUIRE(total == 3);
        CHECK(Decomposer(all).full_column_rank());
    }
}

TEST_CASE("polynomial helpers") {
    Poly p{Scalar(-2), Scalar(0), Scalar(1)};  // x^2 - 2
    Poly q{Scalar(1), Scalar(1)};              // x + 1
    auto [quo, rem] = poly_divmod(poly_mul(p, q), q);
    CHECK(quo == p);
    CHECK(poly_deg(rem) == -1);
    CHECK(poly_gcd(poly_mul(p, q), poly_mul(q, q)) == q);
    CHECK(poly_eval(p, Scalar(3)) == Scalar(7));
}

TEST_CASE("gaussian rational roots") {
    // (x - 1/2)(x - i)^2 x
    Poly p{Scalar(1)};
    auto lin = [](Scalar r) { return Poly{-r, Scalar(1)}; };
    p = poly_mul(p, lin(Scalar(1, 2)));
    p = poly_mul(p, lin(Scalar::i()));
    p = poly_mul(p, lin(Scalar::i()));
    p = poly_mul(p, lin(Scalar(0)));
    auto rep = gaussian_rational_roots(p);
    CHECK(rep.residual_degree == 0);
    REQUIRE(rep.roots.size() == 3);
    std::map<Scalar, size_t> mults(rep.roots.begin(), rep.roots.end());
    CHECK(mults[Scalar()] == 1);
    CHECK(mults[Scalar(1, 2)] == 1);
    CHECK(mults[Scalar::i()] == 2);
}
