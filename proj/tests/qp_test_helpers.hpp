#pragma once

#include "qpalg/grassmann.hpp"
#include "qpalg/qp_algebra.hpp"

namespace qpalg::testutil {

/// The commutative superalgebra Lambda(N) as a QPAlgebra with P = Id and
/// zero bracket; raw material for the generic constructors.
inline QPAlgebra lambda_comm_algebra(int n) {
    auto basis = lambda_basis(n);
    size_t dim = basis.size();
    std::vector<std::string> labels;
    std::vector<int> parity;
    for (Monomial m : basis) {
        labels.push_back(to_string(GrassmannElement::monomial_term(n, m, Scalar(1))));
        parity.push_back(monomial_degree(m) % 2);
    }
    Vec unit(dim);
    unit[0] = Scalar(1);
    QPAlgebra a(labels, parity, unit, Matrix::identity(dim));
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) {
            GrassmannElement p = GrassmannElement::monomial_term(n, basis[i], Scalar(1)) *
                                 GrassmannElement::monomial_term(n, basis[j], Scalar(1));
            a.set_product(i, j, sv_from_dense(lambda_to_vec(p)));
        }
    return a;
}

}  // namespace qpalg::testutil
