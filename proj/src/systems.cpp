#include "mbasis/systems.hpp"

namespace mbasis {

System canonical_system(int n, ToleranceConfig tol) {
    if (n < 1) throw Error("canonical_system: size must be >= 1");
    return System(Matrix::Identity(n, n), Matrix::Identity(n, n), tol);
}

System coupled_system(int size, double coupling, ToleranceConfig tol) {
    if (size < 1) throw Error("coupled_system: size must be >= 1");
    Matrix X = Matrix::Identity(size, size);
    for (int n = 0; n + 1 < size; ++n) X(n + 1, n) = coupling;
    // X is unit lower bidiagonal, so its inverse transpose is exact to rounding
    Matrix F = X.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(size, size)).transpose();
    return System(X, F, tol);
}

System system_from_vectors(const Matrix& xs, ToleranceConfig tol) {
    return System(xs, dual_solve(xs, xs, tol), tol);
}

System gram_schmidt_system(const Matrix& xs, ToleranceConfig tol) {
    Matrix Z(xs.rows(), xs.cols());
    for (Eigen::Index n = 0; n < xs.cols(); ++n) {
        Vector v = xs.col(n);
        // two passes of classical Gram-Schmidt keep orthogonality at rounding level
        for (int pass = 0; pass < 2; ++pass)
            if (n > 0) v -= Z.leftCols(n) * (Z.leftCols(n).transpose() * v);
        const double nv = v.norm();
        if (!(nv > tol.rank_tol * xs.col(n).norm()))
            throw Error("gram_schmidt_system: vector " + std::to_string(n + 1) + " depends on its predecessors");
        Z.col(n) = v / nv;
    }
    return System(Z, Z, tol);
}

}  // namespace mbasis
