#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include <Eigen/SVD>

#include "mbasis/types.hpp"

namespace mbasis {

// Dense subspace primitives. A subspace is always given by a matrix whose
// columns span it; an empty column set (or an all-zero matrix) is the zero
// subspace. Rank decisions are relative: a singular value counts when it
// exceeds rank_tol times the largest one.

/// Orthonormal basis (as columns) of the column span of `S`.
template <typename Derived>
Mat<typename Derived::Scalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& S,
                                                double rank_tol = ToleranceConfig{}.rank_tol) {
    using Scalar = typename Derived::Scalar;
    if (S.cols() == 0) return Mat<Scalar>(S.rows(), 0);
    Eigen::JacobiSVD<Mat<Scalar>> svd(S.derived(), Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == Scalar(0)) return Mat<Scalar>(S.rows(), 0);
    Eigen::Index rank = 0;
    const Scalar cutoff = sv(0) * Scalar(rank_tol);
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& S,
                            double rank_tol = ToleranceConfig{}.rank_tol) {
    return orthonormal_basis(S, rank_tol).cols();
}

template <typename Scalar>
struct Projection {
    Vec<Scalar> projection;
    Scalar residual;
};

namespace detail {
inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
    if (a != b)
        throw Error("ambient dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}
}  // namespace detail

/// Orthogonal projection onto an already-orthonormal basis Q.
template <typename DX, typename DQ>
Projection<typename DX::Scalar> project_onto_orthonormal(const Eigen::MatrixBase<DX>& x,
                                                         const Eigen::MatrixBase<DQ>& Q) {
    using Scalar = typename DX::Scalar;
    detail::require_same_dim(x.rows(), Q.rows());
    Vec<Scalar> p = Q.cols() == 0 ? Vec<Scalar>(Vec<Scalar>::Zero(x.rows()))
                                  : Vec<Scalar>(Q * (Q.transpose() * x));
    Scalar r = (x - p).norm();
    return {std::move(p), r};
}

template <typename DX, typename DS>
Projection<typename DX::Scalar> project(const Eigen::MatrixBase<DX>& x,
                                        const Eigen::MatrixBase<DS>& S,
                                        double rank_tol = ToleranceConfig{}.rank_tol) {
    detail::require_same_dim(x.rows(), S.rows());
    require_finite(x, "project");
    require_finite(S, "project");
    return project_onto_orthonormal(x, orthonormal_basis(S, rank_tol));
}

template <typename DX, typename DS>
typename DX::Scalar distance_to_span(const Eigen::MatrixBase<DX>& x,
                                     const Eigen::MatrixBase<DS>& S,
                                     double rank_tol = ToleranceConfig{}.rank_tol) {
    return project(x, S, rank_tol).residual;
}

/// Gap between two subspaces given by orthonormal bases: the largest
/// distance from a unit vector of one to the other, taken both ways.
/// Subspaces of different dimension are at gap 1.
template <typename D1, typename D2>
double orthonormal_gap(const Eigen::MatrixBase<D1>& Q1, const Eigen::MatrixBase<D2>& Q2) {
    detail::require_same_dim(Q1.rows(), Q2.rows());
    if (Q1.cols() != Q2.cols()) return 1.0;
    if (Q1.cols() == 0) return 0.0;
    using Scalar = typename D1::Scalar;
    Mat<Scalar> r1 = Q1 - Q2 * (Q2.transpose() * Q1);
    Mat<Scalar> r2 = Q2 - Q1 * (Q1.transpose() * Q2);
    Eigen::JacobiSVD<Mat<Scalar>> s1(r1), s2(r2);
    Scalar g = std::max(s1.singularValues()(0), s2.singularValues()(0));
    return static_cast<double>(g);
}

template <typename D1, typename D2>
double subspace_gap(const Eigen::MatrixBase<D1>& S1, const Eigen::MatrixBase<D2>& S2,
                    double rank_tol = ToleranceConfig{}.rank_tol) {
    detail::require_same_dim(S1.rows(), S2.rows());
    return orthonormal_gap(orthonormal_basis(S1, rank_tol), orthonormal_basis(S2, rank_tol));
}

template <typename D1, typename D2>
bool span_equal(const Eigen::MatrixBase<D1>& S1, const Eigen::MatrixBase<D2>& S2, double tol,
                double rank_tol = ToleranceConfig{}.rank_tol) {
    return subspace_gap(S1, S2, rank_tol) <= tol;
}

/// Functionals f_k in span(within) with <f_k, v_n> = delta_kn, returned as
/// columns. Throws when the cross-Gram matrix is singular, i.e. the vectors
/// are not minimal relative to the given span.
template <typename DV, typename DW>
Mat<typename DV::Scalar> dual_solve(const Eigen::MatrixBase<DV>& vectors,
                                    const Eigen::MatrixBase<DW>& within,
                                    const ToleranceConfig& tol = {}) {
    using Scalar = typename DV::Scalar;
    detail::require_same_dim(vectors.rows(), within.rows());
    require_finite(vectors, "dual_solve");
    require_finite(within, "dual_solve");
    Mat<Scalar> Q = orthonormal_basis(within, tol.rank_tol);
    if (Q.cols() != vectors.cols())
        throw Error("dual_solve: span dimension " + std::to_string(Q.cols()) +
                    " differs from vector count " + std::to_string(vectors.cols()));
    if (Q.cols() == 0) return Mat<Scalar>(vectors.rows(), 0);
    Mat<Scalar> G = Q.transpose() * vectors;  // G(i, n) = <q_i, v_n>
    Eigen::JacobiSVD<Mat<Scalar>> svd(G);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > sv(0) * Scalar(tol.rank_tol)))
        throw Error("dual_solve: singular cross-Gram matrix (vectors not minimal in the given span)");
    Mat<Scalar> F = Q * G.transpose().fullPivLu().inverse();
    return F;
}

/// Points of the unit sphere of span(S) forming a `resolution`-net of it.
/// Built from a product-of-angles grid in orthonormal coordinates; throws when
/// the grid would exceed `cap` points.
std::vector<Vector> unit_net(const Matrix& S, double resolution, std::size_t cap = 200000,
                             double rank_tol = ToleranceConfig{}.rank_tol);

/// Number of points unit_net would produce for a subspace of dimension `dim`.
std::size_t unit_net_size(Eigen::Index dim, double resolution);

}  // namespace mbasis
