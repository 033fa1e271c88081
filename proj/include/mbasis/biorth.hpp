#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mbasis/subspace.hpp"
#include "mbasis/types.hpp"

namespace mbasis {

/// Paired finite sequences (x_n, f_n) of an l2 truncation; column n of `xs`
/// is x_{n+1} and column n of `fs` is the functional x_{n+1}^*, acting by the
/// inner product. Biorthogonality is not enforced on construction because the
/// diagnostics below are meant to measure it.
template <typename Scalar>
class BiorthSystem {
public:
    BiorthSystem() = default;
    BiorthSystem(Mat<Scalar> xs, Mat<Scalar> fs, ToleranceConfig tol = {})
        : xs_(std::move(xs)), fs_(std::move(fs)), tol_(tol) {
        if (xs_.cols() != fs_.cols())
            throw Error("BiorthSystem: " + std::to_string(xs_.cols()) + " vectors but " +
                        std::to_string(fs_.cols()) + " functionals");
        if (xs_.rows() != fs_.rows()) throw Error("BiorthSystem: ambient dimension mismatch");
        if (xs_.rows() < 1) throw Error("BiorthSystem: ambient dimension must be >= 1");
        require_finite(xs_, "BiorthSystem vectors");
        require_finite(fs_, "BiorthSystem functionals");
        for (Eigen::Index n = 0; n < xs_.cols(); ++n)
            if (xs_.col(n).squaredNorm() == Scalar(0) || fs_.col(n).squaredNorm() == Scalar(0))
                throw Error("BiorthSystem: zero vector or functional at index " + std::to_string(n + 1));
        tol_.validate();
    }

    const Mat<Scalar>& xs() const { return xs_; }
    const Mat<Scalar>& fs() const { return fs_; }
    const ToleranceConfig& tol() const { return tol_; }
    Eigen::Index size() const { return xs_.cols(); }
    Eigen::Index ambient_dim() const { return xs_.rows(); }

    /// Coefficients <f_n, v>, n = 1..size.
    template <typename D>
    Vec<Scalar> coefficients(const Eigen::MatrixBase<D>& v) const {
        return fs_.transpose() * v;
    }

    BiorthSystem<double> to_double() const {
        return BiorthSystem<double>(xs_.template cast<double>(), fs_.template cast<double>(), tol_);
    }

private:
    Mat<Scalar> xs_;
    Mat<Scalar> fs_;
    ToleranceConfig tol_;
};

using System = BiorthSystem<double>;

/// max_{k,n} |<f_k, x_n> - delta_kn|
template <typename Scalar>
Scalar biorthogonality_defect(const BiorthSystem<Scalar>& sys) {
    if (sys.size() == 0) return Scalar(0);
    Mat<Scalar> g = sys.fs().transpose() * sys.xs();
    g -= Mat<Scalar>::Identity(g.rows(), g.cols());
    return g.cwiseAbs().maxCoeff();
}

/// Least C with ||x_n|| ||f_n|| <= C for every n.
template <typename Scalar>
Scalar boundedness_constant(const BiorthSystem<Scalar>& sys) {
    Scalar c(0);
    for (Eigen::Index n = 0; n < sys.size(); ++n) {
        Scalar v = sys.xs().col(n).norm() * sys.fs().col(n).norm();
        if (v > c) c = v;
    }
    return c;
}

/// min_n dist(x_n / ||x_n||, span{x_m : m != n}).
double uniform_minimality_constant(const System& sys);

/// Monte-Carlo estimate (an upper bound on the true infimum, decreasing in
/// the sample count) of the norming constant: the minimum over sampled unit
/// f in span(fs) of sup_{x in span(xs), |x| = 1} |<f, x>|.
double norming_constant_estimate(const System& sys, std::size_t samples, std::uint64_t seed);

/// The exact infimum of the quantity sampled above: the smallest singular
/// value of Q_F^T Q_X for orthonormal bases of the two spans.
double norming_constant_exact(const System& sys);

// ---------------------------------------------------------------------------
// Index families

struct Interval {
    int first;  // 1-based, inclusive
    int last;   // inclusive
    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class IntervalKind { block, pile };

struct IntervalFamily {
    IntervalKind kind = IntervalKind::block;
    std::vector<Interval> intervals;

    /// Checks the shape invariant of the kind. Throws on violation.
    void validate() const;
    /// True when the block family covers exactly 1..n.
    bool covers(int n) const;
};

/// Spanning indices q(1..|zsys|) of zsys relative to xsys. q(m) is the least
/// q such that every z_n, n <= m, is within `tol` (relative to |z_n|) of
/// span{x_1..x_q}, and likewise every z_n^* of span{f_1..f_q}.
std::vector<int> spanning_indices(const System& zsys, const System& xsys, double tol);

/// Same computation against arbitrary prefix-span generators: the columns of
/// `x_prefix` and `f_prefix` only matter through their nested prefix spans.
/// Useful when the reference system is ill-conditioned but well-conditioned
/// generators of the same prefix spans are known.
std::vector<int> spanning_indices(const Matrix& zs, const Matrix& zstars, const Matrix& x_prefix,
                                  const Matrix& f_prefix, double tol);

enum class PerturbationKind { block, pile, neither };

struct Classification {
    PerturbationKind kind = PerturbationKind::neither;
    IntervalFamily blocks;  // set when kind == block
    IntervalFamily piles;   // prefixes {1..m} on which both spans agree
};

Classification classify_perturbation(const System& zsys, const System& xsys, double tol);

/// Re-derives the functional spans of each interval as the orthogonal
/// complement, inside the total span, of the vector spans of the other
/// intervals, for both systems, and compares them.
bool block_duality_check(const System& zsys, const System& xsys, const IntervalFamily& intervals);

/// Gap between span_A cap span_B (computed from principal vectors at angle
/// ~ 0) and span_{A cap B}. Index sets are 1-based.
double intersection_defect(const System& sys, const std::vector<int>& A, const std::vector<int>& B);

/// Columns of `m` at the given 1-based indices.
Matrix select_columns(const Matrix& m, const std::vector<int>& indices);
Matrix column_range(const Matrix& m, int first, int last);  // 1-based inclusive

}  // namespace mbasis
