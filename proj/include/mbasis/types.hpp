#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace mbasis {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;

/// Extended-precision real used where vector norms span many decades
/// (the near-canonical system of the pathology module grows like 2^n).
using HighPrecision = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<160>, boost::multiprecision::et_off>;

using VectorHP = Vec<HighPrecision>;
using MatrixHP = Mat<HighPrecision>;

/// Raised for every contract violation in the library. `anchor` names the
/// violated condition when there is one (e.g. "tail-eps" for the
/// square-summable tail requirement) so the CLI can report it.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, std::string anchor = {})
        : std::runtime_error(what), anchor_(std::move(anchor)) {}
    const std::string& anchor() const noexcept { return anchor_; }

private:
    std::string anchor_;
};

struct ToleranceConfig {
    double rank_tol = 1e-10;  // relative to the largest singular value
    double biorth_tol = 1e-8;
    double span_tol = 1e-8;
    double net_resolution = 0.05;

    void validate() const {
        if (!(rank_tol > 0) || !(biorth_tol > 0) || !(span_tol > 0) || !(net_resolution > 0))
            throw Error("tolerances must be strictly positive");
        if (!(net_resolution < 1)) throw Error("net_resolution must be < 1");
    }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    using boost::multiprecision::isfinite;
    using std::isfinite;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!isfinite(m(i, j))) return false;
    return true;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!all_finite(m)) throw Error(std::string(what) + ": non-finite entry");
}

inline Vector unit_vector(Eigen::Index dim, Eigen::Index i) {
    Vector e = Vector::Zero(dim);
    e(i) = 1.0;
    return e;
}

}  // namespace mbasis
