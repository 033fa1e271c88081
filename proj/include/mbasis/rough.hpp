#pragma once

#include <cstdint>

#include "mbasis/types.hpp"

namespace mbasis {

/// Finite system (y_n, g_n) in a k-dimensional l2, columns of `ys` / `gs`.
struct RoughSystem {
    Matrix ys;
    Matrix gs;
    double eps = 0.25;
    double bound_M = 2.0;

    Eigen::Index size() const { return ys.cols(); }
    Eigen::Index dim() const { return ys.rows(); }
};

/// max_{k,n} |<g_k, y_n> - delta_kn| (0 for an empty system).
double rough_defect(const RoughSystem& rs);

/// max_n |y_n| |g_n|.
double rough_bound(const RoughSystem& rs);

/// Certified when rough_defect <= eps and rough_bound <= bound_M.
bool rough_certified(const RoughSystem& rs);

/// min_{k != n} |y_k - y_n| (infinity for fewer than two vectors).
double rough_separation(const RoughSystem& rs);

struct RoughCapacity {
    double delta = 0.0;  // (1 - 2 eps) / M
    double p_max = 0.0;  // (1 + 2/delta)^k
    double c1 = 0.0;     // 1 / ln(1 + 2/delta)
};

/// Volume bound on the size of an eps-rough, M-bounded system in dimension k.
RoughCapacity rough_capacity(int k, double eps, double M);

/// Greedy randomized packing: draws `trials` candidates (y unit, g with
/// g(y) = 1 and |g| <= M) and keeps each one that stays eps-rough against the
/// ones already kept. The result is certified by construction.
RoughSystem greedy_rough_packing(int k, double eps, double M, int trials, std::uint64_t seed);

}  // namespace mbasis
