#include "mbasis/rough.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace mbasis {

double rough_defect(const RoughSystem& rs) {
    if (rs.size() == 0) return 0.0;
    Matrix g = rs.gs.transpose() * rs.ys;
    g -= Matrix::Identity(g.rows(), g.cols());
    return g.cwiseAbs().maxCoeff();
}

double rough_bound(const RoughSystem& rs) {
    double b = 0.0;
    for (Eigen::Index n = 0; n < rs.size(); ++n) b = std::max(b, rs.ys.col(n).norm() * rs.gs.col(n).norm());
    return b;
}

bool rough_certified(const RoughSystem& rs) {
    return rough_defect(rs) <= rs.eps && rough_bound(rs) <= rs.bound_M;
}

double rough_separation(const RoughSystem& rs) {
    double s = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < rs.size(); ++a)
        for (Eigen::Index b = a + 1; b < rs.size(); ++b) s = std::min(s, (rs.ys.col(a) - rs.ys.col(b)).norm());
    return s;
}

RoughCapacity rough_capacity(int k, double eps, double M) {
    if (k < 1) throw Error("rough_capacity: dimension must be >= 1");
    if (!(eps > 0) || !(eps < 0.5)) throw Error("rough_capacity: eps must lie in (0, 1/2)", "rough-eps");
    if (!(M >= 1)) throw Error("rough_capacity: M must be >= 1");
    RoughCapacity c;
    c.delta = (1.0 - 2.0 * eps) / M;
    const double base = 1.0 + 2.0 / c.delta;
    c.p_max = std::pow(base, k);
    c.c1 = 1.0 / std::log(base);
    return c;
}

RoughSystem greedy_rough_packing(int k, double eps, double M, int trials, std::uint64_t seed) {
    if (k < 1 || trials < 0) throw Error("greedy_rough_packing: bad arguments");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(1.0 / M, 1.0);
    auto random_unit = [&] {
        Vector v(k);
        do {
            for (int i = 0; i < k; ++i) v(i) = gauss(rng);
        } while (v.norm() == 0.0);
        return Vector(v.normalized());
    };

    std::vector<Vector> ys, gs;
    for (int t = 0; t < trials; ++t) {
        const Vector y = random_unit();
        // g = u / <u, y> with <u, y> = cos drawn in [1/M, 1], so g(y) = 1 and |g| <= M
        const double cos = unif(rng);
        Vector u = y * cos;
        if (k > 1) {
            Vector w = random_unit();
            w -= y * y.dot(w);
            if (w.norm() > 1e-12) u += w.normalized() * std::sqrt(std::max(0.0, 1.0 - cos * cos));
        }
        const Vector g = u / u.dot(y);
        bool ok = g.norm() <= M;
        for (std::size_t i = 0; ok && i < ys.size(); ++i)
            ok = std::abs(gs[i].dot(y)) <= eps && std::abs(g.dot(ys[i])) <= eps;
        if (ok) {
            ys.push_back(y);
            gs.push_back(g);
        }
    }
    RoughSystem rs;
    rs.eps = eps;
    rs.bound_M = M;
    rs.ys.resize(k, static_cast<Eigen::Index>(ys.size()));
    rs.gs.resize(k, static_cast<Eigen::Index>(gs.size()));
    for (std::size_t i = 0; i < ys.size(); ++i) {
        rs.ys.col(static_cast<Eigen::Index>(i)) = ys[i];
        rs.gs.col(static_cast<Eigen::Index>(i)) = gs[i];
    }
    return rs;
}

}  // namespace mbasis
