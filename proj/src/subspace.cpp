#include "mbasis/subspace.hpp"

#include <numbers>

namespace mbasis {

namespace {

// Angular step that keeps every unit vector within `resolution` of the grid.
// Moving each of the (dim-1) angles by at most step/2 moves a point of the
// sphere by at most sqrt(dim-1) * step / 2.
double angle_step(Eigen::Index dim, double resolution) {
    const double chord = 2.0 * std::asin(resolution / 2.0);
    const double product = 2.0 * resolution / std::sqrt(static_cast<double>(dim - 1));
    return std::min(chord, product);
}

struct AngleGrid {
    std::size_t polar_points;    // per angle in [0, pi], endpoints included
    std::size_t azimuth_points;  // last angle in [0, 2 pi)
};

AngleGrid grid_for(Eigen::Index dim, double resolution) {
    const double h = angle_step(dim, resolution);
    AngleGrid g;
    g.polar_points = static_cast<std::size_t>(std::ceil(std::numbers::pi / h)) + 1;
    g.azimuth_points = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / h));
    return g;
}

}  // namespace

std::size_t unit_net_size(Eigen::Index dim, double resolution) {
    if (dim <= 0) return 0;
    if (dim == 1) return 2;
    const AngleGrid g = grid_for(dim, resolution);
    double total = static_cast<double>(g.azimuth_points);
    for (Eigen::Index i = 0; i < dim - 2; ++i) total *= static_cast<double>(g.polar_points);
    if (total > 1e18) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(total);
}

std::vector<Vector> unit_net(const Matrix& S, double resolution, std::size_t cap, double rank_tol) {
    if (!(resolution > 0.0 && resolution < 1.0))
        throw Error("unit_net: resolution must lie in (0, 1)");
    require_finite(S, "unit_net");
    const Matrix Q = orthonormal_basis(S, rank_tol);
    const Eigen::Index d = Q.cols();
    if (d == 0) throw Error("unit_net: zero subspace has no unit sphere");

    std::vector<Vector> net;
    if (d == 1) {
        net.push_back(Q.col(0));
        net.push_back(-Q.col(0));
        return net;
    }
    const std::size_t size = unit_net_size(d, resolution);
    if (size > cap)
        throw Error("unit_net: " + std::to_string(size) + " points exceed cap " + std::to_string(cap) +
                    " for a " + std::to_string(d) + "-dimensional span");

    const AngleGrid g = grid_for(d, resolution);
    const std::size_t polar = static_cast<std::size_t>(d - 2);
    std::vector<std::size_t> idx(polar + 1, 0);
    const double polar_step = std::numbers::pi / static_cast<double>(g.polar_points - 1);
    const double azimuth_step = 2.0 * std::numbers::pi / static_cast<double>(g.azimuth_points);
    net.reserve(size);

    Vector coords(d);
    for (;;) {
        double sin_prod = 1.0;
        for (std::size_t i = 0; i < polar; ++i) {
            const double theta = polar_step * static_cast<double>(idx[i]);
            coords(static_cast<Eigen::Index>(i)) = sin_prod * std::cos(theta);
            sin_prod *= std::sin(theta);
        }
        const double phi = azimuth_step * static_cast<double>(idx[polar]);
        coords(d - 2) = sin_prod * std::cos(phi);
        coords(d - 1) = sin_prod * std::sin(phi);
        Vector u = Q * coords;
        net.push_back(u / u.norm());

        std::size_t k = 0;
        for (; k <= polar; ++k) {
            const std::size_t limit = k < polar ? g.polar_points : g.azimuth_points;
            if (++idx[k] < limit) break;
            idx[k] = 0;
        }
        if (k > polar) break;
    }
    return net;
}

}  // namespace mbasis
