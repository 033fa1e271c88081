#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mbasis/subspace.hpp"

using namespace mbasis;

namespace {

Matrix cols(std::initializer_list<std::initializer_list<double>> vs) {
    const auto n = static_cast<Eigen::Index>(vs.size());
    const auto d = static_cast<Eigen::Index>(vs.begin()->size());
    Matrix m(d, n);
    Eigen::Index j = 0;
    for (const auto& v : vs) {
        Eigen::Index i = 0;
        for (double x : v) m(i++, j) = x;
        ++j;
    }
    return m;
}

}  // namespace

TEST_CASE("distance to a line, hand values") {
    Vector x(2);
    x << 1, 1;
    x /= std::sqrt(2.0);
    CHECK(distance_to_span(x, cols({{1, 0}})) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));

    Vector y(2);
    y << 3, 4;
    const auto p = project(y, cols({{1, 0}}));
    CHECK(p.projection(0) == doctest::Approx(3.0));
    CHECK(std::abs(p.projection(1)) < 1e-15);
    CHECK(p.residual == doctest::Approx(4.0));
}

TEST_CASE("zero subspace") {
    Vector x = Vector::Ones(3);
    CHECK(distance_to_span(x, Matrix(3, 0)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(distance_to_span(x, Matrix::Zero(3, 2)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(numerical_rank(Matrix::Zero(3, 2)) == 0);
}

TEST_CASE("dimension mismatch throws") {
    Vector x = Vector::Ones(3);
    CHECK_THROWS_AS(distance_to_span(x, Matrix::Identity(2, 2)), Error);
}

TEST_CASE("span equality and principal angle") {
    const Matrix a = cols({{1, 0}});
    const Matrix b = cols({{1, 0.5}});
    CHECK_FALSE(span_equal(a, b, 1e-6));
    // gap of two lines is the sine of their angle
    CHECK(subspace_gap(a, b) == doctest::Approx(std::sin(std::atan(0.5))).epsilon(1e-12));
    CHECK(span_equal(cols({{1, 1}, {1, -1}}), Matrix::Identity(2, 2), 1e-12));
    CHECK(subspace_gap(a, Matrix::Identity(2, 2)) == 1.0);
}

TEST_CASE("dual solve of a 2x2 system") {
    const Matrix v = cols({{1, 0}, {1, 1}});
    const Matrix f = dual_solve(v, Matrix::Identity(2, 2));
    CHECK((f.col(0) - Vector((Vector(2) << 1, -1).finished())).norm() < 1e-14);
    CHECK((f.col(1) - Vector((Vector(2) << 0, 1).finished())).norm() < 1e-14);
    CHECK_THROWS_AS(dual_solve(cols({{1, 0}, {2, 0}}), Matrix::Identity(2, 2)), Error);
}

TEST_CASE("unit net of the circle") {
    CHECK(unit_net_size(2, 0.5) == 13);
    CHECK(unit_net_size(2, 0.5) <= 26);
    const auto net = unit_net(Matrix::Identity(2, 2), 0.5);
    CHECK(net.size() == 13);
    // every direction is within 0.5 of a net point
    double worst = 0;
    for (int k = 0; k < 3600; ++k) {
        const double t = 2 * M_PI * k / 3600.0;
        Vector u(2);
        u << std::cos(t), std::sin(t);
        double best = 2;
        for (const auto& p : net) best = std::min(best, (p - u).norm());
        worst = std::max(worst, best);
    }
    CHECK(worst <= 0.5);
}

TEST_CASE("property: projection residual is orthogonal and idempotent") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Matrix S = testing::gaussian(9, 4, seed);
        const Vector x = testing::gaussian(9, 1, seed + 100).col(0);
        const auto p = project(x, S);
        CHECK((S.transpose() * (x - p.projection)).norm() < 1e-12 * x.norm() * S.norm());
        const auto pp = project(p.projection, S);
        CHECK(pp.residual < 1e-12 * x.norm());
        CHECK(p.residual <= x.norm() + 1e-15);
    }
}
