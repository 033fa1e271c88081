#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mbasis/representing.hpp"
#include "mbasis/systems.hpp"

using namespace mbasis;

namespace {

RepresentingIndices fixed_indices(std::vector<int> r) {
    RepresentingIndices out;
    out.r = r;
    out.interim_p = r;
    out.deltas.assign(r.size(), 0.05);
    out.truncation = r.back();
    return out;
}

// x_1 = e1 + 0.9 e4 in dim 6, the rest canonical
System far_coupled() {
    Matrix x = Matrix::Identity(6, 6);
    x(3, 0) = 0.9;
    return system_from_vectors(x);
}

// Exact excess for a one-dimensional head: the sup over the unit sphere of
// a line is attained at either sign of its direction, which give equal values.
int oracle_next_index_1d(const System& s, double delta) {
    const int N = static_cast<int>(s.size());
    const Vector u = s.xs().col(0).normalized();
    const double full = distance_to_span(u, column_range(s.xs(), 2, N));
    for (int p = 2; p <= N; ++p)
        if (distance_to_span(u, column_range(s.xs(), 2, p)) - full <= delta) return p;
    return N;
}

}  // namespace

TEST_CASE("strong partition from r = 1,3,6,10,15,21,28 with two blocks") {
    const auto t = strong_partition(fixed_indices({1, 3, 6, 10, 15, 21, 28}), 2);
    const std::vector<std::vector<int>> want{
        {1, 2, 3}, {4, 7, 8, 9, 10}, {5, 11, 12, 13, 14, 15}, {6, 16, 17, 18, 19, 20, 21}};
    CHECK(t.partition.blocks == want);
    CHECK(t.partition.anchors == std::vector<int>{1, 4, 5, 6});
    CHECK(t.block_bounds == std::vector<int>{3, 21});
    CHECK(t.partition.epsilons[0] == 0.5);
    CHECK(t.partition.epsilons[3] == 0.0625);
    CHECK(t.anchor_windows() == std::vector<int>{1, 4, 5, 6});
    CHECK(t.d_map.at(1) == 1);
    CHECK(t.d_map.at(4) == 3);
    CHECK(t.d_map.at(6) == 5);

    const auto rep = validate_block_partition(t.partition, 21);
    CHECK(rep.valid());
    CHECK(rep.block_ends == std::vector<int>{3, 21});

    CHECK(max_strong_blocks(fixed_indices({1, 3, 6, 10, 15, 21, 28})) == 2);
    CHECK_THROWS_AS(strong_partition(fixed_indices({1, 3, 6, 10, 15, 21, 28}), 3), Error);
}

TEST_CASE("far coupling pushes the second representing index to 4") {
    const System s = far_coupled();
    const auto r = build_representing_indices(s, 3);
    CHECK(r.r[0] == 1);
    CHECK(r.r[1] == 4);
    CHECK(r.r[1] == oracle_next_index_1d(s, r.deltas[0]));
    CHECK(r.r[2] == 5);
    // the spectral certificate dominates the sampled excess
    for (int p = 2; p <= 6; ++p) {
        const double cert = tail_distance_excess(s, s.xs().leftCols(1), 2, p);
        const Vector u = s.xs().col(0).normalized();
        const double sampled = distance_to_span(u, column_range(s.xs(), 2, p)) -
                               distance_to_span(u, column_range(s.xs(), 2, 6));
        CHECK(cert >= sampled - 1e-12);
    }
}

TEST_CASE("canonical and coupled systems") {
    const auto rc = build_representing_indices(canonical_system(10), 6);
    CHECK(rc.r == std::vector<int>{1, 2, 3, 4, 5, 6});
    const auto r = build_representing_indices(coupled_system(128, 0.3), 8);
    CHECK(r.r == std::vector<int>{1, 3, 5, 7, 9, 12, 15, 18});
    CHECK(max_strong_blocks(r) == 2);
    CHECK_THROWS_WITH_AS(build_representing_indices(canonical_system(4), 6), doctest::Contains("reachable depth is 4"),
                         Error);
}

TEST_CASE("property: certificate dominates sampled excess") {
    const System s = coupled_system(24, 0.6);
    const Matrix head = s.xs().leftCols(4);
    const Matrix QH = orthonormal_basis(head);
    for (int p : {5, 6, 8, 12}) {
        const double cert = tail_distance_excess(s, head, 5, p);
        double worst = 0;
        for (std::uint64_t seed = 1; seed <= 300; ++seed) {
            const Vector z = QH * testing::random_unit(static_cast<int>(QH.cols()), seed);
            worst = std::max(worst, distance_to_span(z, column_range(s.xs(), 5, p)) -
                                        distance_to_span(z, column_range(s.xs(), 5, 24)));
        }
        CHECK(cert >= worst - 1e-12);
        CHECK(cert <= 1.0 + 1e-12);
    }
}

TEST_CASE("reconstruction matches a least-squares oracle") {
    const Matrix x = Matrix::Identity(20, 20) + 0.25 * testing::gaussian(20, 20, 5) / std::sqrt(20.0);
    const System s = system_from_vectors(x);
    const auto r = build_representing_indices(s, 3);
    CHECK(r.r.back() == 20);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Vector v = testing::random_unit(20, seed);
        for (int m = 0; m + 1 <= r.depth(); ++m) {
            const auto rec = reconstruct(v, s, r, m);
            const int head = r.at(m), next = r.at(m + 1);
            const Vector partial = s.xs().leftCols(head) * (s.fs().leftCols(head).transpose() * v);
            const Matrix W = column_range(s.xs(), head + 1, next);
            const Vector c = W.colPivHouseholderQr().solve(Vector(v - partial));
            CHECK(std::abs(rec.error - (v - partial - W * c).norm()) <= 1e-10);
        }
    }
}

TEST_CASE("subseries masses add up") {
    const System s = coupled_system(30, 0.4);
    const auto r = build_representing_indices(s, 8);
    const Vector v = testing::random_unit(30, 9);
    const auto t = subseries_reconstruct(v, s, r, {1, 3, 5});
    REQUIRE(t.bounds.size() == 3);
    double sum = 0;
    for (double w : t.window_mass) sum += w;
    CHECK(t.skipped_mass == doctest::Approx(sum));
    for (std::size_t k = 1; k < t.residual.size(); ++k) CHECK(t.bounds[k] > t.bounds[k - 1]);
    CHECK_THROWS_AS(subseries_reconstruct(v, s, r, {3, 2}), Error);
}

TEST_CASE("norming indices widen past p when prefix functionals tilt away") {
    // x_2k = e_2k + 2 e_(2k-1): f_(2k-1) = e_(2k-1) - 2 e_2k makes an angle
    // with cos 1/sqrt(5) < 1/2 against span{x_(2k-1)}
    Matrix X = Matrix::Identity(16, 16);
    for (int k = 2; k <= 16; k += 2) X(k - 2, k - 1) = 2;
    const System s = system_from_vectors(X);
    const double nc = norming_constant_exact(s);
    CHECK(nc == doctest::Approx(1.0));
    const double c = nc / 2;
    CHECK(norming_margin(s, 1, 1) == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-12));
    const auto r = build_norming_indices(s, 6, c);
    CHECK(r.r == std::vector<int>{2, 4, 6, 8, 10, 12});
    CHECK(r.interim_p == std::vector<int>{1, 3, 5, 7, 9, 11});
    bool widened = false;
    for (int m = 1; m <= r.depth(); ++m) {
        const int p = r.interim_p[m - 1], rr = r.r[m - 1];
        CHECK(rr >= p);
        CHECK(norming_margin(s, p, rr) >= c - 1e-12);
        if (rr > p) {
            widened = true;
            CHECK(norming_margin(s, p, rr - 1) < c);
        }
    }
    CHECK(widened);
    CHECK_THROWS_AS(build_norming_indices(s, 4, 0.9), Error);
}

TEST_CASE("strongness diagnostic: a single large coefficient triggers case B") {
    const System s = coupled_system(64, 0.3);
    const auto r = build_representing_indices(s, 8);
    const auto t = strong_partition(r, 2);
    const auto p = extend_with_singletons(t.partition, 64);
    const System z = construct_flattened(s, p, 4);

    // weight concentrated on the first anchor after the first block bound
    REQUIRE(t.bound_levels.size() == 2);
    const int lo = t.r_at(t.bound_levels[0]) + 1;
    Vector x = s.xs().col(lo - 1);
    x += 1e-3 * testing::random_unit(64, 3);
    const auto rep = strongness_diagnostic(x, z, s, t, p.epsilons);
    REQUIRE(rep.bounds.size() >= 1);
    CHECK(rep.bounds[0].verdict == StrongCase::B);
    CHECK(rep.bounds[0].n0 == lo);
    CHECK(rep.bounds[0].claim_holds);
    CHECK(rep.residual < 1e-8);
}
