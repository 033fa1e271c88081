#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mbasis/biorth.hpp"
#include "mbasis/pathology.hpp"
#include "mbasis/permutation.hpp"
#include "mbasis/systems.hpp"

using namespace mbasis;

namespace {

// z_1 = e1 - 10 e2, z_2 = 10 e2 with duals e1, e1 + 0.1 e2
System micro() {
    Matrix x(2, 2), f(2, 2);
    x << 1, 0, -10, 10;
    f << 1, 1, 0, 0.1;
    return System(x, f);
}

System swapped(const System& s, int a, int b) {
    Matrix x = s.xs(), f = s.fs();
    x.col(a - 1).swap(x.col(b - 1));
    f.col(a - 1).swap(f.col(b - 1));
    return System(x, f, s.tol());
}

}  // namespace

TEST_CASE("constructor contracts") {
    CHECK_THROWS_AS(System(Matrix::Identity(2, 2), Matrix::Identity(2, 1)), Error);
    CHECK_THROWS_AS(System(Matrix::Zero(2, 1), Matrix::Identity(2, 1)), Error);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(System(bad, Matrix::Identity(2, 2)), Error);
}

TEST_CASE("micro example: bounded by about 10.05, minimality 1/sqrt(101)") {
    const System s = micro();
    CHECK(biorthogonality_defect(s) < 1e-15);
    CHECK(boundedness_constant(s) == doctest::Approx(std::max(std::sqrt(101.0), 10 * std::sqrt(1.01))).epsilon(1e-12));
    CHECK(uniform_minimality_constant(s) == doctest::Approx(1 / std::sqrt(101.0)).epsilon(1e-12));
}

TEST_CASE("norming constant of a one-vector system") {
    Matrix x(2, 1), f(2, 1);
    x << 1, 0;
    f << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const System s(x, f);
    CHECK(norming_constant_exact(s) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
    const double est = norming_constant_estimate(s, 64, 3);
    CHECK(est >= norming_constant_exact(s) - 1e-12);
}

TEST_CASE("pathological system at n <= 50 is biorthogonal") {
    const auto spec = build_permutation(tabulate([](int n) { return double(n); }, 4096));
    const auto pi = finite_section(spec, 50);
    const auto ps = build_pathological_system(pi, geometric_eps(50), 50, 50);
    CHECK(ps.checks.defect <= 1e-8);
    CHECK(static_cast<double>(biorthogonality_defect(BiorthSystem<HighPrecision>(ps.xs, ps.fs))) <= 1e-8);
}

TEST_CASE("spanning indices: swap and shift") {
    const System c = canonical_system(6);
    const auto q = spanning_indices(swapped(c, 1, 2), c, 1e-8);
    REQUIRE(q.size() == 6);
    CHECK(q[0] == 2);
    for (int m = 2; m <= 6; ++m) CHECK(q[m - 1] == m);

    Matrix x = c.xs(), f = c.fs();
    x.col(0) = c.xs().col(2);
    f.col(0) = c.fs().col(2);
    x.col(2) = c.xs().col(0);
    f.col(2) = c.fs().col(0);
    CHECK(spanning_indices(System(x, f), c, 1e-8)[0] == 3);
}

TEST_CASE("spanning indices are order-sensitive, defect and boundedness are not") {
    const System s = coupled_system(8, 0.4);
    const System t = swapped(s, 2, 5);
    CHECK(biorthogonality_defect(t) == doctest::Approx(biorthogonality_defect(s)).epsilon(1e-12));
    CHECK(boundedness_constant(t) == doctest::Approx(boundedness_constant(s)).epsilon(1e-12));
    CHECK(spanning_indices(s, s, 1e-8) != spanning_indices(t, s, 1e-8));
}

TEST_CASE("classification: blockwise recombination is block, Gram-Schmidt is a pile") {
    const System c = canonical_system(6);
    Matrix x = c.xs();
    // invertible mixing inside {1,2} and {3,4,5}
    x.col(0) = c.xs().col(0) + 2 * c.xs().col(1);
    x.col(2) = c.xs().col(2) - c.xs().col(4);
    x.col(3) = c.xs().col(3) + 0.5 * c.xs().col(2);
    const System z = system_from_vectors(x);
    const auto cl = classify_perturbation(z, c, 1e-8);
    CHECK(cl.kind == PerturbationKind::block);
    REQUIRE(cl.blocks.intervals.size() == 3);
    CHECK(cl.blocks.intervals[0] == Interval{1, 2});
    CHECK(cl.blocks.intervals[1] == Interval{3, 5});
    CHECK(block_duality_check(z, c, cl.blocks));

    const System xs = coupled_system(6, 0.5);
    const System g = gram_schmidt_system(xs.xs());
    const auto cg = classify_perturbation(g, xs, 1e-8);
    CHECK(cg.kind != PerturbationKind::neither);
    CHECK(cg.piles.intervals.size() >= 1);
}

TEST_CASE("block duality detects a cross-boundary mix") {
    const System c = canonical_system(6);
    IntervalFamily fam{IntervalKind::block, {{1, 2}, {3, 4}, {5, 6}}};
    CHECK(block_duality_check(c, c, fam));
    Matrix x = c.xs();
    x.col(0) = c.xs().col(0) + c.xs().col(3);
    const System z = system_from_vectors(x);
    CHECK_FALSE(block_duality_check(z, c, fam));
    // the mix merges 1..4 into one block
    const auto cl = classify_perturbation(z, c, 1e-8);
    REQUIRE(cl.kind == PerturbationKind::block);
    CHECK(cl.blocks.intervals.front() == Interval{1, 4});
}

TEST_CASE("intersection defect vanishes for a Markushevich-type system") {
    const System s = coupled_system(8, 0.6);
    CHECK(intersection_defect(s, {1, 2, 3, 5}, {2, 3, 4, 5, 7}) < 1e-8);
}

TEST_CASE("property: random systems are biorthogonal and bounded consistently") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix x = Matrix::Identity(12, 12) + 0.3 * testing::gaussian(12, 12, seed) / std::sqrt(12.0);
        const System s = system_from_vectors(x);
        CHECK(biorthogonality_defect(s) < 1e-10);
        // uniform minimality and boundedness are reciprocal-ish: 1/C <= min dist
        CHECK(uniform_minimality_constant(s) >= 1 / boundedness_constant(s) - 1e-10);
        CHECK(norming_constant_exact(s) == doctest::Approx(1.0).epsilon(1e-10));
    }
}
