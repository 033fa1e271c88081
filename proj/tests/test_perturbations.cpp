#include <doctest.h>

#include <cmath>

#include "mbasis/io.hpp"
#include "mbasis/perturbations.hpp"
#include "mbasis/representing.hpp"
#include "mbasis/systems.hpp"

using namespace mbasis;

namespace {

BlockPartition staircase() {
    BlockPartition p;
    p.blocks = {{1, 2, 3}, {4, 7, 8, 9, 10}, {5, 11, 12, 13, 14, 15}, {6, 16, 17, 18, 19, 20, 21}};
    p.anchors = {1, 4, 5, 6};
    p.epsilons = {0.5, 0.25, 0.125, 0.0625};
    return p;
}

}  // namespace

TEST_CASE("staircase partition is block kind with ends 3 and 21") {
    const auto rep = validate_block_partition(staircase(), 21);
    CHECK(rep.valid());
    CHECK(rep.block_kind);
    REQUIRE(rep.block_ends.size() == 2);
    CHECK(rep.block_ends[0] == 3);
    CHECK(rep.block_ends[1] == 21);
    CHECK(rep.witness.intervals[0] == Interval{1, 1});
    CHECK(rep.witness.intervals[1] == Interval{2, 4});
    CHECK(rep.epsilon_sum == doctest::Approx(0.9375));
}

TEST_CASE("interleaved blocks group into one interval") {
    BlockPartition p;
    p.blocks = {{1, 3}, {2}};
    p.anchors = {1, 2};
    p.epsilons = {0.5, 0.25};
    const auto rep = validate_block_partition(p, 3);
    CHECK(rep.valid());
    CHECK(rep.block_kind);
    REQUIRE(rep.witness.intervals.size() == 1);
    CHECK(rep.witness.intervals[0] == Interval{1, 2});
    CHECK(rep.block_ends == std::vector<int>{3});
}

TEST_CASE("partition defects are reported") {
    BlockPartition p;
    p.blocks = {{1, 2}, {2, 3}};
    p.anchors = {1, 5};
    p.epsilons = {0.5, -1};
    const auto rep = validate_block_partition(p, 3);
    CHECK_FALSE(rep.disjoint);
    CHECK_FALSE(rep.anchors_valid);
    CHECK_FALSE(rep.valid());
    CHECK(rep.failures.size() >= 3);

    BlockPartition gap = singleton_partition(3);
    gap.blocks[2] = {4};
    gap.anchors[2] = 4;
    CHECK_FALSE(validate_block_partition(gap, 3).covers);
}

TEST_CASE("micro flattening: z1 = e1 - 10 e2, z2 = 10 e2") {
    const System c = canonical_system(2);
    BlockPartition p;
    p.blocks = {{1, 2}};
    p.anchors = {1};
    p.epsilons = {0.1};
    Matrix zstars(2, 2);
    zstars << 1, 1, 0, 0.1;
    const System z = flatten_with_duals(c, p, zstars);
    CHECK(std::abs(z.xs()(0, 0) - 1) < 1e-12);
    CHECK(std::abs(z.xs()(1, 0) + 10) < 1e-12);
    CHECK(std::abs(z.xs()(0, 1)) < 1e-12);
    CHECK(std::abs(z.xs()(1, 1) - 10) < 1e-12);
    CHECK(boundedness_constant(z) == doctest::Approx(10.0498756211).epsilon(1e-9));
    CHECK(boundedness_constant(z) > 10);
    // |z2* - z1*| |x1| = 0.1 sits on the eps boundary, within the check
    const auto rep = verify_flattened(z, c, p);
    CHECK(rep.pass);
}

TEST_CASE("identity perturbation passes with generous eps and fails with tiny eps") {
    const System s = coupled_system(4, 0.5);
    BlockPartition p;
    p.blocks = {{1, 2}, {3, 4}};
    p.anchors = {1, 3};
    double need1 = 0, need2 = 0;
    for (int n : {1, 2})
        need1 = std::max(need1, (s.fs().col(n - 1) - s.fs().col(0)).norm() * s.xs().col(0).norm());
    for (int n : {3, 4})
        need2 = std::max(need2, (s.fs().col(n - 1) - s.fs().col(2)).norm() * s.xs().col(2).norm());
    p.epsilons = {need1 * 1.01, need2 * 1.01};
    CHECK(verify_flattened(s, s, p).pass);
    p.epsilons[0] = need1 * 0.5;
    const auto rep = verify_flattened(s, s, p);
    CHECK_FALSE(rep.pass);
    CHECK(rep.blocks[0].anchor_slack < 0);
}

TEST_CASE("construct_flattened over a strong partition") {
    const System s = coupled_system(40, 0.3);
    const auto r = build_representing_indices(s, 6);
    const auto trace = strong_partition(r, 1);
    const auto p = extend_with_singletons(trace.partition, 40);
    for (std::uint64_t seed : {1, 2, 3}) {
        const System z = construct_flattened(s, p, seed);
        const auto rep = verify_flattened(z, s, p);
        CHECK(rep.pass);
        CHECK(rep.defect < 1e-8);
        CHECK(classify_perturbation(z, s, 1e-8).kind == PerturbationKind::block);
    }
    // same seed, same output
    CHECK((construct_flattened(s, p, 7).xs() - construct_flattened(s, p, 7).xs()).norm() == 0);
}

TEST_CASE("singleton extension continues the geometric eps") {
    BlockPartition p;
    p.blocks = {{2}};
    p.anchors = {2};
    p.epsilons = {0.25};
    const auto q = extend_with_singletons(p, 4);
    REQUIRE(q.size() == 4);
    CHECK(q.blocks[1] == std::vector<int>{1});
    CHECK(q.epsilons[1] == 0.125);
    CHECK(q.epsilons[3] == 0.03125);
    CHECK(validate_block_partition(q, 4).valid());
}

TEST_CASE("partition text round trip") {
    const auto p = staircase();
    const auto q = parse_partition(format_partition(p));
    CHECK(q.blocks == p.blocks);
    CHECK(q.anchors == p.anchors);
    CHECK(q.epsilons == p.epsilons);
    CHECK_THROWS_WITH_AS(parse_partition("A 1: 1 | 1 | 0.5\nA 3: 2 | 2 | 0.25\n"), doctest::Contains("line 2"), Error);
    CHECK_THROWS_AS(parse_partition("B 1: 1 | 1 | 0.5\n"), Error);
}
