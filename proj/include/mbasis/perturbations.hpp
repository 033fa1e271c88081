#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbasis/biorth.hpp"

namespace mbasis {

/// Finite sets A(j) with anchors n(j) in A(j) and weights eps_j. All index
/// values are 1-based; blocks[j-1] holds A(j).
struct BlockPartition {
    std::vector<std::vector<int>> blocks;
    std::vector<int> anchors;
    std::vector<double> epsilons;

    std::size_t size() const { return blocks.size(); }
    double epsilon_sum() const;
};

struct PartitionReport {
    bool disjoint = true;
    bool covers = true;          // union equals {1..range_end}
    bool anchors_valid = true;   // n(j) in A(j), sizes consistent, eps_j > 0
    bool block_kind = false;     // successive j-intervals with interval unions exist
    IntervalFamily witness;      // the j-intervals I(m) when block_kind
    std::vector<int> block_ends; // last element of each union, aligned with witness
    double epsilon_sum = 0.0;
    std::vector<std::string> failures;

    bool valid() const { return disjoint && covers && anchors_valid; }
};

PartitionReport validate_block_partition(const BlockPartition& p, int range_end);

/// A(j) = {j}, n(j) = j for j = 1..n, eps_j = eps0 * 2^{-j}.
BlockPartition singleton_partition(int n, double eps0 = 1.0);

/// Appends singleton blocks {k} for the uncovered indices up to `n`, with
/// eps continuing the geometric tail of the last block.
BlockPartition extend_with_singletons(BlockPartition p, int n);

/// Builds the flattened perturbation blockwise: inside A(j) the anchor
/// functional is kept, every other functional becomes f_{n(j)} plus a seeded
/// random direction of span{f_n : n in A(j)} orthogonal to f_{n(j)}, scaled to
/// 0.9 eps_j / |x_{n(j)}|; vectors are recovered by a dual solve inside
/// span{x_n : n in A(j)}.
System construct_flattened(const System& sys, const BlockPartition& p, std::uint64_t seed);

/// Completes given new functionals (column n is z_{n+1}^*) into a biorthogonal
/// system, solving for z_n inside span{x_k : k in A(j)} block by block.
System flatten_with_duals(const System& sys, const BlockPartition& p, const Matrix& zstars);

struct BlockCheck {
    int j = 0;
    double vector_gap = 0.0;
    double dual_gap = 0.0;
    double anchor_slack = 0.0;  // min_n eps_j/|x_{n(j)}| - |z_n^* - f_{n(j)}|
};

struct FlattenReport {
    std::vector<BlockCheck> blocks;
    double defect = 0.0;
    bool pass = false;
};

FlattenReport verify_flattened(const System& zsys, const System& xsys, const BlockPartition& p);

}  // namespace mbasis
