#pragma once

#include <random>

#include "mbasis/types.hpp"

namespace testing {

inline mbasis::Matrix gaussian(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    mbasis::Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

inline mbasis::Vector random_unit(int dim, std::uint64_t seed) {
    mbasis::Vector v = gaussian(dim, 1, seed).col(0);
    return v.normalized();
}

}  // namespace testing
