#pragma once

#include <string>
#include <vector>

#include "mbasis/pathology.hpp"
#include "mbasis/permutation.hpp"

namespace mbasis {

/// lambda_m, m = 1..n, for a named schedule: "linear" (m) or "quadratic" (m^2).
std::vector<double> lambda_schedule(const std::string& name, int n);

struct UnbConfig {
    int truncation = 256;
    std::string lambda = "linear";
    double eps_scale = 0.25;  // eps_i = eps_scale * 2^{-i}
    bool identity_control = false;
    ToleranceConfig tol;
};

struct UnbRow {
    int m = 0;
    int q = 0;
    double lambda = 0.0;
    double ratio = 0.0;   // q(m) / lambda_m
    int omega = 0;        // |Omega(q(m))|
    int two_phi = 0;      // 2 phi(q(m))
    double c1log = 0.0;   // c1 log(m - n0), 0 when m <= n0
    bool resolved = true; // preimages of 1..m lie in the truncation and Omega(q(m)) matches the table pi
    bool certified = false;
    double rough_defect = 0.0;
    int rough_size = 0;
    double log_capacity = 0.0;  // |Omega| log(1 + 2/delta) = log p_max
};

struct UnbReport {
    int truncation = 0;
    std::vector<UnbRow> rows;  // m = 1..truncation
    int n0 = 0;
    double normT = 0.0;
    double normTinv = 0.0;
    double defect = 0.0;
    int resolved_depth = 0;
    std::vector<int> jump_points;  // m in 2..resolved_depth with q(m) > q(m-1)
    bool ratios_monotone = true;   // q/lambda non-decreasing along jump_points
    bool omega_bracket = true;     // |Omega(q(m))| <= 2 phi(q(m)) on resolved rows
    bool capacity_ok = true;       // certified rows: size <= p_max(|Omega|)
    bool lower_bracket = true;     // certified rows: c1 log(m - n0) <= |Omega|
    bool control_identity = true;  // identity control: q(m) = m
};

/// f(n) = kappa log(lambda_n + 1) with kappa = lambda_N / log(lambda_N + 1),
/// phi and pi from build_permutation, the finite section of pi on
/// 1..truncation, the near-canonical system, its Gram-Schmidt
/// orthonormalization z, spanning indices q of z, and the rough-system
/// extraction at p(m) = m, r(m) = q(m).
UnbReport unb_experiment(const UnbConfig& cfg);

}  // namespace mbasis
