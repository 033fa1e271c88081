#pragma once

#include <vector>

#include "mbasis/biorth.hpp"
#include "mbasis/rough.hpp"

namespace mbasis {

/// eps_i = scale * 2^{-i}, i = 1..n.
std::vector<double> geometric_eps(int n, double scale = 0.25);

/// sup_n sum_{i>n} eps_i^2, which for a finite list is the full sum.
double eps_tail_sum(const std::vector<double>& eps);

/// Throws (anchor "tail-eps") unless sum_{i>n} eps_i^2 <= 1/8 for every n.
void require_eps_tail(const std::vector<double>& eps);

struct PathologyChecks {
    double defect = 0.0;              // max |<f_k, x_n> - delta|, evaluated in extended precision
    double vector_span_residual = 0;  // max_n dist(x_n/|x_n|, span{e_hat_1..e_hat_n})
    bool dual_support = true;         // f_n supported on {e_pi(k) : k <= n} with f_n[pi(n)] != 0
    double hat_slack = 0.0;           // min_n (eps_n - |e_hat_n - e_n|)
    double max_x_norm = 0.0;
    bool pass = false;
};

/// Near-canonical system on l2^ambient: prefix spans of x equal those of
/// e_hat, prefix spans of f equal those of e_pi(n), |e_hat_n - e_n| <= eps_n.
struct PathologicalSystem {
    MatrixHP xs;
    MatrixHP fs;
    Matrix deltas;        // d_n = e_hat_n - e_n, exact
    Matrix e_hats;        // e_n + d_n rounded to double
    std::vector<int> pi;  // 1-based values on 1..M
    std::vector<double> eps;
    PathologyChecks checks;

    int size() const { return static_cast<int>(xs.cols()); }
    /// Functional prefix generators e_pi(1..M).
    Matrix pi_generators() const;
    System to_double(ToleranceConfig tol = {}) const;
};

/// Inductive construction: f_n is e_pi(n) made orthogonal to x_1..x_{n-1}
/// inside span{e_pi(k) : k <= n}, then e_hat_n = e_n + 0.9 eps_n sign(f_n(e_n)) f_n
/// and x_n is the element of span{e_hat_k : k <= n} biorthogonal to f_1..f_n.
/// All three postconditions are verified before returning.
PathologicalSystem build_pathological_system(const std::vector<int>& pi, const std::vector<double>& eps, int M,
                                             int ambient, ToleranceConfig tol = {});

struct TOperator {
    Matrix T;
    double norm = 0.0;
    double norm_inv = 0.0;
};

/// T e_hat_n = e_n for the given columns, identity on their orthogonal complement.
TOperator operator_T(const Matrix& e_hats, int ambient);

struct DecayRow {
    int n = 0;
    double measured = 0.0;  // |T z_n - z_n|
    double bound = 0.0;     // min_k sum_{i<=k} |a_{n,i}| + (sum_{i>k} eps_i^2)^{1/2}
    int k_star = 0;
};

struct DecayTable {
    std::vector<DecayRow> rows;
    bool within_bound = true;  // measured <= 2 * bound for every row
};

/// Columns of `zs` are normalized; a_{n,i} = <e_i, z_n>.
DecayTable t_asymptotics_check(const Matrix& T, const Matrix& zs, const std::vector<double>& eps);

/// Centered moving average with the window shrunk at both ends.
std::vector<double> moving_average(const std::vector<double>& v, int window);

/// Last n with |T z_n - z_n| >= 1/(4M) (0 when none), so that the bound
/// holds for every n > n0.
int decay_threshold_index(const DecayTable& table, double M);

/// {1..r} cap {pi(1)..pi(r)} for a finite permutation (1-based values).
std::vector<int> omega_set(const std::vector<int>& pi, int r);

/// y_n = P T z_n and y_n^* = P z_n^*, n = n0+1..p, with P the coordinate
/// projection onto Omega(r), returned as vectors of l2^{|Omega(r)|}.
/// `x_prefix` generates the prefix spans of the reference vectors; the
/// containments span{z_n}_{n<=p} in span{x_n}_{n<=r} and supp z_n^* in
/// pi({1..r}) are checked at span_tol.
RoughSystem extract_rough_system(const System& zsys, const Matrix& x_prefix, const Matrix& T,
                                 const std::vector<int>& pi, int p, int r, int n0, double M);

}  // namespace mbasis
