#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mbasis {

/// Marks a value of Phi (and hence of pi) that the table cannot resolve: it
/// is only known to be >= N, the table length.
inline constexpr std::int64_t kBeyondTable = std::numeric_limits<std::int64_t>::max();

/// Unit-jump staircase phi on 1..N: phi(1) = 1, and phi steps from v to v+1 at
/// the first n with n >= 2 J_v (J_v = first index with phi = v) and
/// v + 1 <= log2 f(n) + 1. Keeps phi(n) <= n, phi(2n) <= 2 phi(n) and
/// phi = O(log f). Throws when f decreases or is constant on the table.
std::vector<int> build_phi(const std::vector<double>& f);

/// Tabulate f(1..N).
std::vector<double> tabulate(const std::function<double(int)>& f, int N);

struct PermutationSpec {
    std::vector<double> f;             // f(1..N), index 0 unused
    std::vector<int> phi;              // phi(0..N), phi(0) = 0
    std::vector<std::int64_t> Phi;     // Phi(1..N), kBeyondTable when >= N
    std::vector<char> in_gamma;        // 1..N
    std::vector<std::int64_t> pi;      // pi(1..N), kBeyondTable when >= N
    std::vector<int> free_cursor;      // minimal unused value before step n
    std::vector<int> inverse;          // inverse[v] = n with pi(n) = v, 0 if none in 1..N

    int size() const { return static_cast<int>(phi.size()) - 1; }
    /// Largest m for which Omega(m) and the Phi counts are exact (N - 1).
    int resolved() const { return size() - 1; }
};

/// pi(n) = Phi(n) off Gamma and the least unused value on Gamma, with Gamma
/// the jump set of phi. Verifies injectivity.
PermutationSpec build_permutation(const std::vector<double>& f, const std::vector<int>& phi);
PermutationSpec build_permutation(const std::vector<double>& f);

/// |Omega(m)|, m = 0..resolved(), where Omega(m) = {1..m} cap {pi(1)..pi(m)}.
std::vector<int> omega_sizes(const PermutationSpec& spec);

struct PermutationChecks {
    bool injective = true;
    bool phi_properties = true;   // non-decreasing, onto, phi(n) <= n, phi(2n) <= 2 phi(n)
    bool gamma_bound = true;      // |Gamma cap 1..m| <= phi(m)
    bool fi_two_point = true;     // |{n : Phi(n) <= m}| in {phi(m)-1, phi(m)}
    bool omega_bound = true;      // |Omega(m)| <= 2 phi(m)
    bool Phi_monotone = true;     // strictly increasing with Phi(n) >= n
    std::vector<std::string> failures;
    bool all() const {
        return injective && phi_properties && gamma_bound && fi_two_point && omega_bound && Phi_monotone;
    }
};

PermutationChecks check_permutation(const PermutationSpec& spec);

struct OmegaRow {
    int n = 0;
    int omega_n = 0;
    double f_n = 0.0;
    std::vector<double> ratios;  // |Omega(c n)| / f(n), one per c
    std::vector<double> bounds;  // 2 * 2^k phi(n) / f(n) with 2^k >= c
};

/// Growth table on the given grid of n, for each multiplier c.
std::vector<OmegaRow> omega_stats(const PermutationSpec& spec, const std::vector<int>& cs,
                                  const std::vector<int>& grid);

/// Roughly log-spaced integers in [lo, hi], `per_decade` per factor 10.
std::vector<int> log_grid(int lo, int hi, int per_decade);

/// Finite permutation of 1..D (D <= resolved()) standing in for pi on a D-dimensional truncation:
/// exact values pi(n) <= D are kept and the positions whose value exceeds D
/// receive the unused values of 1..D in decreasing order.
std::vector<int> finite_section(const PermutationSpec& spec, int D);

/// Text table `n phi Phi inGamma pi`, unresolved values printed as >=N.
std::string permutation_table(const PermutationSpec& spec, int rows);

}  // namespace mbasis
