#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mbasis/biorth.hpp"
#include "mbasis/perturbations.hpp"

namespace mbasis {

/// Row m (1-based) of each vector describes r(m). `interim_p[m-1]` is p(m),
/// the index found by the distance condition before any widening (equal to
/// r(m) in the plain construction). `deltas[m-1]` is the accuracy used at
/// step m, i.e. when searching p(m+1).
struct RepresentingIndices {
    std::vector<int> r;
    std::vector<int> interim_p;
    std::vector<double> deltas;
    std::optional<double> norming_c;
    int truncation = 0;  // N: tail spans are taken up to x_N

    int depth() const { return static_cast<int>(r.size()); }
    /// r(m) with the convention r(0) = 0.
    int at(int m) const;
};

/// r(1) = 1; r(m+1) is the least p > r(m) such that for every unit z of
/// span{x_1..x_{r(m)}}, dist(z, span{x_{r(m)+1}..x_p}) is within delta_m of
/// dist(z, span{x_{r(m)+1}..x_N}), delta_m = min(1/(m sum_{n<=r(m)} |f_n||x_n|),
/// net_resolution).
RepresentingIndices build_representing_indices(const System& sys, int depth);

/// Norming refinement seeded at r(0) = 0: after p(m+1) is found as above,
/// r(m+1) >= p(m+1) is the least index such that every unit v of
/// span{x_1..x_{p(m+1)}} has <f, v> >= c for some unit f of span{f_1..f_{r(m+1)}}.
RepresentingIndices build_norming_indices(const System& sys, int depth, double c);

/// Worst-case excess sup_z [dist(z, span x_{from..p}) - dist(z, span x_{from..N})]
/// over unit z of `head`, bounded above by the exact spectral quantity
/// sqrt(lambda_max(Q_H^T (P_N - P_p) Q_H)). Indices 1-based.
double tail_distance_excess(const System& sys, const Matrix& head, int from, int p);

/// min over unit v in span{x_1..x_p} of sup over unit f in span{f_1..f_r} of <f, v>.
double norming_margin(const System& sys, int p, int r);

struct Reconstruction {
    Vector approx;
    Vector v;
    double error = 0.0;
};

/// approx = sum_{n<=r(m)} <f_n,x> x_n + v with v the least-squares corrector
/// from span{x_{r(m)+1}..x_{r(m+1)}}. Accepts m = 0 (empty head).
Reconstruction reconstruct(const Vector& x, const System& sys, const RepresentingIndices& r, int m);

struct SubseriesTrace {
    std::vector<int> bounds;          // r(m_k), k = 1..K
    std::vector<double> residual;     // |x - sum_{n<=r(m_k)} <f_n,x> x_n|
    std::vector<double> window_mass;  // |sum over (r(m_k), r(m_k+1)] of <f_n,x> x_n|
    double skipped_mass = 0.0;        // sum of window_mass
};

SubseriesTrace subseries_reconstruct(const Vector& x, const System& sys, const RepresentingIndices& r,
                                     const std::vector<int>& mks);

struct StrongPartitionTrace {
    BlockPartition partition;
    std::vector<int> block_bounds;  // r-values closing each block (seed 0 excluded)
    std::vector<int> bound_levels;  // m with r(m) = block bound
    std::map<int, int> d_map;       // j -> d_j
    std::map<int, int> j_of_n;      // anchor n(j) -> j
    std::vector<int> r;             // the indices the partition was built from

    /// r(m) with r(0) = 0.
    int r_at(int m) const;
    /// Union of {r(m)+1..r(m+1)} over the block bounds (seed included).
    std::vector<int> anchor_windows() const;
};

/// Block partition built block by block from representing indices, seeded
/// with r(0) = 0: for j in (r(m), r(m+1)], d_j = m + j - r(m) and
/// A(j0 + j - r(m)) = {j} u {r(d_j)+1..r(d_j+1)}, n(...) = j.
/// eps_j = eps0 * 2^{-j}.
StrongPartitionTrace strong_partition(const RepresentingIndices& r, int blocks, double eps0 = 1.0);

/// Largest number of blocks strong_partition can complete with these indices.
int max_strong_blocks(const RepresentingIndices& r);

enum class StrongCase { A, B };

struct BoundVerdict {
    int bound = 0;
    StrongCase verdict = StrongCase::A;
    int n0 = 0;                // set for case B
    bool claim_holds = true;   // A(j(n0)) inside {n : |z_n^*(x)| > biorth_tol}
};

struct StrongnessReport {
    std::vector<BoundVerdict> bounds;
    double residual = 0.0;  // dist(x, span{z_n : n <= N, |z_n^*(x)| > biorth_tol})
    int truncation = 0;
};

/// Per-bound case analysis for a unit x against a flattened perturbation
/// built over `trace`. `eps` is indexed by j (eps[j-1] = eps_j). Only the
/// first `truncation` z_n enter the residual (0 means all).
StrongnessReport strongness_diagnostic(const Vector& x, const System& zsys, const System& xsys,
                                       const StrongPartitionTrace& trace, const std::vector<double>& eps, int truncation = 0);

}  // namespace mbasis
