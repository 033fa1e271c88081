#include "mbasis/perturbations.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace mbasis {

double BlockPartition::epsilon_sum() const {
    return std::accumulate(epsilons.begin(), epsilons.end(), 0.0);
}

PartitionReport validate_block_partition(const BlockPartition& p, int range_end) {
    PartitionReport r;
    r.witness.kind = IntervalKind::block;
    r.epsilon_sum = p.epsilon_sum();
    if (p.anchors.size() != p.blocks.size() || p.epsilons.size() != p.blocks.size()) {
        r.anchors_valid = false;
        r.failures.push_back("anchor/epsilon count differs from block count");
    }
    std::set<int> seen;
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        const auto& b = p.blocks[j];
        if (b.empty()) {
            r.anchors_valid = false;
            r.failures.push_back("A(" + std::to_string(j + 1) + ") is empty");
        }
        for (int k : b) {
            if (k < 1) {
                r.covers = false;
                r.failures.push_back("non-positive index in A(" + std::to_string(j + 1) + ")");
            }
            if (!seen.insert(k).second) {
                r.disjoint = false;
                r.failures.push_back("index " + std::to_string(k) + " appears in more than one block");
            }
        }
        if (j < p.anchors.size() && std::find(b.begin(), b.end(), p.anchors[j]) == b.end()) {
            r.anchors_valid = false;
            r.failures.push_back("n(" + std::to_string(j + 1) + ") not in A(" + std::to_string(j + 1) + ")");
        }
        if (j < p.epsilons.size() && !(p.epsilons[j] > 0)) {
            r.anchors_valid = false;
            r.failures.push_back("eps_" + std::to_string(j + 1) + " not positive");
        }
    }
    const bool exact_cover = static_cast<int>(seen.size()) == range_end &&
                             (seen.empty() || (*seen.begin() == 1 && *seen.rbegin() == range_end));
    if (!exact_cover) {
        r.covers = false;
        r.failures.push_back("union of blocks is not {1.." + std::to_string(range_end) + "}");
    }

    // Earliest-closing grouping: if any witness exists, closing a group as soon
    // as its union is the next run of integers also yields one.
    if (r.disjoint) {
        int prev_end = 0;
        int start = 0;
        std::set<int> acc;
        bool ok = true;
        for (std::size_t j = 0; j < p.blocks.size(); ++j) {
            acc.insert(p.blocks[j].begin(), p.blocks[j].end());
            if (!acc.empty() && *acc.begin() == prev_end + 1 &&
                *acc.rbegin() == prev_end + static_cast<int>(acc.size())) {
                r.witness.intervals.push_back({start + 1, static_cast<int>(j) + 1});
                prev_end = *acc.rbegin();
                r.block_ends.push_back(prev_end);
                acc.clear();
                start = static_cast<int>(j) + 1;
            }
        }
        if (!acc.empty()) ok = false;
        r.block_kind = ok && !p.blocks.empty();
        if (!r.block_kind) {
            r.witness.intervals.clear();
            r.block_ends.clear();
        }
    }
    return r;
}

BlockPartition singleton_partition(int n, double eps0) {
    BlockPartition p;
    for (int j = 1; j <= n; ++j) {
        p.blocks.push_back({j});
        p.anchors.push_back(j);
        p.epsilons.push_back(eps0 * std::ldexp(1.0, -j));
    }
    return p;
}

BlockPartition extend_with_singletons(BlockPartition p, int n) {
    std::set<int> covered;
    for (const auto& b : p.blocks) covered.insert(b.begin(), b.end());
    double eps = p.epsilons.empty() ? 1.0 : p.epsilons.back();
    for (int k = 1; k <= n; ++k) {
        if (covered.count(k)) continue;
        eps *= 0.5;
        p.blocks.push_back({k});
        p.anchors.push_back(k);
        p.epsilons.push_back(eps);
    }
    return p;
}

namespace {

void require_cover(const BlockPartition& p, int n) {
    const auto rep = validate_block_partition(p, n);
    if (!rep.valid()) {
        std::string msg = "block partition invalid for 1.." + std::to_string(n);
        for (const auto& f : rep.failures) msg += "; " + f;
        throw Error(msg);
    }
}

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

System flatten_with_duals(const System& sys, const BlockPartition& p, const Matrix& zstars) {
    const int N = static_cast<int>(sys.size());
    require_cover(p, N);
    if (zstars.rows() != sys.ambient_dim() || zstars.cols() != sys.size())
        throw Error("flatten_with_duals: functional matrix has wrong shape");
    Matrix zs(sys.ambient_dim(), sys.size());
    for (const auto& block : p.blocks) {
        const auto members = sorted(block);
        const Matrix zb = select_columns(zstars, members);
        const Matrix xb = select_columns(sys.xs(), members);
        const Matrix sol = dual_solve(zb, xb, sys.tol());
        for (std::size_t i = 0; i < members.size(); ++i)
            zs.col(members[i] - 1) = sol.col(static_cast<Eigen::Index>(i));
    }
    return System(zs, zstars, sys.tol());
}

System construct_flattened(const System& sys, const BlockPartition& p, std::uint64_t seed) {
    const int N = static_cast<int>(sys.size());
    require_cover(p, N);
    const auto& tol = sys.tol();
    Matrix zs = sys.xs();
    Matrix zstars = sys.fs();

    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        const auto members = sorted(p.blocks[j]);
        if (members.size() == 1) continue;  // z = x, z* = f satisfies both conditions
        const int anchor = p.anchors[j];
        const Vector fa = sys.fs().col(anchor - 1);
        const double radius = 0.9 * p.epsilons[j] / sys.xs().col(anchor - 1).norm();

        const Matrix Qf = orthonormal_basis(select_columns(sys.fs(), members), tol.rank_tol);
        const Vector u = fa.normalized();
        const Matrix Qperp = orthonormal_basis(Matrix(Qf - u * (u.transpose() * Qf)), 1e-8);
        const auto k = static_cast<Eigen::Index>(members.size() - 1);
        if (Qperp.cols() != k)
            throw Error("construct_flattened: functionals of A(" + std::to_string(j + 1) +
                        ") are dependent; use a smaller block");

        std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(j + 1)};
        std::mt19937_64 rng(sseq);
        std::normal_distribution<double> gauss;

        double scale = 1.0;
        bool done = false;
        for (int attempt = 0; attempt < 8 && !done; ++attempt, scale *= 0.5) {
            Matrix G(k, k);
            for (Eigen::Index c = 0; c < k; ++c)
                for (Eigen::Index r = 0; r < k; ++r) G(r, c) = gauss(rng);
            Eigen::HouseholderQR<Matrix> qr(G);
            const Matrix O = qr.householderQ() * Matrix::Identity(k, k);
            const Matrix eta = Qperp * O;

            Matrix zb(sys.ambient_dim(), static_cast<Eigen::Index>(members.size()));
            Eigen::Index next = 0;
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (members[i] == anchor)
                    zb.col(static_cast<Eigen::Index>(i)) = fa;
                else
                    zb.col(static_cast<Eigen::Index>(i)) = fa + scale * radius * eta.col(next++);
            }
            try {
                const Matrix sol = dual_solve(zb, select_columns(sys.xs(), members), tol);
                for (std::size_t i = 0; i < members.size(); ++i) {
                    zs.col(members[i] - 1) = sol.col(static_cast<Eigen::Index>(i));
                    zstars.col(members[i] - 1) = zb.col(static_cast<Eigen::Index>(i));
                }
                done = true;
            } catch (const Error&) {
            }
        }
        if (!done)
            throw Error("construct_flattened: block cross-Gram singular for A(" + std::to_string(j + 1) +
                        ") after 8 draws; use a smaller block or larger eps_j");
    }
    System out(zs, zstars, tol);
    const double d = biorthogonality_defect(out);
    if (d > tol.biorth_tol)
        throw Error("construct_flattened: output biorthogonality defect " + std::to_string(d) +
                    " exceeds biorth_tol");
    return out;
}

FlattenReport verify_flattened(const System& zsys, const System& xsys, const BlockPartition& p) {
    FlattenReport rep;
    const auto& tol = xsys.tol();
    rep.defect = biorthogonality_defect(zsys);
    bool pass = zsys.size() == xsys.size() && rep.defect <= tol.biorth_tol &&
                validate_block_partition(p, static_cast<int>(xsys.size())).valid();
    if (!pass) {
        rep.pass = false;
        return rep;
    }
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        const auto members = sorted(p.blocks[j]);
        BlockCheck bc;
        bc.j = static_cast<int>(j + 1);
        bc.vector_gap = subspace_gap(select_columns(zsys.xs(), members),
                                     select_columns(xsys.xs(), members), tol.rank_tol);
        bc.dual_gap = subspace_gap(select_columns(zsys.fs(), members),
                                   select_columns(xsys.fs(), members), tol.rank_tol);
        const int a = p.anchors[j];
        const double bound = p.epsilons[j] / xsys.xs().col(a - 1).norm();
        double slack = bound;
        for (int n : members)
            slack = std::min(slack, bound - (zsys.fs().col(n - 1) - xsys.fs().col(a - 1)).norm());
        bc.anchor_slack = slack;
        // equality in (ii) is allowed; leave room for rounding of the norms
        if (bc.vector_gap > tol.span_tol || bc.dual_gap > tol.span_tol || slack < -1e-12 * (1.0 + bound))
            pass = false;
        rep.blocks.push_back(bc);
    }
    rep.pass = pass;
    return rep;
}

}  // namespace mbasis
