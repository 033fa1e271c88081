#include "mbasis/representing.hpp"

#include <algorithm>
#include <limits>

namespace mbasis {

int RepresentingIndices::at(int m) const {
    if (m == 0) return 0;
    if (m < 0 || m > depth()) throw Error("representing index r(" + std::to_string(m) + ") out of range");
    return r[static_cast<std::size_t>(m - 1)];
}

namespace {

// Orthonormal Q whose first k columns span the first k columns of `cols`
// (columns are assumed independent, as for any biorthogonal system).
Matrix nested_orthonormal(const Matrix& cols) {
    if (cols.cols() == 0) return Matrix(cols.rows(), 0);
    Matrix P = cols;
    for (Eigen::Index k = 0; k < P.cols(); ++k) P.col(k).normalize();
    Eigen::HouseholderQR<Matrix> qr(P);
    const Eigen::Index K = std::min(P.rows(), P.cols());
    return qr.householderQ() * Matrix::Identity(P.rows(), K);
}

double largest_singular(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular(const Matrix& m) {
    if (m.cols() == 0) return 1.0;
    if (m.rows() < m.cols()) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double step_delta(const System& sys, int m, int rm) {
    const double res = sys.tol().net_resolution;
    if (m == 0 || rm == 0) return res;
    double s = 0.0;
    for (int n = 0; n < rm; ++n) s += sys.fs().col(n).norm() * sys.xs().col(n).norm();
    return std::min(1.0 / (static_cast<double>(m) * s), res);
}

// Least p in (rm, N] for which the tail-distance excess over the unit sphere
// of span{x_1..x_rm} is at most delta. The excess for a given p equals the
// largest singular value of the rows of Q_tail^T Q_head beyond p - rm.
int least_distance_index(const System& sys, int rm, double delta) {
    const int N = static_cast<int>(sys.size());
    if (rm == 0) return 1;
    const Matrix QH = orthonormal_basis(sys.xs().leftCols(rm), sys.tol().rank_tol);
    const Matrix QT = nested_orthonormal(sys.xs().middleCols(rm, N - rm));
    const Matrix A = QT.transpose() * QH;
    for (int p = rm + 1; p <= N; ++p) {
        const Eigen::Index used = p - rm;
        if (largest_singular(A.bottomRows(A.rows() - used)) <= delta) return p;
    }
    return N;
}

}  // namespace

double tail_distance_excess(const System& sys, const Matrix& head, int from, int p) {
    const int N = static_cast<int>(sys.size());
    if (from < 1 || p < from - 1 || p > N) throw Error("tail_distance_excess: index out of range");
    const Matrix QH = orthonormal_basis(head, sys.tol().rank_tol);
    const Matrix QN = orthonormal_basis(column_range(sys.xs(), from, N), sys.tol().rank_tol);
    const Matrix Qp = orthonormal_basis(column_range(sys.xs(), from, p), sys.tol().rank_tol);
    const Matrix a = QN.transpose() * QH;
    const Matrix b = Qp.transpose() * QH;
    Matrix M = a.transpose() * a - b.transpose() * b;
    M = 0.5 * (M + M.transpose());
    if (M.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double norming_margin(const System& sys, int p, int r) {
    const Matrix QV = orthonormal_basis(sys.xs().leftCols(p), sys.tol().rank_tol);
    const Matrix QF = orthonormal_basis(sys.fs().leftCols(r), sys.tol().rank_tol);
    return smallest_singular(QF.transpose() * QV);
}

RepresentingIndices build_representing_indices(const System& sys, int depth) {
    if (depth < 1) throw Error("build_representing_indices: depth must be >= 1");
    const int N = static_cast<int>(sys.size());
    RepresentingIndices out;
    out.truncation = N;
    out.r.push_back(1);
    out.interim_p.push_back(1);
    out.deltas.push_back(step_delta(sys, 1, 1));
    for (int m = 1; m < depth; ++m) {
        const int rm = out.r.back();
        if (rm >= N)
            throw Error("build_representing_indices: truncation " + std::to_string(N) +
                        " exhausted; reachable depth is " + std::to_string(m));
        const double delta = out.deltas.back();
        const int p = least_distance_index(sys, rm, delta);
        out.r.push_back(p);
        out.interim_p.push_back(p);
        out.deltas.push_back(step_delta(sys, m + 1, p));
    }
    return out;
}

RepresentingIndices build_norming_indices(const System& sys, int depth, double c) {
    if (depth < 1) throw Error("build_norming_indices: depth must be >= 1");
    if (!(c > 0)) throw Error("build_norming_indices: c must be positive");
    const double norming = norming_constant_exact(sys);
    if (c > norming / 2.0 + 1e-15)
        throw Error("build_norming_indices: c = " + std::to_string(c) +
                    " exceeds half the norming constant " + std::to_string(norming));
    const int N = static_cast<int>(sys.size());
    const Matrix QF = nested_orthonormal(sys.fs());

    RepresentingIndices out;
    out.truncation = N;
    out.norming_c = c;
    int rm = 0;
    for (int m = 0; m < depth; ++m) {
        if (rm >= N)
            throw Error("build_norming_indices: truncation " + std::to_string(N) +
                        " exhausted; reachable depth is " + std::to_string(m));
        const double delta = step_delta(sys, m, rm);
        const int p = least_distance_index(sys, rm, delta);
        const Matrix QV = orthonormal_basis(sys.xs().leftCols(p), sys.tol().rank_tol);
        const Matrix B = QF.transpose() * QV;
        int r = -1;
        for (int cand = p; cand <= N && r < 0; ++cand)
            if (smallest_singular(B.topRows(std::min<Eigen::Index>(cand, B.rows()))) >= c) r = cand;
        if (r < 0)
            throw Error("build_norming_indices: norming property with c = " + std::to_string(c) +
                        " unattainable within truncation " + std::to_string(N));
        out.r.push_back(r);
        out.interim_p.push_back(p);
        out.deltas.push_back(delta);
        rm = r;
    }
    return out;
}

Reconstruction reconstruct(const Vector& x, const System& sys, const RepresentingIndices& r, int m) {
    if (m < 0 || m + 1 > r.depth()) throw Error("reconstruct: m out of range");
    if (x.size() != sys.ambient_dim()) throw Error("reconstruct: dimension mismatch");
    const int head = r.at(m);
    const int next = r.at(m + 1);
    Vector partial = Vector::Zero(x.size());
    if (head > 0) partial = sys.xs().leftCols(head) * (sys.fs().leftCols(head).transpose() * x);
    const auto pr = project(Vector(x - partial), column_range(sys.xs(), head + 1, next), sys.tol().rank_tol);
    Reconstruction out;
    out.v = pr.projection;
    out.approx = partial + pr.projection;
    out.error = (x - out.approx).norm();
    return out;
}

SubseriesTrace subseries_reconstruct(const Vector& x, const System& sys, const RepresentingIndices& r,
                                     const std::vector<int>& mks) {
    for (std::size_t k = 0; k < mks.size(); ++k) {
        if (mks[k] < 1 || mks[k] + 1 > r.depth() || (k > 0 && mks[k] <= mks[k - 1]))
            throw Error("subseries_reconstruct: malformed index sequence m_k");
    }
    const Vector a = sys.fs().transpose() * x;
    SubseriesTrace t;
    for (int mk : mks) {
        const int bound = r.at(mk);
        const int wend = r.at(mk + 1);
        const Vector partial = sys.xs().leftCols(bound) * a.head(bound);
        const Vector window = column_range(sys.xs(), bound + 1, wend) * a.segment(bound, wend - bound);
        t.bounds.push_back(bound);
        t.residual.push_back((x - partial).norm());
        t.window_mass.push_back(window.norm());
        t.skipped_mass += window.norm();
    }
    return t;
}

// ---------------------------------------------------------------------------

int StrongPartitionTrace::r_at(int m) const {
    if (m == 0) return 0;
    if (m < 0 || m > static_cast<int>(r.size())) throw Error("r index out of range");
    return r[static_cast<std::size_t>(m - 1)];
}

std::vector<int> StrongPartitionTrace::anchor_windows() const {
    std::vector<int> out;
    std::vector<int> levels{0};
    levels.insert(levels.end(), bound_levels.begin(), bound_levels.end());
    for (int lvl : levels) {
        if (lvl + 1 > static_cast<int>(r.size())) break;
        if (std::none_of(partition.anchors.begin(), partition.anchors.end(),
                         [&](int a) { return a == r_at(lvl) + 1; }))
            break;
        for (int n = r_at(lvl) + 1; n <= r_at(lvl + 1); ++n) out.push_back(n);
    }
    return out;
}

namespace {

struct BlockStep {
    bool ok;
    int needed;  // r-length required when !ok
};

BlockStep block_feasible(int depth, const std::vector<int>& r, int m) {
    auto rat = [&](int k) { return k == 0 ? 0 : r[static_cast<std::size_t>(k - 1)]; };
    if (m + 1 > depth) return {false, m + 1};
    const int dmax = m + rat(m + 1) - rat(m);
    if (dmax + 1 > depth) return {false, dmax + 1};
    return {true, 0};
}

}  // namespace

int max_strong_blocks(const RepresentingIndices& r) {
    int m = 0, count = 0;
    for (;;) {
        if (!block_feasible(r.depth(), r.r, m).ok) return count;
        m = m + r.at(m + 1) - r.at(m) + 1;
        ++count;
    }
}

StrongPartitionTrace strong_partition(const RepresentingIndices& r, int blocks, double eps0) {
    if (blocks < 1) throw Error("strong_partition: need at least one block");
    StrongPartitionTrace t;
    t.r = r.r;
    int m = 0;
    int j0 = 0;
    for (int b = 0; b < blocks; ++b) {
        const auto step = block_feasible(r.depth(), r.r, m);
        if (!step.ok)
            throw Error("strong_partition: representing indices exhausted in block " + std::to_string(b + 1) +
                        "; need r of length " + std::to_string(step.needed));
        const int lo = r.at(m), hi = r.at(m + 1);
        for (int j = lo + 1; j <= hi; ++j) {
            const int d = m + j - lo;
            std::vector<int> E{j};
            for (int k = r.at(d) + 1; k <= r.at(d + 1); ++k) E.push_back(k);
            const int idx = j0 + j - lo;  // 1-based position in the partition
            if (static_cast<int>(t.partition.blocks.size()) != idx - 1)
                throw Error("strong_partition: internal indexing error");
            t.partition.blocks.push_back(std::move(E));
            t.partition.anchors.push_back(j);
            t.partition.epsilons.push_back(eps0 * std::ldexp(1.0, -idx));
            t.d_map[j] = d;
            t.j_of_n[j] = idx;
        }
        j0 += hi - lo;
        m = m + hi - lo + 1;
        t.bound_levels.push_back(m);
        t.block_bounds.push_back(r.at(m));
    }
    return t;
}

StrongnessReport strongness_diagnostic(const Vector& x, const System& zsys, const System& xsys,
                                       const StrongPartitionTrace& trace, const std::vector<double>& eps,
                                       int truncation) {
    const int N = static_cast<int>(xsys.size());
    if (x.size() != xsys.ambient_dim()) throw Error("strongness_diagnostic: dimension mismatch");
    const double tol = xsys.tol().biorth_tol;
    const Vector ax = xsys.fs().transpose() * x;
    const Vector az = zsys.fs().transpose() * x;
    auto eps_of = [&](int j) {
        if (j < 1 || j > static_cast<int>(eps.size())) throw Error("strongness_diagnostic: eps too short");
        return eps[static_cast<std::size_t>(j - 1)];
    };

    StrongnessReport rep;
    rep.truncation = truncation > 0 ? std::min(truncation, N) : N;
    for (int lvl : trace.bound_levels) {
        if (lvl + 1 > static_cast<int>(trace.r.size())) break;
        const int lo = trace.r_at(lvl) + 1, hi = trace.r_at(lvl + 1);
        if (!trace.j_of_n.count(lo)) break;  // no block was built after this bound
        BoundVerdict v;
        v.bound = trace.r_at(lvl);
        for (int n = hi; n >= lo; --n) {
            const double coef = std::abs(ax(n - 1)) * xsys.xs().col(n - 1).norm();
            if (coef > eps_of(trace.j_of_n.at(n))) {
                v.verdict = StrongCase::B;
                v.n0 = n;
                break;
            }
        }
        if (v.verdict == StrongCase::B) {
            const auto& members = trace.partition.blocks[static_cast<std::size_t>(trace.j_of_n.at(v.n0) - 1)];
            v.claim_holds = std::all_of(members.begin(), members.end(),
                                        [&](int n) { return n <= N && std::abs(az(n - 1)) > tol; });
        }
        rep.bounds.push_back(v);
    }

    std::vector<int> support;
    for (int n = 1; n <= rep.truncation; ++n)
        if (std::abs(az(n - 1)) > tol) support.push_back(n);
    rep.residual = distance_to_span(x, select_columns(zsys.xs(), support), xsys.tol().rank_tol);
    return rep;
}

}  // namespace mbasis
