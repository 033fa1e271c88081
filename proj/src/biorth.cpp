#include "mbasis/biorth.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace mbasis {

Matrix select_columns(const Matrix& m, const std::vector<int>& indices) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int k = indices[i];
        if (k < 1 || k > m.cols()) throw Error("index " + std::to_string(k) + " out of range");
        out.col(static_cast<Eigen::Index>(i)) = m.col(k - 1);
    }
    return out;
}

Matrix column_range(const Matrix& m, int first, int last) {
    if (last < first) return Matrix(m.rows(), 0);
    if (first < 1 || last > m.cols()) throw Error("column range out of bounds");
    return m.middleCols(first - 1, last - first + 1);
}

double uniform_minimality_constant(const System& sys) {
    const Eigen::Index n = sys.size();
    if (n < 2) throw Error("uniform_minimality_constant: need at least 2 vectors");
    double best = 1.0;
    Matrix others(sys.ambient_dim(), n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != k) others.col(c++) = sys.xs().col(j);
        const Vector u = sys.xs().col(k).normalized();
        best = std::min(best, distance_to_span(u, others, sys.tol().rank_tol));
    }
    return best;
}

double norming_constant_estimate(const System& sys, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw Error("norming_constant_estimate: zero samples");
    const Matrix QF = orthonormal_basis(sys.fs(), sys.tol().rank_tol);
    if (QF.cols() == 0) throw Error("norming_constant_estimate: functional span is zero");
    const Matrix QX = orthonormal_basis(sys.xs(), sys.tol().rank_tol);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double best = 1.0;
    Vector g(QF.cols());
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gauss(rng);
        const Vector f = QF * g.normalized();
        // sup over unit x in span(xs) of <f, x> is the norm of the projection
        const double v = QX.cols() == 0 ? 0.0 : (QX.transpose() * f).norm();
        best = std::min(best, v);
    }
    return best;
}

double norming_constant_exact(const System& sys) {
    const Matrix QF = orthonormal_basis(sys.fs(), sys.tol().rank_tol);
    const Matrix QX = orthonormal_basis(sys.xs(), sys.tol().rank_tol);
    if (QF.cols() == 0) throw Error("norming_constant_exact: functional span is zero");
    if (QX.cols() == 0) return 0.0;
    const Matrix C = QX.transpose() * QF;  // columns: projections of the F basis
    Eigen::JacobiSVD<Matrix> svd(C);
    if (QF.cols() > QX.cols()) return 0.0;
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// ---------------------------------------------------------------------------

void IntervalFamily::validate() const {
    for (const auto& iv : intervals)
        if (iv.first < 1 || iv.last < iv.first) throw Error("interval family: malformed interval");
    if (kind == IntervalKind::block) {
        int next = 1;
        for (const auto& iv : intervals) {
            if (iv.first != next) throw Error("block family: intervals must be successive from 1");
            next = iv.last + 1;
        }
    } else {
        int prev = 0;
        for (const auto& iv : intervals) {
            if (iv.first != 1) throw Error("pile family: every left bound must be 1");
            if (iv.last <= prev) throw Error("pile family: right bounds must strictly increase");
            prev = iv.last;
        }
    }
}

bool IntervalFamily::covers(int n) const {
    if (kind != IntervalKind::block) return false;
    try {
        validate();
    } catch (const Error&) {
        return false;
    }
    return !intervals.empty() && intervals.back().last == n;
}

// ---------------------------------------------------------------------------

namespace {

// For each column of `vs`, the least q such that the column lies within
// tol * |column| of the span of the first q columns of `prefix`. Returns -1
// where no prefix suffices.
std::vector<int> least_prefix(const Matrix& vs, const Matrix& prefix, double tol) {
    if (vs.rows() != prefix.rows()) throw Error("spanning_indices: ambient dimension mismatch");
    Matrix P = prefix;
    for (Eigen::Index k = 0; k < P.cols(); ++k) {
        const double nrm = P.col(k).norm();
        if (nrm > 0) P.col(k) /= nrm;
    }
    Eigen::HouseholderQR<Matrix> qr(P);
    const Eigen::Index K = std::min(P.rows(), P.cols());
    const Matrix Q = qr.householderQ() * Matrix::Identity(P.rows(), K);
    std::vector<int> out(static_cast<std::size_t>(vs.cols()), -1);
    for (Eigen::Index n = 0; n < vs.cols(); ++n) {
        const Vector v = vs.col(n);
        const double vn = v.norm();
        const Vector c = Q.transpose() * v;
        const double outside2 = std::max(0.0, (v - Q * c).squaredNorm());
        // tail(q)^2 = outside^2 + sum_{i >= q} c_i^2 ; scan q downwards
        double tail2 = outside2;
        const double limit = tol * vn;
        if (std::sqrt(tail2) > limit) continue;
        Eigen::Index q = K;
        while (q > 0 && std::sqrt(tail2 + c(q - 1) * c(q - 1)) <= limit) {
            tail2 += c(q - 1) * c(q - 1);
            --q;
        }
        out[static_cast<std::size_t>(n)] = static_cast<int>(q);
    }
    return out;
}

}  // namespace

std::vector<int> spanning_indices(const Matrix& zs, const Matrix& zstars, const Matrix& x_prefix,
                                  const Matrix& f_prefix, double tol) {
    if (zs.cols() != zstars.cols()) throw Error("spanning_indices: vector/functional count mismatch");
    const auto qv = least_prefix(zs, x_prefix, tol);
    const auto qf = least_prefix(zstars, f_prefix, tol);
    std::vector<int> q(qv.size());
    int running = 0;
    for (std::size_t n = 0; n < qv.size(); ++n) {
        if (qv[n] < 0 || qf[n] < 0)
            throw Error("spanning_indices: no prefix of the reference system spans element m=" +
                        std::to_string(n + 1));
        running = std::max({running, qv[n], qf[n]});
        if (running < static_cast<int>(n + 1))
            throw Error("spanning_indices: q(m) < m at m=" + std::to_string(n + 1) +
                        " (spanned system is linearly dependent)");
        q[n] = running;
    }
    return q;
}

std::vector<int> spanning_indices(const System& zsys, const System& xsys, double tol) {
    return spanning_indices(zsys.xs(), zsys.fs(), xsys.xs(), xsys.fs(), tol);
}

// ---------------------------------------------------------------------------

namespace {

bool interval_spans_agree(const System& z, const System& x, int first, int last, double tol) {
    const double rt = x.tol().rank_tol;
    return subspace_gap(column_range(z.xs(), first, last), column_range(x.xs(), first, last), rt) <= tol &&
           subspace_gap(column_range(z.fs(), first, last), column_range(x.fs(), first, last), rt) <= tol;
}

// Support rows [lo, hi] (0-based) of each coefficient column, relative cutoff.
std::vector<std::pair<int, int>> coefficient_support(const Matrix& C, double tol) {
    std::vector<std::pair<int, int>> out;
    for (Eigen::Index n = 0; n < C.cols(); ++n) {
        const double cut = tol * C.col(n).norm();
        int lo = static_cast<int>(C.rows()), hi = -1;
        for (Eigen::Index k = 0; k < C.rows(); ++k)
            if (std::abs(C(k, n)) > cut) {
                lo = std::min(lo, static_cast<int>(k));
                hi = std::max(hi, static_cast<int>(k));
            }
        out.emplace_back(lo, hi);
    }
    return out;
}

}  // namespace

Classification classify_perturbation(const System& zsys, const System& xsys, double tol) {
    if (zsys.size() != xsys.size()) throw Error("classify_perturbation: systems differ in length");
    if (zsys.ambient_dim() != xsys.ambient_dim()) throw Error("classify_perturbation: ambient mismatch");
    const int N = static_cast<int>(xsys.size());
    Classification out;
    out.piles.kind = IntervalKind::pile;
    out.blocks.kind = IntervalKind::block;

    const double rt = xsys.tol().rank_tol;
    for (int m = 1; m <= N; ++m) {
        if (subspace_gap(column_range(zsys.xs(), 1, m), column_range(xsys.xs(), 1, m), rt) <= tol &&
            subspace_gap(column_range(zsys.fs(), 1, m), column_range(xsys.fs(), 1, m), rt) <= tol)
            out.piles.intervals.push_back({1, m});
    }

    // Greedy left-to-right block search. When xsys is a complete system of the
    // truncation, z_n = sum_k <f_k, z_n> x_k and z_n^* = sum_k <z_n^*, x_k> f_k,
    // so the coefficient supports give the earliest candidate boundary, which
    // is then confirmed by a direct span comparison.
    const bool complete = xsys.size() == xsys.ambient_dim() &&
                          numerical_rank(xsys.xs(), rt) == xsys.size() &&
                          biorthogonality_defect(xsys) <= xsys.tol().biorth_tol;
    std::vector<std::pair<int, int>> sv, sf;
    if (complete) {
        sv = coefficient_support(xsys.fs().transpose() * zsys.xs(), tol);
        sf = coefficient_support(xsys.xs().transpose() * zsys.fs(), tol);
    }

    bool block_ok = true;
    int s = 1;
    while (s <= N && block_ok) {
        int closed = -1;
        if (complete) {
            int e = s;
            bool bad = false;
            for (int n = s; n <= e && !bad; ++n) {
                const auto& a = sv[static_cast<std::size_t>(n - 1)];
                const auto& b = sf[static_cast<std::size_t>(n - 1)];
                if (a.second < 0 || b.second < 0 || std::min(a.first, b.first) + 1 < s) bad = true;
                e = std::max({e, a.second + 1, b.second + 1});
            }
            if (!bad && e <= N && interval_spans_agree(zsys, xsys, s, e, tol)) closed = e;
        } else {
            for (int e = s; e <= N && closed < 0; ++e)
                if (interval_spans_agree(zsys, xsys, s, e, tol)) closed = e;
        }
        if (closed < 0) {
            block_ok = false;
        } else {
            out.blocks.intervals.push_back({s, closed});
            s = closed + 1;
        }
    }

    if (block_ok && N > 0) {
        out.kind = PerturbationKind::block;
        // every block right end is a prefix on which both spans agree
        for (const auto& iv : out.blocks.intervals) {
            const bool present = std::any_of(out.piles.intervals.begin(), out.piles.intervals.end(),
                                             [&](const Interval& p) { return p.last == iv.last; });
            if (!present) throw Error("classify_perturbation: block verdict without pile prefix (internal)");
        }
    } else if (!out.piles.intervals.empty()) {
        out.kind = PerturbationKind::pile;
        out.blocks.intervals.clear();
    } else {
        out.kind = PerturbationKind::neither;
        out.blocks.intervals.clear();
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Matrix complement_in_total(const Matrix& xs, const Interval& keep, double rank_tol) {
    const Matrix Qt = orthonormal_basis(xs, rank_tol);
    std::vector<int> others;
    for (int k = 1; k <= xs.cols(); ++k)
        if (k < keep.first || k > keep.last) others.push_back(k);
    const Matrix Qo = orthonormal_basis(select_columns(xs, others), rank_tol);
    const Matrix R = Qo.cols() == 0 ? Qt : Matrix(Qt - Qo * (Qo.transpose() * Qt));
    return orthonormal_basis(R, 1e-6);
}

}  // namespace

bool block_duality_check(const System& zsys, const System& xsys, const IntervalFamily& intervals) {
    if (!intervals.covers(static_cast<int>(xsys.size())) || zsys.size() != xsys.size())
        throw Error("block_duality_check: intervals do not cover both systems");
    const double tol = xsys.tol().span_tol;
    const double rt = xsys.tol().rank_tol;
    for (const auto& iv : intervals.intervals) {
        const Matrix zx = column_range(zsys.xs(), iv.first, iv.last);
        const Matrix xx = column_range(xsys.xs(), iv.first, iv.last);
        if (subspace_gap(zx, xx, rt) > tol) return false;
        const Matrix wx = complement_in_total(xsys.xs(), iv, rt);
        const Matrix wz = complement_in_total(zsys.xs(), iv, rt);
        if (orthonormal_gap(wx, wz) > tol) return false;
        const Matrix fz = column_range(zsys.fs(), iv.first, iv.last);
        const Matrix fx = column_range(xsys.fs(), iv.first, iv.last);
        if (subspace_gap(fz, fx, rt) > tol) return false;
    }
    return true;
}

double intersection_defect(const System& sys, const std::vector<int>& A, const std::vector<int>& B) {
    const double rt = sys.tol().rank_tol;
    const Matrix QA = orthonormal_basis(select_columns(sys.xs(), A), rt);
    const Matrix QB = orthonormal_basis(select_columns(sys.xs(), B), rt);
    std::set<int> sa(A.begin(), A.end());
    std::vector<int> common;
    for (int b : std::set<int>(B.begin(), B.end()))
        if (sa.count(b)) common.push_back(b);
    const Matrix QC = orthonormal_basis(select_columns(sys.xs(), common), rt);

    Matrix inter(sys.ambient_dim(), 0);
    if (QA.cols() > 0 && QB.cols() > 0) {
        Eigen::JacobiSVD<Matrix> svd(QA.transpose() * QB, Eigen::ComputeThinU);
        const double max_sine = std::sqrt(sys.tol().span_tol);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            const double c = std::min(1.0, svd.singularValues()(i));
            if (std::sqrt(std::max(0.0, 1.0 - c * c)) <= max_sine) keep.push_back(i);
        }
        inter.resize(sys.ambient_dim(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i)
            inter.col(static_cast<Eigen::Index>(i)) = QA * svd.matrixU().col(keep[i]);
    }
    return orthonormal_gap(orthonormal_basis(inter, rt), QC);
}

}  // namespace mbasis
