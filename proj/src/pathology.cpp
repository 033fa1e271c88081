#include "mbasis/pathology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbasis/systems.hpp"

namespace mbasis {

namespace {

Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i] - 1);
    return out;
}

}  // namespace

std::vector<double> geometric_eps(int n, double scale) {
    std::vector<double> e(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 1; i <= n; ++i) e[static_cast<std::size_t>(i - 1)] = scale * std::ldexp(1.0, -i);
    return e;
}

double eps_tail_sum(const std::vector<double>& eps) {
    double s = 0.0;
    for (double e : eps) s += e * e;
    return s;
}

void require_eps_tail(const std::vector<double>& eps) {
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] >= 0) || !std::isfinite(eps[i]))
            throw Error("eps_" + std::to_string(i + 1) + " must be finite and non-negative", "tail-eps");
    const double s = eps_tail_sum(eps);
    if (s > 0.125)
        throw Error("eps sequence violates the tail condition sum_{i>n} eps_i^2 <= 1/8 (sum = " + std::to_string(s) +
                        ")",
                    "tail-eps");
}

Matrix PathologicalSystem::pi_generators() const {
    Matrix g = Matrix::Zero(xs.rows(), xs.cols());
    for (int n = 0; n < size(); ++n) g(pi[static_cast<std::size_t>(n)] - 1, n) = 1.0;
    return g;
}

System PathologicalSystem::to_double(ToleranceConfig tol) const {
    return System(xs.cast<double>(), fs.cast<double>(), tol);
}

PathologicalSystem build_pathological_system(const std::vector<int>& pi, const std::vector<double>& eps, int M,
                                             int ambient, ToleranceConfig tol) {
    if (M < 1) throw Error("build_pathological_system: M must be >= 1");
    if (ambient < M) throw Error("build_pathological_system: ambient dimension below M", "ambient");
    if (static_cast<int>(pi.size()) < M || static_cast<int>(eps.size()) < M)
        throw Error("build_pathological_system: pi and eps must cover 1..M");
    require_eps_tail(eps);
    std::vector<char> seen(static_cast<std::size_t>(ambient) + 1, 0);
    for (int n = 0; n < M; ++n) {
        const int v = pi[static_cast<std::size_t>(n)];
        if (v < 1 || v > ambient)
            throw Error("build_pathological_system: pi(" + std::to_string(n + 1) + ") = " + std::to_string(v) +
                            " outside the ambient dimension " + std::to_string(ambient) +
                            "; use a larger ambient or a finite section of pi",
                        "ambient");
        if (seen[static_cast<std::size_t>(v)]++) throw Error("build_pathological_system: pi not injective");
    }

    const Eigen::Index D = ambient;
    PathologicalSystem out;
    out.pi.assign(pi.begin(), pi.begin() + M);
    out.eps.assign(eps.begin(), eps.end());
    out.xs = MatrixHP::Zero(D, M);
    out.fs = MatrixHP::Zero(D, M);
    out.deltas = Matrix::Zero(D, M);
    out.e_hats = Matrix::Zero(D, M);

    for (Eigen::Index n = 0; n < M; ++n) {
        const Eigen::Index p = pi[static_cast<std::size_t>(n)] - 1;
        VectorHP f = VectorHP::Zero(D);
        f(p) = 1;
        if (n > 0) f -= out.fs.leftCols(n) * out.xs.row(p).head(n).transpose();
        f /= f.norm();

        const Vector fd = f.cast<double>();
        const double sign = fd(n) < 0 ? -1.0 : 1.0;
        const Vector d = (0.9 * eps[static_cast<std::size_t>(n)] * sign) * fd;
        out.deltas.col(n) = d;
        out.e_hats.col(n) = unit_vector(D, n) + d;

        VectorHP ehp = d.cast<HighPrecision>();
        ehp(n) += 1;
        const VectorHP c = out.fs.leftCols(n).transpose() * ehp;
        const HighPrecision cn = f.dot(ehp);
        if (cn == 0)
            throw Error("build_pathological_system: induction stuck at n = " + std::to_string(n + 1) +
                            " (f_n vanishes on e_hat_n); use a larger eps_n or a larger ambient",
                        "prop-xn");
        VectorHP x = ehp;
        if (n > 0) x -= out.xs.leftCols(n) * c;
        x /= cn;
        out.xs.col(n) = x;
        out.fs.col(n) = f;
    }

    // postconditions
    PathologyChecks& ck = out.checks;
    {
        MatrixHP G = out.fs.transpose() * out.xs;
        HighPrecision worst = 0;
        for (Eigen::Index k = 0; k < M; ++k)
            for (Eigen::Index n = 0; n < M; ++n) {
                HighPrecision d = abs(G(k, n) - (k == n ? HighPrecision(1) : HighPrecision(0)));
                if (d > worst) worst = d;
            }
        ck.defect = static_cast<double>(worst);
    }
    {
        const Matrix Q = gram_schmidt_system(out.e_hats, tol).xs();
        double worst = 0.0, hat = std::numeric_limits<double>::infinity(), xmax = 0.0;
        for (Eigen::Index n = 0; n < M; ++n) {
            const VectorHP& xh = out.xs.col(n);
            const HighPrecision nrm = xh.norm();
            xmax = std::max(xmax, static_cast<double>(nrm));
            const Vector x = (xh / nrm).cast<double>();
            const Vector res = x - Q.leftCols(n + 1) * (Q.leftCols(n + 1).transpose() * x);
            worst = std::max(worst, res.norm());
            hat = std::min(hat, eps[static_cast<std::size_t>(n)] - out.deltas.col(n).norm());
        }
        ck.vector_span_residual = worst;
        ck.hat_slack = hat;
        ck.max_x_norm = xmax;
    }
    {
        std::vector<char> in(static_cast<std::size_t>(D), 0);
        for (Eigen::Index n = 0; n < M && ck.dual_support; ++n) {
            in[static_cast<std::size_t>(pi[static_cast<std::size_t>(n)] - 1)] = 1;
            if (out.fs(pi[static_cast<std::size_t>(n)] - 1, n) == 0) ck.dual_support = false;
            for (Eigen::Index i = 0; i < D; ++i)
                if (!in[static_cast<std::size_t>(i)] && out.fs(i, n) != 0) ck.dual_support = false;
        }
    }
    ck.pass = ck.defect <= tol.biorth_tol && ck.vector_span_residual <= tol.span_tol && ck.dual_support &&
              ck.hat_slack >= 0.0;
    if (!ck.pass) {
        std::ostringstream os;
        os << "build_pathological_system: postcondition failed (defect " << ck.defect << ", span residual "
           << ck.vector_span_residual << ", dual support " << (ck.dual_support ? "ok" : "broken") << ", eps slack "
           << ck.hat_slack << ")";
        throw Error(os.str(), "prop-xn");
    }
    return out;
}

TOperator operator_T(const Matrix& e_hats, int ambient) {
    const Eigen::Index D = ambient, M = e_hats.cols();
    if (e_hats.rows() != D) throw Error("operator_T: e_hat vectors do not live in the ambient dimension");
    if (M > D) throw Error("operator_T: more vectors than the ambient dimension");
    Eigen::HouseholderQR<Matrix> qr(e_hats);
    const Matrix Qfull = qr.householderQ();
    Matrix B(D, D), Img(D, D);
    B.leftCols(M) = e_hats;
    Img.leftCols(M) = Matrix::Identity(D, M);
    B.rightCols(D - M) = Qfull.rightCols(D - M);
    Img.rightCols(D - M) = Qfull.rightCols(D - M);
    // T B = Img  <=>  B^T T^T = Img^T
    Eigen::FullPivLU<Matrix> lu(B.transpose());
    if (!lu.isInvertible()) throw Error("operator_T: e_hat vectors are linearly dependent");
    TOperator t;
    t.T = lu.solve(Img.transpose()).transpose();
    Eigen::BDCSVD<Matrix> svd(t.T);
    const auto& s = svd.singularValues();
    t.norm = s(0);
    t.norm_inv = 1.0 / s(s.size() - 1);
    return t;
}

DecayTable t_asymptotics_check(const Matrix& T, const Matrix& zs, const std::vector<double>& eps) {
    const Eigen::Index D = zs.rows();
    if (T.rows() != D || T.cols() != D) throw Error("t_asymptotics_check: operator shape mismatch");
    std::vector<double> tail(static_cast<std::size_t>(D) + 1, 0.0);  // tail[k] = sum_{k < i <= D} eps_i^2
    for (Eigen::Index k = D - 1; k >= 0; --k) {
        const double e = static_cast<std::size_t>(k) < eps.size() ? eps[static_cast<std::size_t>(k)] : 0.0;
        tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k) + 1] + e * e;
    }
    const Matrix diff = T * zs - zs;
    DecayTable out;
    for (Eigen::Index n = 0; n < zs.cols(); ++n) {
        DecayRow row;
        row.n = static_cast<int>(n + 1);
        row.measured = diff.col(n).norm();
        double head = 0.0;
        row.bound = std::sqrt(tail[0]);
        row.k_star = 0;
        for (Eigen::Index k = 1; k <= D; ++k) {
            head += std::abs(zs(k - 1, n));
            const double b = head + std::sqrt(tail[static_cast<std::size_t>(k)]);
            if (b < row.bound) {
                row.bound = b;
                row.k_star = static_cast<int>(k);
            }
        }
        // rounding slack for the product T z
        if (row.measured > 2.0 * row.bound * (1.0 + 1e-12) + 1e-14) out.within_bound = false;
        out.rows.push_back(row);
    }
    return out;
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    if (window < 1) throw Error("moving_average: window must be >= 1");
    const int half = window / 2;
    const int n = static_cast<int>(v.size());
    std::vector<double> out(v.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) s += v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s / (hi - lo + 1);
    }
    return out;
}

int decay_threshold_index(const DecayTable& table, double M) {
    const double thr = 1.0 / (4.0 * M);
    int n0 = 0;
    for (const auto& r : table.rows)
        if (r.measured >= thr) n0 = r.n;
    return n0;
}

std::vector<int> omega_set(const std::vector<int>& pi, int r) {
    if (r < 0 || r > static_cast<int>(pi.size())) throw Error("omega_set: r outside the permutation");
    std::vector<char> hit(static_cast<std::size_t>(r) + 1, 0);
    for (int n = 0; n < r; ++n) {
        const int v = pi[static_cast<std::size_t>(n)];
        if (v >= 1 && v <= r) hit[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<int> out;
    for (int k = 1; k <= r; ++k)
        if (hit[static_cast<std::size_t>(k)]) out.push_back(k);
    return out;
}

RoughSystem extract_rough_system(const System& zsys, const Matrix& x_prefix, const Matrix& T,
                                 const std::vector<int>& pi, int p, int r, int n0, double M) {
    const auto& tol = zsys.tol();
    if (p < 1 || p > zsys.size() || r < 1 || r > x_prefix.cols() || r > static_cast<int>(pi.size()) || n0 < 0 ||
        n0 >= p)
        throw Error("extract_rough_system: indices out of range");
    const auto omega = omega_set(pi, r);
    if (omega.empty()) throw Error("extract_rough_system: Omega(" + std::to_string(r) + ") is empty", "omega-empty");

    const Matrix Qx = orthonormal_basis(x_prefix.leftCols(r), tol.rank_tol);
    std::vector<char> in_pi(static_cast<std::size_t>(zsys.ambient_dim()), 0);
    for (int n = 0; n < r; ++n) in_pi[static_cast<std::size_t>(pi[static_cast<std::size_t>(n)] - 1)] = 1;
    for (int n = 0; n < p; ++n) {
        const Vector z = zsys.xs().col(n);
        if (distance_to_span(z, Qx, tol.rank_tol) > tol.span_tol * z.norm())
            throw Error("extract_rough_system: z_" + std::to_string(n + 1) + " not in the span of x_1..x_" +
                            std::to_string(r),
                        "supp");
        const Vector zs = zsys.fs().col(n);
        double outside = 0.0;
        for (Eigen::Index i = 0; i < zs.size(); ++i)
            if (!in_pi[static_cast<std::size_t>(i)]) outside += zs(i) * zs(i);
        if (std::sqrt(outside) > tol.span_tol * zs.norm())
            throw Error("extract_rough_system: z*_" + std::to_string(n + 1) + " not supported on pi(1.." +
                            std::to_string(r) + ")",
                        "supp");
    }

    const Matrix TZ = T * zsys.xs().middleCols(n0, p - n0);
    const Matrix ZS = zsys.fs().middleCols(n0, p - n0);
    RoughSystem rs;
    rs.eps = 0.25;
    rs.bound_M = 2.0 * M;
    rs.ys = select_rows(TZ, omega);
    rs.gs = select_rows(ZS, omega);
    return rs;
}

}  // namespace mbasis
