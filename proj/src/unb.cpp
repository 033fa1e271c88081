#include "mbasis/unb.hpp"

#include <cmath>
#include <numeric>

#include "mbasis/systems.hpp"

namespace mbasis {

std::vector<double> lambda_schedule(const std::string& name, int n) {
    std::vector<double> l(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m) {
        if (name == "linear")
            l[static_cast<std::size_t>(m)] = m;
        else if (name == "quadratic")
            l[static_cast<std::size_t>(m)] = static_cast<double>(m) * m;
        else
            throw Error("unknown lambda schedule '" + name + "' (expected linear or quadratic)");
    }
    return l;
}

namespace {

// {1..r} cap pi({1..r}) for the table permutation itself
std::vector<int> table_omega(const PermutationSpec& spec, int r) {
    std::vector<int> out;
    for (int k = 1; k <= r; ++k) {
        const int inv = spec.inverse[static_cast<std::size_t>(k)];
        if (inv >= 1 && inv <= r) out.push_back(k);
    }
    return out;
}

}  // namespace

UnbReport unb_experiment(const UnbConfig& cfg) {
    const int D = cfg.truncation;
    if (D < 2) throw Error("unb_experiment: truncation must be >= 2");
    const int N = D + 1;  // one extra entry resolves Phi and Omega on 1..D
    const auto lam = lambda_schedule(cfg.lambda, N);
    const double kappa = lam[static_cast<std::size_t>(N)] / std::log(lam[static_cast<std::size_t>(N)] + 1.0);
    const auto f = tabulate([&](int n) { return kappa * std::log(lam[static_cast<std::size_t>(n)] + 1.0); }, N);
    const auto spec = build_permutation(f);

    std::vector<int> pi(static_cast<std::size_t>(D));
    if (cfg.identity_control)
        std::iota(pi.begin(), pi.end(), 1);
    else
        pi = finite_section(spec, D);

    const auto eps = geometric_eps(D, cfg.eps_scale);
    const auto sys = build_pathological_system(pi, eps, D, D, cfg.tol);
    const System z = gram_schmidt_system(sys.e_hats, cfg.tol);
    const auto q = spanning_indices(z.xs(), z.fs(), sys.e_hats, sys.pi_generators(), cfg.tol.span_tol);
    const auto T = operator_T(sys.e_hats, D);
    const auto decay = t_asymptotics_check(T.T, z.xs(), eps);
    const double Mz = boundedness_constant(z);

    UnbReport rep;
    rep.truncation = D;
    rep.normT = T.norm;
    rep.normTinv = T.norm_inv;
    rep.defect = sys.checks.defect;
    rep.n0 = decay_threshold_index(decay, Mz);
    const auto cap = rough_capacity(1, 0.25, 2.0 * Mz);
    const double log_base = std::log(1.0 + 2.0 / cap.delta);

    bool resolved = true;
    for (int m = 1; m <= D; ++m) {
        UnbRow row;
        row.m = m;
        row.q = q[static_cast<std::size_t>(m - 1)];
        row.lambda = lam[static_cast<std::size_t>(m)];
        row.ratio = row.q / row.lambda;
        const auto omega = omega_set(pi, row.q);
        row.omega = static_cast<int>(omega.size());
        row.two_phi = 2 * spec.phi[static_cast<std::size_t>(row.q)];
        row.c1log = m > rep.n0 ? cap.c1 * std::log(static_cast<double>(m - rep.n0)) : 0.0;
        // the row reflects pi only if q(m) is the true spanning index and
        // the finite section adds nothing to Omega(q(m))
        if (!cfg.identity_control) {
            const int inv = spec.inverse[static_cast<std::size_t>(m)];
            resolved = resolved && inv >= 1 && inv <= D && omega == table_omega(spec, row.q);
        }
        row.resolved = resolved;
        if (resolved) rep.resolved_depth = m;

        if (!cfg.identity_control && resolved && m > rep.n0 && !omega.empty()) {
            const auto rs = extract_rough_system(z, sys.e_hats, T.T, pi, m, row.q, rep.n0, Mz);
            row.rough_defect = rough_defect(rs);
            row.rough_size = static_cast<int>(rs.size());
            row.certified = rough_certified(rs);
            row.log_capacity = row.omega * log_base;
            if (row.certified) {
                if (std::log(static_cast<double>(row.rough_size)) > row.log_capacity + 1e-12) rep.capacity_ok = false;
                if (row.c1log > row.omega + 1e-12) rep.lower_bracket = false;
            }
        }
        if (cfg.identity_control) {
            if (row.q != m) rep.control_identity = false;
        } else if (row.resolved && row.omega > row.two_phi) {
            rep.omega_bracket = false;
        }
        rep.rows.push_back(row);
    }

    for (int m = 2; m <= rep.resolved_depth; ++m)
        if (rep.rows[static_cast<std::size_t>(m - 1)].q > rep.rows[static_cast<std::size_t>(m - 2)].q)
            rep.jump_points.push_back(m);
    for (std::size_t i = 1; i < rep.jump_points.size(); ++i)
        if (rep.rows[static_cast<std::size_t>(rep.jump_points[i] - 1)].ratio <
            rep.rows[static_cast<std::size_t>(rep.jump_points[i - 1] - 1)].ratio)
            rep.ratios_monotone = false;
    return rep;
}

}  // namespace mbasis
