#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mbasis/pathology.hpp"
#include "mbasis/permutation.hpp"
#include "mbasis/rough.hpp"
#include "mbasis/systems.hpp"
#include "mbasis/unb.hpp"

using namespace mbasis;

namespace {

std::vector<int> section(int D) {
    static const auto spec = build_permutation(tabulate([](int n) { return double(n); }, 4096));
    return finite_section(spec, D);
}

}  // namespace

TEST_CASE("tail condition on eps") {
    const auto eps = geometric_eps(40);
    CHECK(eps[0] == 0.125);
    CHECK(eps_tail_sum(eps) == doctest::Approx(1.0 / 48).epsilon(1e-9));
    CHECK_NOTHROW(require_eps_tail(eps));
    try {
        require_eps_tail(geometric_eps(40, 1.0));
        FAIL("expected a tail-eps error");
    } catch (const Error& e) {
        CHECK(e.anchor() == "tail-eps");
    }
}

TEST_CASE("near-canonical system at 50") {
    const auto pi = section(50);
    CHECK(std::vector<int>(pi.begin(), pi.begin() + 4) == std::vector<int>{1, 2, 7, 3});
    const auto ps = build_pathological_system(pi, geometric_eps(50), 50, 50);
    CHECK(ps.checks.pass);
    CHECK(ps.checks.defect <= 1e-8);
    CHECK(ps.checks.vector_span_residual <= 1e-8);
    CHECK(ps.checks.dual_support);
    CHECK(ps.checks.hat_slack >= 0);
    for (int n = 1; n <= 50; ++n) CHECK(ps.deltas.col(n - 1).norm() <= ps.eps[n - 1]);
    // f_n lives on e_pi(1..n)
    const Matrix F = ps.to_double().fs();
    for (int n = 1; n <= 50; ++n)
        for (int i = 1; i <= 50; ++i) {
            const bool allowed = std::find(pi.begin(), pi.begin() + n, i) != pi.begin() + n;
            if (!allowed) CHECK(F(i - 1, n - 1) == 0.0);
        }
}

TEST_CASE("pi out of the ambient space is rejected") {
    try {
        build_pathological_system({1, 3, 2}, geometric_eps(3), 3, 2);
        FAIL("expected an ambient error");
    } catch (const Error& e) {
        CHECK(e.anchor() == "ambient");
    }
}

TEST_CASE("T for a 2x2 example") {
    Matrix eh(2, 2);
    eh << 1, 0, 0.25, 1;
    const auto t = operator_T(eh, 2);
    Matrix want(2, 2);
    want << 1, 0, -0.25, 1;
    CHECK((t.T - want).norm() < 1e-15);
    CHECK(t.norm <= 1.2808);
    CHECK(t.norm == doctest::Approx(1.13278).epsilon(1e-4));
    const Vector z1 = Vector::Unit(2, 0);
    CHECK((t.T * z1 - z1).norm() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("T norms and decay on the near-canonical system") {
    const int D = 120;
    const auto ps = build_pathological_system(section(D), geometric_eps(D), D, D);
    const auto t = operator_T(ps.e_hats, D);
    CHECK(t.norm <= 2);
    CHECK(t.norm_inv <= 2);
    for (int n = 1; n <= D; ++n) CHECK((t.T * ps.e_hats.col(n - 1) - Vector::Unit(D, n - 1)).norm() < 1e-12);
    const System z = gram_schmidt_system(ps.e_hats);
    const auto table = t_asymptotics_check(t.T, z.xs(), ps.eps);
    CHECK(table.within_bound);
    CHECK(table.rows.back().measured < 0.05);
    const int n0 = decay_threshold_index(table, 2);
    for (const auto& row : table.rows)
        if (row.n > n0) CHECK(row.measured < 0.125);
}

TEST_CASE("moving average") {
    const auto m = moving_average({1, 2, 3, 4, 5}, 3);
    CHECK(m[0] == doctest::Approx(1.5));
    CHECK(m[2] == doctest::Approx(3));
    CHECK(m[4] == doctest::Approx(4.5));
}

TEST_CASE("omega set of a finite permutation") {
    CHECK(omega_set({1, 2, 7, 3, 6, 5, 4}, 3) == std::vector<int>{1, 2});
    CHECK(omega_set({1, 2, 7, 3, 6, 5, 4}, 4) == std::vector<int>{1, 2, 3});
}

TEST_CASE("rough defect and capacity") {
    RoughSystem rs;
    rs.ys = Matrix::Identity(2, 2);
    rs.gs.resize(2, 2);
    rs.gs << 1, 0, 0.2, 1;
    CHECK(rough_defect(rs) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rough_certified(rs));
    CHECK(rough_separation(rs) == doctest::Approx(std::sqrt(2.0)));

    for (int k = 1; k <= 3; ++k) {
        const auto c = rough_capacity(k, 0.25, 2);
        CHECK(c.delta == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(c.p_max == doctest::Approx(std::pow(9.0, k)).epsilon(1e-12));
        CHECK(std::abs(c.c1 - 1 / std::log(9.0)) < 1e-12);
    }
    const auto c0 = rough_capacity(2, 1e-12, 1);
    CHECK(c0.delta == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c0.p_max == doctest::Approx(9.0).epsilon(1e-9));
    try {
        rough_capacity(2, 0.5, 2);
        FAIL("expected rough-eps");
    } catch (const Error& e) {
        CHECK(e.anchor() == "rough-eps");
    }
}

TEST_CASE("greedy packings stay under capacity and are separated") {
    for (int k = 1; k <= 2; ++k) {
        const auto rs = greedy_rough_packing(k, 0.25, 2, 2000, 11);
        CHECK(rough_certified(rs));
        CHECK(static_cast<double>(rs.size()) <= rough_capacity(k, 0.25, 2).p_max);
        if (rs.size() > 1) CHECK(rough_separation(rs) >= 0.25 - 1e-9);
    }
}

TEST_CASE("rough extraction past n0") {
    const int D = 64;
    const auto pi = section(D);
    const auto ps = build_pathological_system(pi, geometric_eps(D), D, D);
    const auto t = operator_T(ps.e_hats, D);
    const System z = gram_schmidt_system(ps.e_hats);
    const auto table = t_asymptotics_check(t.T, z.xs(), ps.eps);
    const int n0 = decay_threshold_index(table, 2);
    const int p = n0 + 4;
    const auto q = spanning_indices(z.xs(), z.fs(), ps.e_hats, ps.pi_generators(), 1e-8);
    const auto rs = extract_rough_system(z, ps.e_hats, t.T, pi, p, q[p - 1], n0, 2);
    CHECK(rs.size() == p - n0);
    CHECK(rough_defect(rs) <= 0.25);
}

TEST_CASE("unb at 64: q/lambda at jumps, brackets, identity control") {
    UnbConfig cfg;
    cfg.truncation = 64;
    const auto rep = unb_experiment(cfg);
    CHECK(rep.resolved_depth >= 6);
    CHECK(rep.ratios_monotone);
    CHECK(rep.omega_bracket);
    CHECK(rep.capacity_ok);
    CHECK(rep.rows[0].q == 1);
    CHECK(rep.rows[3].q == 8);
    cfg.identity_control = true;
    const auto ctl = unb_experiment(cfg);
    CHECK(ctl.control_identity);
    for (int m = 1; m <= 64; ++m) CHECK(ctl.rows[m - 1].q == m);
}
