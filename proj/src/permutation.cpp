#include "mbasis/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbasis/types.hpp"

namespace mbasis {

std::vector<double> tabulate(const std::function<double(int)>& f, int N) {
    if (N < 2) throw Error("tabulate: need at least two points");
    std::vector<double> out(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n) out[static_cast<std::size_t>(n)] = f(n);
    return out;
}

std::vector<int> build_phi(const std::vector<double>& f) {
    const int N = static_cast<int>(f.size()) - 1;
    if (N < 2) throw Error("build_phi: table too short");
    for (int n = 2; n <= N; ++n)
        if (f[static_cast<std::size_t>(n)] < f[static_cast<std::size_t>(n - 1)])
            throw Error("build_phi: f decreases at n = " + std::to_string(n));
    if (!(f[static_cast<std::size_t>(N)] > f[1]))
        throw Error("build_phi: f is constant on the table (not divergent)");
    if (!(f[static_cast<std::size_t>(N)] >= 1.0)) throw Error("build_phi: f(N) < 1");

    std::vector<int> phi(static_cast<std::size_t>(N) + 1, 0);
    phi[1] = 1;
    int jv = 1;  // first index of the current plateau
    for (int n = 2; n <= N; ++n) {
        const int v = phi[static_cast<std::size_t>(n - 1)];
        const double fn = f[static_cast<std::size_t>(n)];
        const double cap = fn > 0 ? std::max(1.0, std::log2(fn) + 1.0) : 1.0;
        if (n >= 2 * jv && v + 1 <= cap) {
            phi[static_cast<std::size_t>(n)] = v + 1;
            jv = n;
        } else {
            phi[static_cast<std::size_t>(n)] = v;
        }
    }
    return phi;
}

PermutationSpec build_permutation(const std::vector<double>& f) { return build_permutation(f, build_phi(f)); }

PermutationSpec build_permutation(const std::vector<double>& f, const std::vector<int>& phi) {
    const int N = static_cast<int>(phi.size()) - 1;
    if (N < 2 || static_cast<int>(f.size()) != N + 1) throw Error("build_permutation: table size mismatch");
    PermutationSpec s;
    s.f = f;
    s.phi = phi;
    const auto sz = static_cast<std::size_t>(N) + 1;
    s.Phi.assign(sz, 0);
    s.in_gamma.assign(sz, 0);
    s.pi.assign(sz, 0);
    s.free_cursor.assign(sz, 0);
    s.inverse.assign(sz, 0);

    // J[v] = first n with phi(n) = v
    std::vector<int> J(static_cast<std::size_t>(phi[static_cast<std::size_t>(N)]) + 2, 0);
    for (int n = 1; n <= N; ++n) {
        const int v = phi[static_cast<std::size_t>(n)];
        if (v > phi[static_cast<std::size_t>(n - 1)]) {
            if (v != phi[static_cast<std::size_t>(n - 1)] + 1)
                throw Error("build_permutation: phi is not onto an initial segment (jump at n = " +
                            std::to_string(n) + ")");
            J[static_cast<std::size_t>(v)] = n;
            s.in_gamma[static_cast<std::size_t>(n)] = 1;
        } else if (v < phi[static_cast<std::size_t>(n - 1)]) {
            throw Error("build_permutation: phi decreases at n = " + std::to_string(n));
        }
    }
    const int top = phi[static_cast<std::size_t>(N)];
    for (int n = 1; n <= N; ++n) {
        // Phi(n) = |{m : phi(m) <= n}| = J_{n+1} - 1; unresolved when phi never reaches n+1 on the table
        s.Phi[static_cast<std::size_t>(n)] = n + 1 <= top ? J[static_cast<std::size_t>(n + 1)] - 1 : kBeyondTable;
    }

    std::vector<char> used(sz + 1, 0);
    int cursor = 1;
    for (int n = 1; n <= N; ++n) {
        while (cursor <= N && used[static_cast<std::size_t>(cursor)]) ++cursor;
        s.free_cursor[static_cast<std::size_t>(n)] = cursor;
        std::int64_t v;
        if (s.in_gamma[static_cast<std::size_t>(n)]) {
            if (cursor > N) throw Error("build_permutation: free value beyond the table");
            v = cursor;
        } else {
            v = s.Phi[static_cast<std::size_t>(n)];
        }
        s.pi[static_cast<std::size_t>(n)] = v;
        if (v != kBeyondTable && v <= N) {
            if (used[static_cast<std::size_t>(v)])
                throw Error("build_permutation: pi not injective, value " + std::to_string(v) + " repeats at n = " +
                            std::to_string(n));
            used[static_cast<std::size_t>(v)] = 1;
            s.inverse[static_cast<std::size_t>(v)] = n;
        }
    }
    return s;
}

std::vector<int> omega_sizes(const PermutationSpec& spec) {
    const int R = spec.resolved();
    std::vector<int> om(static_cast<std::size_t>(R) + 1, 0);
    for (int m = 1; m <= R; ++m) {
        const auto pm = spec.pi[static_cast<std::size_t>(m)];
        const int inv = spec.inverse[static_cast<std::size_t>(m)];
        // entering index m adds value pi(m) if it is <= m, and value m if it was already hit
        om[static_cast<std::size_t>(m)] = om[static_cast<std::size_t>(m - 1)] + (pm <= m ? 1 : 0) +
                                          (inv >= 1 && inv < m ? 1 : 0);
    }
    return om;
}

PermutationChecks check_permutation(const PermutationSpec& spec) {
    PermutationChecks c;
    const int N = spec.size();
    const int R = spec.resolved();
    const auto& phi = spec.phi;
    auto fail = [&](bool& flag, const std::string& msg) {
        if (flag) c.failures.push_back(msg);
        flag = false;
    };

    for (int n = 1; n <= N; ++n) {
        const int a = phi[static_cast<std::size_t>(n - 1)], b = phi[static_cast<std::size_t>(n)];
        if (b < a || b > a + 1 || b > n) fail(c.phi_properties, "phi shape violated at n = " + std::to_string(n));
        if (2 * n <= N && phi[static_cast<std::size_t>(2 * n)] > 2 * b)
            fail(c.phi_properties, "phi(2n) > 2 phi(n) at n = " + std::to_string(n));
    }

    int gamma_count = 0;
    for (int m = 1; m <= N; ++m) {
        gamma_count += spec.in_gamma[static_cast<std::size_t>(m)] ? 1 : 0;
        if (gamma_count > phi[static_cast<std::size_t>(m)])
            fail(c.gamma_bound, "|Gamma cap 1..m| > phi(m) at m = " + std::to_string(m));
    }

    std::int64_t prev = 0;
    for (int n = 1; n <= N; ++n) {
        const auto v = spec.Phi[static_cast<std::size_t>(n)];
        if (v == kBeyondTable) break;
        if (v <= prev || v < n) fail(c.Phi_monotone, "Phi not strictly increasing / below n at n = " + std::to_string(n));
        prev = v;
    }

    // Phi is increasing, so the count is a moving pointer
    int count = 0;
    for (int m = 1; m <= R; ++m) {
        while (count + 1 <= N && spec.Phi[static_cast<std::size_t>(count + 1)] <= m) ++count;
        const int p = phi[static_cast<std::size_t>(m)];
        if (count != p && count != p - 1)
            fail(c.fi_two_point, "|{n : Phi(n) <= m}| = " + std::to_string(count) + " at m = " + std::to_string(m) +
                                     ", phi(m) = " + std::to_string(p));
    }

    std::vector<char> seen(static_cast<std::size_t>(N) + 1, 0);
    for (int n = 1; n <= N; ++n) {
        const auto v = spec.pi[static_cast<std::size_t>(n)];
        if (v == kBeyondTable) continue;
        if (v < 1) {
            fail(c.injective, "pi(" + std::to_string(n) + ") < 1");
            continue;
        }
        if (v <= N) {
            if (seen[static_cast<std::size_t>(v)]) fail(c.injective, "pi repeats value " + std::to_string(v));
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }

    const auto om = omega_sizes(spec);
    for (int m = 1; m <= R; ++m)
        if (om[static_cast<std::size_t>(m)] > 2 * phi[static_cast<std::size_t>(m)])
            fail(c.omega_bound, "|Omega(m)| > 2 phi(m) at m = " + std::to_string(m));
    return c;
}

std::vector<OmegaRow> omega_stats(const PermutationSpec& spec, const std::vector<int>& cs,
                                  const std::vector<int>& grid) {
    const auto om = omega_sizes(spec);
    const int R = spec.resolved();
    std::vector<OmegaRow> rows;
    for (int n : grid) {
        OmegaRow row;
        row.n = n;
        if (n < 1 || n > R) throw Error("omega_stats: n = " + std::to_string(n) + " outside the resolved table");
        row.omega_n = om[static_cast<std::size_t>(n)];
        row.f_n = spec.f[static_cast<std::size_t>(n)];
        for (int c : cs) {
            if (c < 1) throw Error("omega_stats: multipliers must be positive");
            const long long cn = static_cast<long long>(c) * n;
            if (cn > R)
                throw Error("omega_stats: c*n = " + std::to_string(cn) + " exceeds the resolved table (" +
                            std::to_string(R) + ")");
            int k = 0;
            while ((1LL << k) < c) ++k;
            row.ratios.push_back(om[static_cast<std::size_t>(cn)] / row.f_n);
            row.bounds.push_back(2.0 * std::ldexp(1.0, k) * spec.phi[static_cast<std::size_t>(n)] / row.f_n);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<int> log_grid(int lo, int hi, int per_decade) {
    if (lo < 1 || hi < lo || per_decade < 1) throw Error("log_grid: bad range");
    std::vector<int> g;
    for (int i = 0;; ++i) {
        const double v = lo * std::pow(10.0, static_cast<double>(i) / per_decade);
        const int n = static_cast<int>(std::lround(v));
        if (n > hi) break;
        if (g.empty() || n != g.back()) g.push_back(n);
    }
    if (g.back() != hi) g.push_back(hi);
    return g;
}

std::vector<int> finite_section(const PermutationSpec& spec, int D) {
    if (D < 1 || D > spec.resolved())
        throw Error("finite_section: D = " + std::to_string(D) + " needs a table of length " + std::to_string(D + 1));
    std::vector<int> out(static_cast<std::size_t>(D), 0);
    std::vector<char> taken(static_cast<std::size_t>(D) + 1, 0);
    for (int n = 1; n <= D; ++n) {
        const auto v = spec.pi[static_cast<std::size_t>(n)];
        if (v <= D) {
            out[static_cast<std::size_t>(n - 1)] = static_cast<int>(v);
            taken[static_cast<std::size_t>(v)] = 1;
        }
    }
    int next = D;
    for (int n = 1; n <= D; ++n) {
        if (out[static_cast<std::size_t>(n - 1)] != 0) continue;
        while (taken[static_cast<std::size_t>(next)]) --next;
        out[static_cast<std::size_t>(n - 1)] = next;
        taken[static_cast<std::size_t>(next)] = 1;
    }
    return out;
}

std::string permutation_table(const PermutationSpec& spec, int rows) {
    const int N = spec.size();
    rows = std::min(rows, N);
    auto show = [&](std::int64_t v) { return v == kBeyondTable ? ">=" + std::to_string(N) : std::to_string(v); };
    std::ostringstream os;
    os << "n phi Phi inGamma pi\n";
    for (int n = 1; n <= rows; ++n) {
        const auto i = static_cast<std::size_t>(n);
        os << n << ' ' << spec.phi[i] << ' ' << show(spec.Phi[i]) << ' ' << (spec.in_gamma[i] ? 1 : 0) << ' '
           << show(spec.pi[i]) << '\n';
    }
    return os.str();
}

}  // namespace mbasis
