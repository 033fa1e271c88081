#include "mbasis/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

#include "mbasis/io.hpp"
#include "mbasis/pathology.hpp"
#include "mbasis/permutation.hpp"
#include "mbasis/representing.hpp"
#include "mbasis/rough.hpp"
#include "mbasis/systems.hpp"
#include "mbasis/unb.hpp"

namespace mbasis {

namespace fs = std::filesystem;
using nlohmann::json;

LogLevel log_level_from_env() {
    const char* v = std::getenv("MBASIS_LOG");
    if (!v) return LogLevel::info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return LogLevel::quiet;
    if (s == "debug" || s == "2") return LogLevel::debug;
    return LogLevel::info;
}

namespace {

// JSON numbers carry the same 12 significant digits as the CSV files
double num(double v) { return std::stod(format_number(v)); }

struct Context {
    const ExperimentConfig& cfg;
    LogLevel level;
    fs::path out;
    RunOutcome& res;
    std::string module = "cli";
    std::string operation = "run";

    void stage(std::string m, std::string op) {
        module = std::move(m);
        operation = std::move(op);
        log(LogLevel::debug, module + "/" + operation);
    }
    void log(LogLevel l, const std::string& msg) const {
        if (static_cast<int>(level) >= static_cast<int>(l)) std::cerr << "[mbasis] " << msg << '\n';
    }
    void check(const std::string& name, bool pass, const std::string& detail = {}) {
        res.checks.push_back({name, pass, detail});
        log(pass ? LogLevel::debug : LogLevel::info, std::string(pass ? "pass " : "FAIL ") + name + " " + detail);
    }
    void artifact(const fs::path& rel) { res.artifacts.push_back(rel.generic_string()); }
    void csv(const fs::path& rel, const CsvWriter& w) {
        w.write(out / rel);
        artifact(rel);
    }
    void text(const fs::path& rel, const std::string& t) {
        write_text(out / rel, t);
        artifact(rel);
    }
};

json csv_to_json(const CsvWriter& w) {
    json rows = json::array();
    for (const auto& r : w.rows()) {
        json o = json::object();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const auto& cell = r[i];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end && *end == '\0' && !cell.empty())
                o[w.header()[i]] = v;
            else
                o[w.header()[i]] = cell;
        }
        rows.push_back(o);
    }
    return rows;
}

System generate_system(Context& ctx) {
    const auto& c = ctx.cfg;
    ctx.stage("biorth", "build_system");
    if (c.system == "canonical") return canonical_system(c.truncation, c.tol);
    if (c.system == "coupled") return coupled_system(c.truncation, c.coupling, c.tol);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> g;
    Matrix X = Matrix::Identity(c.truncation, c.truncation);
    const double s = 0.3 / std::sqrt(static_cast<double>(c.truncation));
    for (int j = 0; j < c.truncation; ++j)
        for (int i = 0; i < c.truncation; ++i) X(i, j) += s * g(rng);
    return system_from_vectors(X, c.tol);
}

System load_or_generate(Context& ctx) {
    if (ctx.cfg.input.empty()) return generate_system(ctx);
    ctx.stage("biorth", "load_system");
    return load_system(ctx.cfg.input, ctx.cfg.tol);
}

Vector random_unit(std::mt19937_64& rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    Vector v(d);
    do {
        for (Eigen::Index i = 0; i < d; ++i) v(i) = g(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

void cmd_build_system(Context& ctx) {
    const System sys = generate_system(ctx);
    save_system(ctx.out / "system", sys);
    ctx.artifact("system/X.csv");
    ctx.artifact("system/F.csv");
    ctx.artifact("system/system.txt");
    ctx.stage("biorth", "diagnostics");
    const double defect = biorthogonality_defect(sys);
    CsvWriter w({"quantity", "value"});
    w.add({"size", std::to_string(sys.size())});
    w.add({"defect", format_number(defect)});
    w.add({"boundedness", format_number(boundedness_constant(sys))});
    w.add({"uniform_minimality", format_number(uniform_minimality_constant(sys))});
    w.add({"norming_constant", format_number(norming_constant_exact(sys))});
    ctx.csv("diagnostics.csv", w);
    ctx.res.summary["diagnostics"] = csv_to_json(w);
    ctx.check("biorthogonality_defect", defect <= ctx.cfg.tol.biorth_tol, format_number(defect));
}

void cmd_perturb(Context& ctx) {
    const auto& c = ctx.cfg;
    const System sys = load_or_generate(ctx);
    const int N = static_cast<int>(sys.size());
    BlockPartition part;
    std::optional<StrongPartitionTrace> trace;
    if (c.auto_strong) {
        ctx.stage("representing", "build_representing_indices");
        const auto r = build_representing_indices(sys, std::min(c.depth, N));
        ctx.text("indices.txt", format_indices(r));
        ctx.stage("representing", "strong_partition");
        trace = strong_partition(r, c.blocks, c.eps0);
        part = extend_with_singletons(trace->partition, N);
    } else {
        if (c.partition.empty())
            throw Error("perturb needs auto_strong = true (or --auto-strong) or a partition file");
        ctx.stage("perturbations", "parse_partition");
        part = parse_partition(read_text(c.partition));
    }
    ctx.text("partition.txt", format_partition(part));

    ctx.stage("perturbations", "construct_flattened");
    const System z = construct_flattened(sys, part, c.seed);
    save_system(ctx.out / "flattened", z);
    ctx.artifact("flattened/X.csv");
    ctx.artifact("flattened/F.csv");
    ctx.artifact("flattened/system.txt");

    ctx.stage("perturbations", "verify_flattened");
    const auto rep = verify_flattened(z, sys, part);
    CsvWriter w({"j", "vector_gap", "dual_gap", "anchor_slack"});
    for (const auto& b : rep.blocks)
        w.add({std::to_string(b.j), format_number(b.vector_gap), format_number(b.dual_gap),
               format_number(b.anchor_slack)});
    ctx.csv("verify.csv", w);
    ctx.res.summary["verify"] = csv_to_json(w);
    ctx.res.summary["defect"] = num(rep.defect);
    ctx.check("verify_flattened", rep.pass, "defect " + format_number(rep.defect));

    ctx.stage("biorth", "classify_perturbation");
    const auto cls = classify_perturbation(z, sys, c.tol.span_tol);
    ctx.res.summary["classification"] = cls.kind == PerturbationKind::block  ? "block"
                                        : cls.kind == PerturbationKind::pile ? "pile"
                                                                             : "neither";
    ctx.check("classify_block", cls.kind == PerturbationKind::block);

    if (trace) {
        ctx.stage("representing", "strongness_diagnostic");
        std::mt19937_64 rng(c.seed);
        CsvWriter s({"sample", "residual", "case_b_bounds", "claims_hold"});
        for (int k = 1; k <= c.samples; ++k) {
            const Vector x = random_unit(rng, sys.ambient_dim());
            const auto d = strongness_diagnostic(x, z, sys, *trace, part.epsilons);
            int b = 0;
            bool claims = true;
            for (const auto& v : d.bounds) {
                b += v.verdict == StrongCase::B ? 1 : 0;
                claims = claims && v.claim_holds;
            }
            s.add({std::to_string(k), format_number(d.residual), std::to_string(b), claims ? "1" : "0"});
        }
        ctx.csv("strongness.csv", s);
        ctx.res.summary["strongness"] = csv_to_json(s);
    }
}

void cmd_represent(Context& ctx) {
    const auto& c = ctx.cfg;
    const System sys = load_or_generate(ctx);
    const int depth = std::min(c.depth, static_cast<int>(sys.size()));
    ctx.stage("representing", "build_representing_indices");
    const auto r = build_representing_indices(sys, depth);
    ctx.text("indices.txt", format_indices(r));

    ctx.stage("representing", "reconstruct");
    std::mt19937_64 rng(c.seed);
    CsvWriter w({"sample", "m", "error", "oracle", "difference"});
    double worst = 0.0;
    for (int k = 1; k <= c.samples; ++k) {
        const Vector x = random_unit(rng, sys.ambient_dim());
        for (int m = 0; m + 1 <= r.depth(); ++m) {
            const auto rec = reconstruct(x, sys, r, m);
            // independent least squares over the same window
            const int head = r.at(m), next = r.at(m + 1);
            Vector resid = x;
            if (head > 0) resid -= sys.xs().leftCols(head) * (sys.fs().leftCols(head).transpose() * x);
            const Matrix W = column_range(sys.xs(), head + 1, next);
            const Vector coef = W.colPivHouseholderQr().solve(resid);
            const double oracle = (resid - W * coef).norm();
            const double diff = std::abs(rec.error - oracle);
            worst = std::max(worst, diff);
            w.add({std::to_string(k), std::to_string(m), format_number(rec.error), format_number(oracle),
                   format_number(diff)});
        }
    }
    ctx.csv("reconstruct.csv", w);
    ctx.res.summary["reconstruct"] = csv_to_json(w);
    ctx.check("reconstruct_matches_oracle", worst <= 1e-10, format_number(worst));

    ctx.stage("representing", "build_norming_indices");
    const double cn = c.norming_c > 0 ? c.norming_c : norming_constant_exact(sys) / 2.0;
    const auto nr = build_norming_indices(sys, depth, cn);
    ctx.text("norming_indices.txt", format_indices(nr));
    CsvWriter pm({"m", "p", "r", "margin", "c"});
    bool ok = true;
    for (int m = 1; m <= nr.depth(); ++m) {
        const int p = nr.interim_p[static_cast<std::size_t>(m - 1)], rr = nr.r[static_cast<std::size_t>(m - 1)];
        const double margin = norming_margin(sys, p, rr);
        ok = ok && margin >= cn - 1e-12;
        pm.add({std::to_string(m), std::to_string(p), std::to_string(rr), format_number(margin), format_number(cn)});
    }
    ctx.csv("norming_margin.csv", pm);
    ctx.res.summary["norming_margin"] = csv_to_json(pm);
    ctx.check("norming_margin", ok);
}

void cmd_pathology(Context& ctx) {
    const auto& c = ctx.cfg;
    ctx.stage("pathology", "build_permutation");
    const int cmax = *std::max_element(c.cs.begin(), c.cs.end());
    const int N = std::max(c.perm_size * cmax, c.truncation) + 1;
    const auto spec = build_permutation(tabulate([](int n) { return static_cast<double>(n); }, N));
    ctx.text("permutation.txt", permutation_table(spec, std::min(N, 1000)));
    const auto pc = check_permutation(spec);
    ctx.check("permutation_invariants", pc.all(), pc.failures.empty() ? "" : pc.failures.front());

    ctx.stage("pathology", "omega_stats");
    const auto grid = log_grid(std::min(1000, c.perm_size), c.perm_size, 4);
    const auto rows = omega_stats(spec, c.cs, grid);
    std::vector<std::string> header{"n", "f", "omega"};
    for (int cc : c.cs) {
        header.push_back("ratio_c" + std::to_string(cc));
        header.push_back("bound_c" + std::to_string(cc));
    }
    CsvWriter w(header);
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row{std::to_string(rows[i].n), format_number(rows[i].f_n),
                                     std::to_string(rows[i].omega_n)};
        for (std::size_t k = 0; k < c.cs.size(); ++k) {
            row.push_back(format_number(rows[i].ratios[k]));
            row.push_back(format_number(rows[i].bounds[k]));
            if (i > 0 && !(rows[i].ratios[k] < rows[i - 1].ratios[k])) decreasing = false;
        }
        w.add(row);
    }
    ctx.csv("omega.csv", w);
    ctx.res.summary["omega"] = csv_to_json(w);
    ctx.check("omega_ratios_decreasing", decreasing);

    ctx.stage("pathology", "build_pathological_system");
    const int D = c.truncation;
    const auto pi = finite_section(spec, D);
    const auto eps = geometric_eps(D, c.eps_scale);
    const auto sys = build_pathological_system(pi, eps, D, D, c.tol);
    write_vectors_csv(ctx.out / "system" / "X.csv", sys.xs.cast<double>());
    write_vectors_csv(ctx.out / "system" / "F.csv", sys.fs.cast<double>());
    write_vectors_csv(ctx.out / "system" / "E_hat.csv", sys.e_hats);
    ctx.artifact("system/X.csv");
    ctx.artifact("system/F.csv");
    ctx.artifact("system/E_hat.csv");
    ctx.res.summary["system"] = {{"defect", num(sys.checks.defect)},
                                 {"span_residual", num(sys.checks.vector_span_residual)},
                                 {"eps_slack", num(sys.checks.hat_slack)},
                                 {"max_x_norm", num(sys.checks.max_x_norm)}};
    ctx.check("system_postconditions", sys.checks.pass);

    ctx.stage("pathology", "operator_T");
    const auto T = operator_T(sys.e_hats, D);
    ctx.res.summary["T"] = {{"norm", num(T.norm)}, {"norm_inv", num(T.norm_inv)}};
    ctx.check("T_norms", T.norm <= 2.0 + 1e-9 && T.norm_inv <= 2.0 + 1e-9,
              format_number(T.norm) + " " + format_number(T.norm_inv));

    ctx.stage("pathology", "t_asymptotics_check");
    const System z = gram_schmidt_system(sys.e_hats, c.tol);
    const auto decay = t_asymptotics_check(T.T, z.xs(), eps);
    CsvWriter dw({"n", "measured", "bound", "k"});
    for (const auto& r : decay.rows)
        dw.add({std::to_string(r.n), format_number(r.measured), format_number(r.bound), std::to_string(r.k_star)});
    ctx.csv("decay.csv", dw);
    ctx.res.summary["decay"] = csv_to_json(dw);
    ctx.check("decay_within_bound", decay.within_bound);

    ctx.stage("pathology", "rough_capacity");
    CsvWriter rw({"k", "delta", "p_max", "c1", "packing_size", "separation"});
    bool packing_ok = true;
    for (int k = 1; k <= 3; ++k) {
        const auto cap = rough_capacity(k, 0.25, 2.0);
        const auto rs = greedy_rough_packing(k, 0.25, 2.0, 2000, c.seed + static_cast<std::uint64_t>(k));
        const double sep = rough_separation(rs);
        packing_ok = packing_ok && rs.size() <= cap.p_max && (rs.size() < 2 || sep >= cap.delta - 1e-9);
        rw.add({std::to_string(k), format_number(cap.delta), format_number(cap.p_max), format_number(cap.c1),
                std::to_string(rs.size()), rs.size() < 2 ? "inf" : format_number(sep)});
    }
    ctx.csv("rough.csv", rw);
    ctx.res.summary["rough"] = csv_to_json(rw);
    ctx.check("rough_packing", packing_ok);
}

CsvWriter unb_csv(const UnbReport& r, bool resolved_only) {
    CsvWriter w({"m", "q", "lambda", "ratio", "omega", "two_phi", "c1log"});
    for (const auto& row : r.rows) {
        if (resolved_only && !row.resolved) break;
        w.add({std::to_string(row.m), std::to_string(row.q), format_number(row.lambda), format_number(row.ratio),
               std::to_string(row.omega), std::to_string(row.two_phi), format_number(row.c1log)});
    }
    return w;
}

void cmd_unb(Context& ctx) {
    const auto& c = ctx.cfg;
    json cells = json::array();
    for (int D : c.sizes) {
        ctx.stage("pathology", "unb_experiment");
        UnbConfig u;
        u.truncation = D;
        u.lambda = c.lambda;
        u.eps_scale = c.eps_scale;
        u.tol = c.tol;
        const auto rep = unb_experiment(u);
        const auto w = unb_csv(rep, true);
        const std::string tag = std::to_string(D);
        ctx.csv("unb_" + tag + ".csv", w);
        json cell{{"truncation", D},
                  {"n0", rep.n0},
                  {"resolved_depth", rep.resolved_depth},
                  {"normT", num(rep.normT)},
                  {"normTinv", num(rep.normTinv)},
                  {"jump_points", rep.jump_points},
                  {"rows", csv_to_json(w)}};
        ctx.check("unb_" + tag + "_ratios_monotone", rep.ratios_monotone);
        ctx.check("unb_" + tag + "_omega_bracket", rep.omega_bracket);
        ctx.check("unb_" + tag + "_capacity", rep.capacity_ok && rep.lower_bracket);
        if (c.control) {
            u.identity_control = true;
            const auto ctl = unb_experiment(u);
            const auto cw = unb_csv(ctl, false);
            ctx.csv("unb_" + tag + "_control.csv", cw);
            cell["control_rows"] = csv_to_json(cw);
            ctx.check("unb_" + tag + "_control_identity", ctl.control_identity);
        }
        cells.push_back(cell);
    }
    ctx.res.summary["cells"] = cells;
}

json config_json(const ExperimentConfig& c) {
    return {{"command", c.command},
            {"truncation", c.truncation},
            {"seed", c.seed},
            {"tolerances",
             {{"rank_tol", c.tol.rank_tol},
              {"biorth_tol", c.tol.biorth_tol},
              {"span_tol", c.tol.span_tol},
              {"net_resolution", c.tol.net_resolution}}},
            {"input", c.input},
            {"partition", c.partition},
            {"system", c.system},
            {"coupling", c.coupling},
            {"depth", c.depth},
            {"blocks", c.blocks},
            {"auto_strong", c.auto_strong},
            {"eps0", c.eps0},
            {"norming_c", c.norming_c},
            {"samples", c.samples},
            {"eps_scale", c.eps_scale},
            {"perm_size", c.perm_size},
            {"cs", c.cs},
            {"sizes", c.sizes},
            {"lambda", c.lambda},
            {"control", c.control}};
}

}  // namespace

RunOutcome run(const ExperimentConfig& cfg, LogLevel level) {
    cfg.validate(true);
    RunOutcome res;
    Context ctx{cfg, level, fs::path(cfg.output), res};
    fs::create_directories(ctx.out);
    const auto t0 = std::chrono::steady_clock::now();
    ctx.log(LogLevel::info, "running " + cfg.command + " into " + ctx.out.string());

    bool errored = false;
    try {
        if (cfg.command == "build-system")
            cmd_build_system(ctx);
        else if (cfg.command == "perturb")
            cmd_perturb(ctx);
        else if (cfg.command == "represent")
            cmd_represent(ctx);
        else if (cfg.command == "pathology")
            cmd_pathology(ctx);
        else
            cmd_unb(ctx);
    } catch (const Error& e) {
        errored = true;
        res.failure = {{"module", ctx.module},
                       {"operation", ctx.operation},
                       {"invariant", e.anchor().empty() ? "precondition" : e.anchor()},
                       {"message", e.what()}};
    }
    for (const auto& ch : res.checks)
        if (!ch.pass && res.failure.is_null())
            res.failure = {{"module", "cli"}, {"operation", cfg.command}, {"invariant", ch.name}, {"message", ch.detail}};

    json checks = json::object();
    for (const auto& ch : res.checks) checks[ch.name] = ch.pass;
    res.summary["checks"] = checks;
    res.summary["command"] = cfg.command;
    res.exit_code = res.failure.is_null() ? 0 : 2;
    res.summary["status"] = res.exit_code == 0 ? "pass" : (errored ? "error" : "fail");

    write_text(ctx.out / "summary.json", res.summary.dump(2) + "\n");
    if (!res.failure.is_null()) {
        write_text(ctx.out / "failure.json", res.failure.dump(2) + "\n");
        ctx.log(LogLevel::quiet, "failure in " + res.failure["module"].get<std::string>() + "/" +
                                     res.failure["operation"].get<std::string>() + ": " +
                                     res.failure["message"].get<std::string>());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest{{"config", config_json(cfg)},
                  {"artifacts", res.artifacts},
                  {"status", res.summary["status"]},
                  {"versions", {{"mbasis", "0.1.0"}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                                    std::to_string(EIGEN_MINOR_VERSION)}}},
                  {"wall_time_s", wall}};
    write_text(ctx.out / "manifest.json", manifest.dump(2) + "\n");
    return res;
}

}  // namespace mbasis
