#include "mbasis/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mbasis {

namespace {

const std::set<std::string> kCommands{"build-system", "perturb", "represent", "pathology", "unb"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long long to_int(const std::string& v) {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
}

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(v);
}

std::vector<int> to_int_list(const std::string& v) {
    std::vector<int> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(static_cast<int>(to_int(trim(item))));
    if (out.empty()) throw std::invalid_argument(v);
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> s{
        {"command", [](auto& c, auto& v) { c.command = v; }},
        {"truncation", [](auto& c, auto& v) { c.truncation = static_cast<int>(to_int(v)); }},
        {"seed",
         [](auto& c, auto& v) {
             const long long x = to_int(v);
             if (x < 0) throw std::out_of_range(v);
             c.seed = static_cast<std::uint64_t>(x);
         }},
        {"rank_tol", [](auto& c, auto& v) { c.tol.rank_tol = to_double(v); }},
        {"biorth_tol", [](auto& c, auto& v) { c.tol.biorth_tol = to_double(v); }},
        {"span_tol", [](auto& c, auto& v) { c.tol.span_tol = to_double(v); }},
        {"net_resolution", [](auto& c, auto& v) { c.tol.net_resolution = to_double(v); }},
        {"output", [](auto& c, auto& v) { c.output = v; }},
        {"input", [](auto& c, auto& v) { c.input = v; }},
        {"partition", [](auto& c, auto& v) { c.partition = v; }},
        {"system", [](auto& c, auto& v) { c.system = v; }},
        {"coupling", [](auto& c, auto& v) { c.coupling = to_double(v); }},
        {"depth", [](auto& c, auto& v) { c.depth = static_cast<int>(to_int(v)); }},
        {"blocks", [](auto& c, auto& v) { c.blocks = static_cast<int>(to_int(v)); }},
        {"auto_strong", [](auto& c, auto& v) { c.auto_strong = to_bool(v); }},
        {"eps0", [](auto& c, auto& v) { c.eps0 = to_double(v); }},
        {"norming_c", [](auto& c, auto& v) { c.norming_c = to_double(v); }},
        {"samples", [](auto& c, auto& v) { c.samples = static_cast<int>(to_int(v)); }},
        {"eps_scale", [](auto& c, auto& v) { c.eps_scale = to_double(v); }},
        {"perm_size", [](auto& c, auto& v) { c.perm_size = static_cast<int>(to_int(v)); }},
        {"cs", [](auto& c, auto& v) { c.cs = to_int_list(v); }},
        {"sizes", [](auto& c, auto& v) { c.sizes = to_int_list(v); }},
        {"lambda", [](auto& c, auto& v) { c.lambda = v; }},
        {"control", [](auto& c, auto& v) { c.control = to_bool(v); }},
    };
    return s;
}

}  // namespace

void ExperimentConfig::validate(bool require_command) const {
    if (command.empty()) {
        if (require_command) throw Error("config: missing required key 'command'");
    } else if (!kCommands.count(command)) {
        throw Error("config: command '" + command + "' is not one of build-system, perturb, represent, pathology, unb");
    }
    if (truncation < 2) throw Error("config: truncation must be >= 2 (got " + std::to_string(truncation) + ")");
    try {
        tol.validate();
    } catch (const Error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    if (output.empty()) throw Error("config: output path is empty");
    if (system != "canonical" && system != "coupled" && system != "random")
        throw Error("config: system must be canonical, coupled or random");
    if (!(std::abs(coupling) < 1e6)) throw Error("config: coupling out of range");
    if (depth < 1) throw Error("config: depth must be >= 1");
    if (blocks < 1) throw Error("config: blocks must be >= 1");
    if (!(eps0 > 0)) throw Error("config: eps0 must be positive");
    if (norming_c < 0) throw Error("config: norming_c must be non-negative");
    if (samples < 1) throw Error("config: samples must be >= 1");
    if (!(eps_scale > 0)) throw Error("config: eps_scale must be positive");
    if (perm_size < 16) throw Error("config: perm_size must be >= 16");
    for (int c : cs)
        if (c < 1) throw Error("config: cs entries must be positive");
    for (int s : sizes)
        if (s < 2) throw Error("config: sizes entries must be >= 2");
    if (lambda != "linear" && lambda != "quadratic") throw Error("config: lambda must be linear or quadratic");
}

ExperimentConfig parse_config(const std::string& text, bool require_command) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = "config line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw Error(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw Error(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw Error(where + "duplicate key '" + key + "'");
        if (value.empty()) throw Error(where + "empty value for '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const std::exception&) {
            throw Error(where + "invalid value '" + value + "' for '" + key + "'");
        }
    }
    cfg.validate(require_command);
    return cfg;
}

std::string config_reference() {
    const ExperimentConfig d;
    std::ostringstream os;
    auto list = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    os << "Config keys (key = value, '#' comments):\n"
       << "  command         build-system | perturb | represent | pathology | unb\n"
       << "  truncation      " << d.truncation << "\n"
       << "  seed            " << d.seed << "\n"
       << "  rank_tol        " << d.tol.rank_tol << "\n"
       << "  biorth_tol      " << d.tol.biorth_tol << "\n"
       << "  span_tol        " << d.tol.span_tol << "\n"
       << "  net_resolution  " << d.tol.net_resolution << "\n"
       << "  output          " << d.output << "\n"
       << "  input           (stored system directory with X.csv, F.csv)\n"
       << "  partition       (file of 'A j: n | members | eps' lines)\n"
       << "  system          " << d.system << " (canonical | coupled | random)\n"
       << "  coupling        " << d.coupling << "\n"
       << "  depth           " << d.depth << "\n"
       << "  blocks          " << d.blocks << "\n"
       << "  auto_strong     false\n"
       << "  eps0            " << d.eps0 << "\n"
       << "  norming_c       0 (half the exact norming constant)\n"
       << "  samples         " << d.samples << "\n"
       << "  eps_scale       " << d.eps_scale << "\n"
       << "  perm_size       " << d.perm_size << "\n"
       << "  cs              " << list(d.cs) << "\n"
       << "  sizes           " << list(d.sizes) << "\n"
       << "  lambda          " << d.lambda << " (linear | quadratic)\n"
       << "  control         true\n";
    return os.str();
}

}  // namespace mbasis
