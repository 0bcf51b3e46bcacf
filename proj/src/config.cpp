#include "dbo/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dbo/errors.hpp"

namespace dbo {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError("config key '" + key + "' has unparseable value '" + value + "'");
    }
    return out;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ParseError("empty config key", line_no);
        if (kv.count(key)) throw ParseError("duplicate config key '" + key + "'", line_no);
        kv[key] = value;
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like key=value, got '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("override must look like key=value, got '" + assignment + "'");
    kv[key] = value;
}

void RunConfig::validate() const {
    if (problem != "quadratic" && problem != "hyperlogreg") {
        throw ConfigError("unknown problem '" + problem + "'");
    }
    if (output_format != "jsonl" && output_format != "csv") {
        throw ConfigError("output_format must be jsonl or csv");
    }
    if (nodes < 1) throw ConfigError("nodes must be at least 1");
    if (iters < 1) throw ConfigError("iters must be at least 1");
    if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
    if (!(val_fraction > 0.0) || !(val_fraction < 1.0)) {
        throw ConfigError("val_fraction must lie in (0, 1)");
    }
    if (hyper.J < 0) throw ConfigError("neumann_j must be non-negative");
    if (hyper.l_gy < 0.0) throw ConfigError("l_gy must be non-negative");
    algo.validate();
}

RunConfig run_config_from(const KeyValues& kv) {
    RunConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "topology") cfg.topology = topology_from_string(value);
        else if (key == "nodes") cfg.nodes = parse_number<int>(key, value);
        else if (key == "mixing") cfg.mixing = scheme_from_string(value);
        else if (key == "problem") cfg.problem = value;
        else if (key == "dim_x") cfg.quad.dim_x = parse_number<int>(key, value);
        else if (key == "dim_y") cfg.quad.dim_y = parse_number<int>(key, value);
        else if (key == "samples_per_node") cfg.quad.samples_per_node = parse_number<long>(key, value);
        else if (key == "lambda_min") cfg.quad.lambda_min = parse_number<double>(key, value);
        else if (key == "lambda_max") cfg.quad.lambda_max = parse_number<double>(key, value);
        else if (key == "coupling") cfg.quad.coupling = parse_number<double>(key, value);
        else if (key == "rho") cfg.quad.rho = parse_number<double>(key, value);
        else if (key == "noise_sigma") cfg.quad.noise_sigma = parse_number<double>(key, value);
        else if (key == "hetero_scale") cfg.quad.hetero_scale = parse_number<double>(key, value);
        else if (key == "problem_seed") cfg.quad.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "data_path") cfg.data_path = value;
        else if (key == "val_fraction") cfg.val_fraction = parse_number<double>(key, value);
        else if (key == "max_samples") cfg.max_samples = parse_number<long>(key, value);
        else if (key == "forced_d") cfg.forced_d = parse_number<int>(key, value);
        else if (key == "data_seed") cfg.data_seed = parse_number<std::uint64_t>(key, value);
        else if (key == "neumann_j") cfg.hyper.J = parse_number<int>(key, value);
        else if (key == "l_gy") cfg.hyper.l_gy = parse_number<double>(key, value);
        else if (key == "mu") cfg.hyper.mu = parse_number<double>(key, value);
        else if (key == "algo") cfg.algo.algo = algo_from_string(value);
        else if (key == "eta") cfg.algo.eta = parse_number<double>(key, value);
        else if (key == "beta1") cfg.algo.beta1 = parse_number<double>(key, value);
        else if (key == "beta2") cfg.algo.beta2 = parse_number<double>(key, value);
        else if (key == "alpha1") cfg.algo.alpha1 = parse_number<double>(key, value);
        else if (key == "alpha2") cfg.algo.alpha2 = parse_number<double>(key, value);
        else if (key == "batch_size") cfg.algo.batch_size = parse_number<long>(key, value);
        else if (key == "init_batch") cfg.algo.init_batch = parse_number<long>(key, value);
        else if (key == "iters") cfg.iters = parse_number<long long>(key, value);
        else if (key == "eval_every") cfg.eval_every = parse_number<long>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "output_path") cfg.output_path = value;
        else if (key == "output_format") cfg.output_format = value;
        else if (key == "y_radius") cfg.y_radius = parse_number<double>(key, value);
        else if (key == "l_fx") cfg.l_fx = parse_number<double>(key, value);
        else if (key == "l_fy") cfg.l_fy = parse_number<double>(key, value);
        else if (key == "c_fy") cfg.c_fy = parse_number<double>(key, value);
        else if (key == "c_gxy") cfg.c_gxy = parse_number<double>(key, value);
        else if (key == "l_gxy") cfg.l_gxy = parse_number<double>(key, value);
        else if (key == "l_gyy") cfg.l_gyy = parse_number<double>(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    cfg.quad.node_count = cfg.nodes;
    cfg.validate();
    return cfg;
}

}  // namespace dbo
