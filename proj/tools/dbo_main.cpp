#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dbo/config.hpp"
#include "dbo/errors.hpp"
#include "dbo/harness.hpp"
#include "dbo/theory.hpp"

namespace {

using nlohmann::ordered_json;

struct FlagOverrides {
    std::vector<std::pair<std::string, std::string>> entries;

    void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& value) { entries.emplace_back(key, value); },
            help);
    }
};

dbo::RunConfig assemble_config(const std::string& config_path,
                               const std::vector<std::string>& overrides,
                               const FlagOverrides& flags) {
    dbo::KeyValues kv = dbo::load_key_values(config_path);
    for (const auto& assignment : overrides) dbo::apply_override(kv, assignment);
    for (const auto& [key, value] : flags.entries) kv[key] = value;
    return dbo::run_config_from(kv);
}

int do_run(const dbo::RunConfig& cfg) {
    if (cfg.output_path.empty()) {
        dbo::RecordWriter writer(std::cout, dbo::record_format_from_string(cfg.output_format));
        dbo::run_experiment(cfg, &writer);
    } else {
        const auto records = dbo::run_experiment(cfg);
        std::cerr << "wrote " << records.size() << " records to " << cfg.output_path << "\n";
    }
    return 0;
}

int do_bounds(const dbo::RunConfig& cfg) {
    const dbo::Graph graph = dbo::build_topology(cfg.topology, cfg.nodes);
    const dbo::MixingMatrix mixing = dbo::build_mixing(graph, cfg.mixing);

    dbo::ProblemConstants c;
    if (cfg.problem == "quadratic") {
        auto spec = cfg.quad;
        spec.node_count = cfg.nodes;
        const dbo::QuadraticBilevel quad = dbo::QuadraticBilevel::random(spec);
        c = dbo::constants_quadratic(quad, cfg.y_radius, cfg.hyper.J);
    } else {
        c.mu = cfg.hyper.mu;
        c.l_gy = cfg.hyper.l_gy;
        c.l_fx = cfg.l_fx;
        c.l_fy = cfg.l_fy;
        c.c_fy = cfg.c_fy;
        c.c_gxy = cfg.c_gxy;
        c.l_gxy = cfg.l_gxy;
        c.l_gyy = cfg.l_gyy;
        c.sigma = cfg.quad.noise_sigma;
        c.neumann_j = cfg.hyper.J;
        c = dbo::derive_constants(c);
    }

    dbo::StepSizeBounds b;
    std::string method;
    if (cfg.algo.algo == dbo::Algo::vrdbo) {
        b = dbo::vrdbo_bounds(c, cfg.algo.alpha1, cfg.algo.alpha2, mixing.lambda, cfg.nodes);
        method = "vrdbo";
    } else {
        b = dbo::mdbo_bounds(c, cfg.algo.alpha1, cfg.algo.alpha2, mixing.lambda);
        method = "mdbo";
    }

    ordered_json out;
    out["method"] = method;
    out["lambda"] = mixing.lambda;
    out["node_count"] = cfg.nodes;
    out["constants"] = ordered_json{{"mu", c.mu},
                                    {"l_gy", c.l_gy},
                                    {"l_fx", c.l_fx},
                                    {"l_fy", c.l_fy},
                                    {"c_fy", c.c_fy},
                                    {"c_gxy", c.c_gxy},
                                    {"l_gxy", c.l_gxy},
                                    {"l_gyy", c.l_gyy},
                                    {"sigma", c.sigma},
                                    {"neumann_j", c.neumann_j},
                                    {"l_y", c.l_y},
                                    {"l_f", c.l_f},
                                    {"l_f_star", c.l_f_star},
                                    {"l_ftilde", c.l_ftilde},
                                    {"sigma_ftilde", c.sigma_ftilde}};
    out["beta1"] = ordered_json{
        {"a", b.beta1_a}, {"b", b.beta1_b}, {"c", b.beta1_c}, {"max", b.beta1_max}};
    out["beta2"] = ordered_json{
        {"a", b.beta2_a}, {"b", b.beta2_b}, {"c", b.beta2_c}, {"max", b.beta2_max}};
    out["eta_max"] = b.eta_max;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int do_inspect(const std::string& path) {
    const auto records = dbo::read_jsonl_records(path);
    std::cout << dbo::summarize_records(records) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized stochastic bilevel optimization simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    FlagOverrides flags;

    auto* run = app.add_subcommand("run", "Execute an experiment and stream its records");
    run->add_option("--config", config_path, "Config file (key = value lines)")->required();
    run->add_option("overrides", overrides, "key=value settings applied after the file");
    flags.bind(run, "--algo", "algo", "Method: mdbo, vrdbo, dsbo, gdsbo");
    flags.bind(run, "--eta", "eta", "Learning rate");
    flags.bind(run, "--beta1", "beta1", "Upper step-size factor");
    flags.bind(run, "--beta2", "beta2", "Lower step-size factor");
    flags.bind(run, "--alpha1", "alpha1", "Upper momentum weight");
    flags.bind(run, "--alpha2", "alpha2", "Lower momentum weight");
    flags.bind(run, "--batch-size", "batch_size", "Per-node batch size");
    flags.bind(run, "--init-batch", "init_batch", "First-draw batch (variance-reduced method)");
    flags.bind(run, "--iters", "iters", "Iteration count");
    flags.bind(run, "--seed", "seed", "Master seed");
    flags.bind(run, "--output", "output_path", "Records file (default: stdout)");
    flags.bind(run, "--format", "output_format", "jsonl or csv");

    auto* bounds = app.add_subcommand("bounds", "Print admissible step sizes as JSON");
    bounds->add_option("--config", config_path, "Config file (key = value lines)")->required();
    bounds->add_option("overrides", overrides, "key=value settings applied after the file");

    std::string records_path;
    auto* inspect = app.add_subcommand("inspect", "Summarize a JSONL record stream");
    inspect->add_option("records", records_path, "records.jsonl path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(assemble_config(config_path, overrides, flags));
        if (bounds->parsed()) return do_bounds(assemble_config(config_path, overrides, flags));
        return do_inspect(records_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
