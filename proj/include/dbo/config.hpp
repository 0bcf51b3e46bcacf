#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dbo/hypergrad.hpp"
#include "dbo/optim.hpp"
#include "dbo/quadratic.hpp"
#include "dbo/topology.hpp"

namespace dbo {

// Flat key = value settings.  Lines are `key = value`, blank, or `#` comments;
// whitespace around tokens is ignored.  Duplicate keys in one file are
// rejected; overrides replace freely.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

// Applies one `key=value` assignment (CLI override form) on top of kv.
void apply_override(KeyValues& kv, const std::string& assignment);

// Everything one experiment needs.  Defaults describe a small quadratic run;
// see the shipped example configs for the full key list.
struct RunConfig {
    // network
    TopologyKind topology = TopologyKind::ring;
    int nodes = 8;
    MixingScheme mixing = MixingScheme::metropolis;

    // problem selection: "quadratic" or "hyperlogreg"
    std::string problem = "quadratic";
    QuadraticBilevel::RandomSpec quad;  // quadratic instance geometry
    std::string data_path;              // hyperlogreg: empty = built-in stand-in corpus
    double val_fraction = 0.3;
    long max_samples = 0;  // 0 = use every sample
    int forced_d = 0;      // 0 = derive the dimension from the file
    std::uint64_t data_seed = 0;

    // hypergradient estimator; l_gy/mu = 0 means "derive from the instance",
    // which only the quadratic supports
    HypergradParams hyper;

    AlgoConfig algo;

    // schedule and output
    long long iters = 100;
    long eval_every = 10;
    std::uint64_t seed = 0;
    std::string output_path;  // empty = caller decides (CLI streams to stdout)
    std::string output_format = "jsonl";

    // constants fed to the step-size calculators; the quadratic derives all of
    // these, other problems must supply them
    double y_radius = 10.0;
    double l_fx = 0.0;
    double l_fy = 0.0;
    double c_fy = 0.0;
    double c_gxy = 0.0;
    double l_gxy = 0.0;
    double l_gyy = 0.0;

    void validate() const;
};

// Builds a RunConfig from merged key-values.  Unknown keys and unparseable
// values raise ConfigError naming the key; the result is validated.
RunConfig run_config_from(const KeyValues& kv);

}  // namespace dbo
