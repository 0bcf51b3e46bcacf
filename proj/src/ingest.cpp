#include "dbo/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dbo/errors.hpp"
#include "dbo/rng.hpp"

namespace dbo {

std::vector<long> ShardPlan::node_samples(int k) const {
    return {assignment.begin() + block_start[k], assignment.begin() + block_start[k + 1]};
}

namespace {

double parse_double_token(const std::string& tok, const char* what, long line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty())
        throw ParseError(std::string("expected numeric ") + what + ", got '" + tok + "'", line);
    return v;
}

long parse_index_token(const std::string& tok, long line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size() || tok.empty())
        throw ParseError("expected integer feature index, got '" + tok + "'", line);
    return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, int forced_d) {
    Dataset data;
    std::map<double, int> class_of;
    int max_index = 0;  // 1-based
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string tok;
        fields >> tok;
        const double raw_label = parse_double_token(tok, "label", line_no);
        auto it = class_of.find(raw_label);
        if (it == class_of.end()) it = class_of.emplace(raw_label, data.c++).first;
        data.labels.push_back(it->second);

        std::vector<std::pair<int, double>> row;
        long prev_index = 0;
        while (fields >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw ParseError("expected index:value pair, got '" + tok + "'", line_no);
            const long idx = parse_index_token(tok.substr(0, colon), line_no);
            if (idx < 1) throw ParseError("feature index must be >= 1", line_no);
            if (idx <= prev_index)
                throw ParseError("feature indices must be strictly increasing", line_no);
            if (forced_d > 0 && idx > forced_d)
                throw ParseError("feature index " + std::to_string(idx) +
                                     " exceeds the configured dimension " +
                                     std::to_string(forced_d),
                                 line_no);
            const double val = parse_double_token(tok.substr(colon + 1), "feature value", line_no);
            row.emplace_back(static_cast<int>(idx - 1), val);
            prev_index = idx;
            max_index = std::max(max_index, static_cast<int>(idx));
        }
        data.rows.push_back(std::move(row));
    }
    data.n = static_cast<long>(data.rows.size());
    if (data.n == 0) throw ParseError("empty dataset: no data rows", line_no);
    data.d = forced_d > 0 ? forced_d : max_index;
    return data;
}

Dataset parse_libsvm(const std::string& text, int forced_d) {
    std::istringstream in(text);
    return parse_libsvm(in, forced_d);
}

Dataset load_libsvm(const std::string& path, int forced_d) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path);
    return parse_libsvm(in, forced_d);
}

std::string serialize_libsvm(const Dataset& data) {
    std::string out;
    char buf[64];
    for (long i = 0; i < data.n; ++i) {
        out += std::to_string(data.labels[i]);
        for (const auto& [idx, val] : data.rows[i]) {
            out += ' ';
            out += std::to_string(idx + 1);
            out += ':';
            const auto res = std::to_chars(buf, buf + sizeof buf, val);
            out.append(buf, res.ptr);
        }
        out += '\n';
    }
    return out;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double val_frac,
                                            std::uint64_t seed) {
    if (!(val_frac > 0.0 && val_frac < 1.0))
        throw ConfigError("val_frac must lie strictly between 0 and 1");
    const long n_val = std::lround(val_frac * static_cast<double>(data.n));

    std::vector<long> perm(data.n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(stream_seed(seed, 0, 0, purpose::split));
    for (long i = data.n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_int(0, static_cast<std::uint64_t>(i))]);

    std::vector<long> val_idx(perm.begin(), perm.begin() + n_val);
    std::vector<long> train_idx(perm.begin() + n_val, perm.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    auto take = [&data](const std::vector<long>& idx) {
        Dataset sub;
        sub.n = static_cast<long>(idx.size());
        sub.d = data.d;
        sub.c = data.c;
        sub.rows.reserve(idx.size());
        sub.labels.reserve(idx.size());
        for (long i : idx) {
            sub.rows.push_back(data.rows[i]);
            sub.labels.push_back(data.labels[i]);
        }
        return sub;
    };
    return {take(train_idx), take(val_idx)};
}

ShardPlan shard_iid(const Dataset& train, int node_count, std::uint64_t seed) {
    if (node_count < 1) throw ConfigError("node count must be at least 1");
    if (train.n == 0) throw ConfigError("cannot shard an empty training set");
    if (node_count > train.n)
        throw ConfigError("more nodes than training samples: " + std::to_string(node_count) +
                          " > " + std::to_string(train.n));

    ShardPlan plan;
    plan.node_count = node_count;
    plan.seed = seed;
    plan.assignment.resize(train.n);
    std::iota(plan.assignment.begin(), plan.assignment.end(), 0);
    Rng rng(stream_seed(seed, 0, 0, purpose::shard));
    for (long i = train.n - 1; i > 0; --i)
        std::swap(plan.assignment[i],
                  plan.assignment[rng.uniform_int(0, static_cast<std::uint64_t>(i))]);

    plan.block_start.resize(node_count + 1);
    const long base = train.n / node_count;
    const long extra = train.n % node_count;
    plan.block_start[0] = 0;
    for (int k = 0; k < node_count; ++k)
        plan.block_start[k + 1] = plan.block_start[k] + base + (k < extra ? 1 : 0);
    return plan;
}

Dataset subsample(const Dataset& data, long max_samples, std::uint64_t seed) {
    if (max_samples <= 0 || max_samples >= data.n) return data;
    std::vector<long> perm(data.n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(stream_seed(seed, 0, 0, purpose::shard, 1));
    for (long i = data.n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_int(0, static_cast<std::uint64_t>(i))]);
    std::vector<long> keep(perm.begin(), perm.begin() + max_samples);
    std::sort(keep.begin(), keep.end());

    Dataset sub;
    sub.n = max_samples;
    sub.d = data.d;
    sub.c = data.c;
    sub.rows.reserve(keep.size());
    sub.labels.reserve(keep.size());
    for (long i : keep) {
        sub.rows.push_back(data.rows[i]);
        sub.labels.push_back(data.labels[i]);
    }
    return sub;
}

}  // namespace dbo
