#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace dbo {

// Sparse classification dataset in LIBSVM layout.  File indices are 1-based;
// rows store 0-based (index, value) pairs with strictly increasing indices.
// Labels are remapped to class ids 0..c-1 in order of first appearance.
struct Dataset {
    long n = 0;
    int d = 0;
    int c = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<int> labels;

    bool operator==(const Dataset&) const = default;
};

// Sample assignment for K nodes: a permutation of [0, n) cut into K contiguous
// near-equal blocks; node k owns block k.
struct ShardPlan {
    int node_count = 0;
    std::uint64_t seed = 0;
    std::vector<long> assignment;
    std::vector<long> block_start;  // node_count + 1 offsets into assignment

    std::vector<long> node_samples(int k) const;
};

// forced_d = 0 derives d from the largest index in the stream; a positive
// forced_d fixes the dimension and rejects indices beyond it.
Dataset parse_libsvm(std::istream& in, int forced_d = 0);
Dataset parse_libsvm(const std::string& text, int forced_d = 0);
Dataset load_libsvm(const std::string& path, int forced_d = 0);

std::string serialize_libsvm(const Dataset& data);

std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double val_frac,
                                            std::uint64_t seed);

ShardPlan shard_iid(const Dataset& train, int node_count, std::uint64_t seed);

// Uniform subsample without replacement, in original row order; returns the
// dataset unchanged when max_samples >= n or max_samples <= 0.
Dataset subsample(const Dataset& data, long max_samples, std::uint64_t seed);

}  // namespace dbo
