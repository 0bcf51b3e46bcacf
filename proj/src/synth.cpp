#include "dbo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "dbo/errors.hpp"
#include "dbo/rng.hpp"

namespace dbo {

Dataset synth_binary_corpus(long n, int d, std::uint64_t seed, int row_features) {
    if (n < 2) throw InvalidSizeError("corpus needs at least 2 rows");
    if (d < 1) throw InvalidSizeError("corpus needs at least 1 feature");
    const int active = std::clamp(row_features, 1, d);

    Rng wrng(stream_seed(seed, 0, 0, purpose::synth, 1));
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w(j) = wrng.normal();

    Dataset data;
    data.n = n;
    data.d = d;
    data.rows.resize(n);
    data.labels.resize(n);
    std::vector<double> scores(n);
    std::vector<char> taken(d, 0);
    for (long i = 0; i < n; ++i) {
        Rng rng(stream_seed(seed, 0, static_cast<std::uint64_t>(i), purpose::synth, 2));
        std::vector<int> picks;
        picks.reserve(active);
        while (static_cast<int>(picks.size()) < active) {
            const int j = static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(d - 1)));
            if (!taken[j]) {
                taken[j] = 1;
                picks.push_back(j);
            }
        }
        std::sort(picks.begin(), picks.end());
        double s = 0.0;
        auto& row = data.rows[i];
        row.reserve(active);
        for (const int j : picks) {
            taken[j] = 0;
            row.emplace_back(j, 1.0);
            s += w(j);
        }
        scores[i] = s + 0.5 * rng.normal();
    }

    // Threshold at the 76th percentile of the planted scores, so rows above it
    // form the ~24% minority.
    std::vector<double> sorted = scores;
    const long cut = static_cast<long>(std::floor(0.76 * static_cast<double>(n)));
    std::nth_element(sorted.begin(), sorted.begin() + cut, sorted.end());
    const double threshold = sorted[cut];
    for (long i = 0; i < n; ++i) data.labels[i] = scores[i] >= threshold ? 1 : 0;

    // Canonical class ids in order of first appearance.
    if (data.labels[0] == 1) {
        for (auto& label : data.labels) label ^= 1;
    }
    data.c = 2;
    return data;
}

}  // namespace dbo
