#pragma once

#include <cstdint>

#include "dbo/ingest.hpp"

namespace dbo {

// Deterministic stand-in corpus shaped like the adult-income benchmark:
// binary features, row_features active indices per row, and labels from a
// planted noisy halfspace thresholded so the minority class holds about 24%
// of the rows.  Class ids follow first appearance, so serialize/parse round
// trips reproduce the dataset exactly.
Dataset synth_binary_corpus(long n = 32561, int d = 123, std::uint64_t seed = 9,
                            int row_features = 14);

}  // namespace dbo
