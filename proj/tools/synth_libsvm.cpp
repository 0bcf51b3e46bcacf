#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dbo/ingest.hpp"
#include "dbo/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the deterministic stand-in corpus in LIBSVM format"};
    std::string out_path;
    long rows = 32561;
    int features = 123;
    int row_features = 14;
    std::uint64_t seed = 9;
    app.add_option("output", out_path, "Destination file")->required();
    app.add_option("--rows", rows, "Row count");
    app.add_option("--features", features, "Feature-space dimension");
    app.add_option("--row-features", row_features, "Active features per row");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        const dbo::Dataset data = dbo::synth_binary_corpus(rows, features, seed, row_features);
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot open " << out_path << "\n";
            return 1;
        }
        out << dbo::serialize_libsvm(data);
        out.close();
        long positives = 0;
        for (const int label : data.labels) positives += label == data.labels[0] ? 0 : 1;
        std::cerr << "wrote " << data.n << " rows, d=" << data.d << ", minority share "
                  << static_cast<double>(positives) / static_cast<double>(data.n) << " to "
                  << out_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
