#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dbo {

enum class TopologyKind { ring, complete, star };
enum class MixingScheme { uniform_neighbor, metropolis };

TopologyKind topology_from_string(const std::string& name);
MixingScheme scheme_from_string(const std::string& name);
std::string to_string(TopologyKind kind);
std::string to_string(MixingScheme scheme);

// Undirected connected graph on nodes [0, node_count).  Edges are stored once
// (u < v) with a multiplicity: a 2-ring reaches the same peer through both
// neighbor slots, which matters for the mixing weights.
struct Edge {
    int u = 0;
    int v = 0;
    int mult = 1;
};

struct Graph {
    int node_count = 0;
    std::vector<Edge> edges;

    // Neighbor-slot degree: sum of multiplicities of incident edges.
    std::vector<int> degrees() const;
    bool connected() const;
};

struct MixingMatrix {
    Eigen::MatrixXd weights;
    double lambda = 0.0;        // max |eigenvalue| over the non-leading spectrum
    double spectral_gap = 0.0;  // 1 - lambda
};

struct Spectrum {
    double lambda = 0.0;
    double gap = 0.0;
};

Graph build_topology(TopologyKind kind, int node_count);

// uniform_neighbor: weight mult/(deg+1) per edge, 1/(deg+1) on the diagonal;
// regular graphs only.  metropolis: mult/(1 + max(deg_u, deg_v)) per edge,
// diagonal fills the row to 1; any connected graph.
MixingMatrix build_mixing(const Graph& graph, MixingScheme scheme);

// lambda = max |eigenvalue| after removing one copy of the leading 1.
// Fails if the leading eigenvalue is not 1 (to 1e-10) or lambda >= 1 - 1e-12.
Spectrum spectral_gap(const Eigen::MatrixXd& weights);

}  // namespace dbo
