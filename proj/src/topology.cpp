#include "dbo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "dbo/errors.hpp"

namespace dbo {

TopologyKind topology_from_string(const std::string& name) {
    if (name == "ring") return TopologyKind::ring;
    if (name == "complete") return TopologyKind::complete;
    if (name == "star") return TopologyKind::star;
    throw ConfigError("unknown topology: " + name);
}

MixingScheme scheme_from_string(const std::string& name) {
    if (name == "uniform_neighbor") return MixingScheme::uniform_neighbor;
    if (name == "metropolis") return MixingScheme::metropolis;
    throw ConfigError("unknown mixing scheme: " + name);
}

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::ring: return "ring";
        case TopologyKind::complete: return "complete";
        case TopologyKind::star: return "star";
    }
    return "?";
}

std::string to_string(MixingScheme scheme) {
    return scheme == MixingScheme::uniform_neighbor ? "uniform_neighbor" : "metropolis";
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(node_count, 0);
    for (const Edge& e : edges) {
        deg[e.u] += e.mult;
        deg[e.v] += e.mult;
    }
    return deg;
}

bool Graph::connected() const {
    if (node_count <= 0) return false;
    std::vector<std::vector<int>> adj(node_count);
    for (const Edge& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(node_count, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++visited;
                stack.push_back(v);
            }
        }
    }
    return visited == node_count;
}

static void validate(const Graph& g) {
    if (g.node_count <= 0) throw InvalidSizeError("graph must have at least one node");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g.edges) {
        if (e.u < 0 || e.u >= g.node_count || e.v < 0 || e.v >= g.node_count)
            throw ContractViolationError("edge endpoint out of range");
        if (e.u == e.v) throw ContractViolationError("self-loops are not stored as edges");
        if (e.mult < 1) throw ContractViolationError("edge multiplicity must be positive");
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) throw ContractViolationError("duplicate edge");
    }
    if (!g.connected()) throw ContractViolationError("graph is not connected");
}

Graph build_topology(TopologyKind kind, int node_count) {
    if (node_count <= 0) throw InvalidSizeError("node count must be positive");
    Graph g;
    g.node_count = node_count;
    switch (kind) {
        case TopologyKind::ring:
            if (node_count == 2) {
                g.edges.push_back({0, 1, 2});  // both neighbor slots reach the same peer
            } else if (node_count >= 3) {
                for (int i = 0; i < node_count; ++i)
                    g.edges.push_back({std::min(i, (i + 1) % node_count),
                                       std::max(i, (i + 1) % node_count), 1});
            }
            break;
        case TopologyKind::complete:
            for (int i = 0; i < node_count; ++i)
                for (int j = i + 1; j < node_count; ++j) g.edges.push_back({i, j, 1});
            break;
        case TopologyKind::star:
            for (int j = 1; j < node_count; ++j) g.edges.push_back({0, j, 1});
            break;
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    return g;
}

MixingMatrix build_mixing(const Graph& graph, MixingScheme scheme) {
    validate(graph);
    const int K = graph.node_count;
    const std::vector<int> deg = graph.degrees();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(K, K);

    if (scheme == MixingScheme::uniform_neighbor) {
        for (int i = 1; i < K; ++i)
            if (deg[i] != deg[0])
                throw SchemeMismatchError(
                    "uniform_neighbor requires a regular graph; node degrees differ");
        const double w = 1.0 / (deg[0] + 1);
        for (const Edge& e : graph.edges) {
            W(e.u, e.v) = e.mult * w;
            W(e.v, e.u) = e.mult * w;
        }
        for (int i = 0; i < K; ++i) W(i, i) = w;
    } else {
        for (const Edge& e : graph.edges) {
            const double w = e.mult / (1.0 + std::max(deg[e.u], deg[e.v]));
            W(e.u, e.v) = w;
            W(e.v, e.u) = w;
        }
        for (int i = 0; i < K; ++i) W(i, i) = 1.0 - W.row(i).sum();
    }

    MixingMatrix m;
    m.weights = W;
    const Spectrum s = spectral_gap(W);
    m.lambda = s.lambda;
    m.spectral_gap = s.gap;
    return m;
}

Spectrum spectral_gap(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols() || weights.rows() < 1)
        throw InvalidSizeError("mixing matrix must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weights);
    if (solver.info() != Eigen::Success)
        throw AssumptionViolationError("eigendecomposition failed");
    const Eigen::VectorXd ev = solver.eigenvalues();  // ascending
    const int n = static_cast<int>(ev.size());
    if (std::abs(ev(n - 1) - 1.0) > 1e-10)
        throw AssumptionViolationError("leading eigenvalue is not 1; matrix is not a valid "
                                       "doubly stochastic mixing matrix");
    double lambda = 0.0;
    for (int i = 0; i < n - 1; ++i) lambda = std::max(lambda, std::abs(ev(i)));
    if (lambda >= 1.0 - 1e-12)
        throw AssumptionViolationError(
            "second-largest eigenvalue magnitude reaches 1; consensus would not contract");
    return {lambda, 1.0 - lambda};
}

}  // namespace dbo
