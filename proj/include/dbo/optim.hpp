#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dbo/hypergrad.hpp"
#include "dbo/problem.hpp"
#include "dbo/topology.hpp"

namespace dbo {

enum class Algo { mdbo, vrdbo, dsbo, gdsbo };

Algo algo_from_string(const std::string& name);
std::string to_string(Algo algo);

// Step sizes and estimator rates shared by all four methods.  The momentum
// methods accept the boundary rate alpha*eta = 1 (estimator degenerates to the
// raw stochastic gradient), and reject anything beyond it.
struct AlgoConfig {
    Algo algo = Algo::mdbo;
    double eta = 0.1;     // step scale, in (0, 1]
    double beta1 = 1.0;   // upper-level direction weight
    double beta2 = 1.0;   // lower-level direction weight
    double alpha1 = 1.0;  // upper estimator rate
    double alpha2 = 1.0;  // lower estimator rate
    long batch_size = 1;
    long init_batch = 1;  // first-draw batch for the variance-reduced method

    void validate() const;
};

// Work performed by one node.  grad_evals counts per-sample first-order
// gradient evaluations (batches times batch size); jvp/hvp count second-order
// products; comm_rounds counts neighbor exchanges.
struct Counters {
    long long grad_evals = 0;
    long long jvp_evals = 0;
    long long hvp_evals = 0;
    long long comm_rounds = 0;
};

// Column k of every matrix belongs to node k.  prev_X/prev_Y hold the iterate
// the variance-reduced difference term is replayed at; prev_U/prev_V hold the
// estimators entering the last executed iteration.  pending carries the
// initialization draw costs until the first step charges them.
struct SwarmState {
    Eigen::MatrixXd X, Y;
    Eigen::MatrixXd U, V;
    Eigen::MatrixXd ZF, Zg;
    Eigen::MatrixXd prev_X, prev_Y;
    Eigen::MatrixXd prev_U, prev_V;
    long long t = 0;  // iterations completed
    std::vector<Counters> counters;
    std::vector<Counters> pending;
};

// All nodes start from identical columns (empty x0/y0 mean zeros).  U and V
// hold fresh stochastic estimates at the start point — batch_size samples, or
// init_batch for the variance-reduced method — and the tracked directions
// start at ZF = U, Zg = V.
SwarmState init_state(const BilevelProblem& problem, const MixingMatrix& W,
                      const AlgoConfig& cfg, const HypergradParams& hyper, std::uint64_t seed,
                      const Eigen::VectorXd& x0 = Eigen::VectorXd(),
                      const Eigen::VectorXd& y0 = Eigen::VectorXd());

// Executes iteration state.t in place: fresh per-node estimates, estimator
// update, tracked-direction exchange, parameter update.  Sampling streams
// derive from (seed, node, iteration, purpose), so a run is reproducible from
// (config, seed) alone.  Non-finite parameters raise DivergenceError carrying
// the iteration index.
void step(SwarmState& state, const BilevelProblem& problem, const MixingMatrix& W,
          const AlgoConfig& cfg, const HypergradParams& hyper, std::uint64_t seed);

// Network averages (x_bar, y_bar) with fixed-order summation.
std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_iterate(const SwarmState& state);

// M * W as K weighted column combinations, neighbors in ascending node order.
Eigen::MatrixXd mix_columns(const Eigen::MatrixXd& M, const MixingMatrix& W);

// Fixed-order column mean (ascending column index).
Eigen::VectorXd column_mean(const Eigen::MatrixXd& M);

// (1/K) sum_k ||col_k - mean||^2, the consensus error of a stacked iterate.
double consensus_error(const Eigen::MatrixXd& M);

}  // namespace dbo
