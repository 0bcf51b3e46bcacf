#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbo/config.hpp"
#include "dbo/optim.hpp"
#include "dbo/problem.hpp"
#include "dbo/topology.hpp"

namespace dbo {

// One metrics snapshot, evaluated at the network-mean iterate.  Optional
// fields stay empty when the problem cannot provide them (no validation set,
// oracle failure, no closed-form inner solution).  Counters are network
// totals.  wall_clock_s is informational only and excluded from equality.
struct RunRecord {
    long long t = 0;
    double upper_loss = 0.0;
    std::optional<double> val_accuracy;
    std::optional<double> grad_norm_sq;
    std::optional<double> y_gap_sq;
    double consensus_x = 0.0;
    double consensus_y = 0.0;
    Counters counters;
    double wall_clock_s = 0.0;
};

// Field-wise equality of the deterministic fields (everything but wall clock).
bool same_results(const RunRecord& a, const RunRecord& b);

enum class RecordFormat { jsonl, csv };
RecordFormat record_format_from_string(const std::string& name);

std::string to_json_line(const RunRecord& r);
RunRecord record_from_json_line(const std::string& line);
std::string csv_header();
std::string to_csv_line(const RunRecord& r);

// Streams records one at a time, flushing after each so partial runs stay
// inspectable; CSV emits its header before the first row.
class RecordWriter {
  public:
    RecordWriter(std::ostream& out, RecordFormat format);
    void write(const RunRecord& r);

  private:
    std::ostream& out_;
    RecordFormat format_;
    bool header_written_ = false;
};

// ||grad F(x)||^2 at the mean iterate.  The quadratic uses its closed form
// (y is ignored); other problems get an implicit-gradient oracle that treats
// y as the inner minimizer approximation and solves the full-batch system
// Hyy w = grad_y f by conjugate gradient to residual 1e-8.  Returns empty if
// CG fails to converge within 10 * dim_y iterations.
std::optional<double> grad_norm_oracle(const BilevelProblem& problem, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y);

// Topology, problem, and estimator parameters assembled from a config.  The
// quadratic derives unset l_gy/mu spectrally; hyperlogreg requires l_gy.
struct Experiment {
    std::unique_ptr<BilevelProblem> problem;
    MixingMatrix mixing;
    HypergradParams hyper;
};

Experiment build_experiment(const RunConfig& cfg);

// Runs cfg.iters steps, evaluating at t = 0, every eval_every steps, and at
// the final step.  Records stream to the writer (when given) as they are
// produced, so a DivergenceError propagates with everything before it already
// flushed.  Deterministic from the config alone, wall clock aside.
std::vector<RunRecord> run_experiment(const RunConfig& cfg, RecordWriter* writer = nullptr);

// Reads back one JSONL record stream (as written by RecordWriter).
std::vector<RunRecord> read_jsonl_records(const std::string& path);

// Summary of a record stream for the CLI inspect subcommand.
std::string summarize_records(const std::vector<RunRecord>& records);

}  // namespace dbo
