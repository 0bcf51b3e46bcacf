#include "dbo/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <utility>

#include "json.hpp"

#include "dbo/errors.hpp"
#include "dbo/hyper_logreg.hpp"
#include "dbo/ingest.hpp"
#include "dbo/quadratic.hpp"
#include "dbo/synth.hpp"

namespace dbo {

namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

ordered_json json_optional(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<double> optional_field(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

RunRecord record_from_json(const ordered_json& j) {
    RunRecord r;
    r.t = j.at("t").get<long long>();
    r.upper_loss = j.at("upper_loss").get<double>();
    r.val_accuracy = optional_field(j, "val_accuracy");
    r.grad_norm_sq = optional_field(j, "grad_norm_sq");
    r.y_gap_sq = optional_field(j, "y_gap_sq");
    r.consensus_x = j.at("consensus_x").get<double>();
    r.consensus_y = j.at("consensus_y").get<double>();
    const auto& c = j.at("counters");
    r.counters.grad_evals = c.at("grad_evals").get<long long>();
    r.counters.jvp_evals = c.at("jvp_evals").get<long long>();
    r.counters.hvp_evals = c.at("hvp_evals").get<long long>();
    r.counters.comm_rounds = c.at("comm_rounds").get<long long>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
    return r;
}

}  // namespace

bool same_results(const RunRecord& a, const RunRecord& b) {
    return a.t == b.t && a.upper_loss == b.upper_loss && a.val_accuracy == b.val_accuracy &&
           a.grad_norm_sq == b.grad_norm_sq && a.y_gap_sq == b.y_gap_sq &&
           a.consensus_x == b.consensus_x && a.consensus_y == b.consensus_y &&
           a.counters.grad_evals == b.counters.grad_evals &&
           a.counters.jvp_evals == b.counters.jvp_evals &&
           a.counters.hvp_evals == b.counters.hvp_evals &&
           a.counters.comm_rounds == b.counters.comm_rounds;
}

RecordFormat record_format_from_string(const std::string& name) {
    if (name == "jsonl") return RecordFormat::jsonl;
    if (name == "csv") return RecordFormat::csv;
    throw ConfigError("unknown record format '" + name + "'");
}

std::string to_json_line(const RunRecord& r) {
    ordered_json j;
    j["t"] = r.t;
    j["upper_loss"] = r.upper_loss;
    j["val_accuracy"] = json_optional(r.val_accuracy);
    j["grad_norm_sq"] = json_optional(r.grad_norm_sq);
    j["y_gap_sq"] = json_optional(r.y_gap_sq);
    j["consensus_x"] = r.consensus_x;
    j["consensus_y"] = r.consensus_y;
    j["counters"] = ordered_json{{"grad_evals", r.counters.grad_evals},
                                 {"jvp_evals", r.counters.jvp_evals},
                                 {"hvp_evals", r.counters.hvp_evals},
                                 {"comm_rounds", r.counters.comm_rounds}};
    j["wall_clock_s"] = r.wall_clock_s;
    return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
    try {
        return record_from_json(ordered_json::parse(line));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad record line: ") + e.what(), 1);
    }
}

std::string csv_header() {
    return "t,upper_loss,val_accuracy,grad_norm_sq,y_gap_sq,consensus_x,consensus_y,"
           "grad_evals,jvp_evals,hvp_evals,comm_rounds,wall_clock_s";
}

std::string to_csv_line(const RunRecord& r) {
    std::string out = std::to_string(r.t);
    out += ',' + fmt_double(r.upper_loss);
    out += ',' + csv_cell(r.val_accuracy);
    out += ',' + csv_cell(r.grad_norm_sq);
    out += ',' + csv_cell(r.y_gap_sq);
    out += ',' + fmt_double(r.consensus_x);
    out += ',' + fmt_double(r.consensus_y);
    out += ',' + std::to_string(r.counters.grad_evals);
    out += ',' + std::to_string(r.counters.jvp_evals);
    out += ',' + std::to_string(r.counters.hvp_evals);
    out += ',' + std::to_string(r.counters.comm_rounds);
    out += ',' + fmt_double(r.wall_clock_s);
    return out;
}

RecordWriter::RecordWriter(std::ostream& out, RecordFormat format) : out_(out), format_(format) {}

void RecordWriter::write(const RunRecord& r) {
    if (format_ == RecordFormat::csv) {
        if (!header_written_) {
            out_ << csv_header() << '\n';
            header_written_ = true;
        }
        out_ << to_csv_line(r) << '\n';
    } else {
        out_ << to_json_line(r) << '\n';
    }
    out_.flush();
    if (!out_) throw IoError("failed writing a record");
}

std::optional<double> grad_norm_oracle(const BilevelProblem& problem, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
    if (const auto* quad = dynamic_cast<const QuadraticBilevel*>(&problem)) {
        return quadratic_oracle_hypergrad(*quad, x).squaredNorm();
    }
    const int K = problem.node_count();
    const int dy = problem.dim_y();
    Eigen::VectorXd gy = Eigen::VectorXd::Zero(dy);
    Eigen::VectorXd gx = Eigen::VectorXd::Zero(problem.dim_x());
    for (int k = 0; k < K; ++k) {
        const Batch upper = full_batch(problem.upper_sample_count(k));
        gy += problem.grad_y_f(k, x, y, upper);
        gx += problem.grad_x_f(k, x, y, upper);
    }
    gy /= static_cast<double>(K);
    gx /= static_cast<double>(K);

    const auto apply_hessian = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dy);
        for (int k = 0; k < K; ++k) {
            acc += problem.hvp_yy_g(k, x, y, full_batch(problem.sample_count(k)), v);
        }
        return (acc / static_cast<double>(K)).eval();
    };

    // Conjugate gradient on the full-batch lower Hessian.
    const double tol = 1e-8 * std::max(1.0, gy.norm());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dy);
    Eigen::VectorXd resid = gy;
    Eigen::VectorXd dir = resid;
    double rs = resid.squaredNorm();
    bool converged = std::sqrt(rs) <= tol;
    const long max_iters = 10L * dy;
    for (long it = 0; it < max_iters && !converged; ++it) {
        const Eigen::VectorXd hd = apply_hessian(dir);
        const double curvature = dir.dot(hd);
        if (!(curvature > 0.0) || !std::isfinite(curvature)) break;
        const double step = rs / curvature;
        w += step * dir;
        resid -= step * hd;
        const double rs_next = resid.squaredNorm();
        if (std::sqrt(rs_next) <= tol) {
            converged = true;
            break;
        }
        dir = resid + (rs_next / rs) * dir;
        rs = rs_next;
    }
    if (!converged) return std::nullopt;

    Eigen::VectorXd cross = Eigen::VectorXd::Zero(problem.dim_x());
    for (int k = 0; k < K; ++k) {
        cross += problem.jvp_xy_g(k, x, y, full_batch(problem.sample_count(k)), w);
    }
    cross /= static_cast<double>(K);
    return (gx - cross).squaredNorm();
}

Experiment build_experiment(const RunConfig& cfg) {
    cfg.validate();
    Experiment exp;
    const Graph graph = build_topology(cfg.topology, cfg.nodes);
    exp.mixing = build_mixing(graph, cfg.mixing);
    exp.hyper = cfg.hyper;
    if (cfg.problem == "quadratic") {
        auto spec = cfg.quad;
        spec.node_count = cfg.nodes;
        auto quad = std::make_unique<QuadraticBilevel>(QuadraticBilevel::random(spec));
        if (exp.hyper.l_gy == 0.0 || exp.hyper.mu == 0.0) {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad->A());
            if (exp.hyper.l_gy == 0.0) exp.hyper.l_gy = es.eigenvalues().maxCoeff();
            if (exp.hyper.mu == 0.0) exp.hyper.mu = es.eigenvalues().minCoeff();
        }
        exp.problem = std::move(quad);
    } else {
        if (!(cfg.hyper.l_gy > 0.0)) {
            throw ConfigError("hyperlogreg needs an explicit l_gy for the estimator");
        }
        Dataset all = cfg.data_path.empty() ? synth_binary_corpus()
                                            : load_libsvm(cfg.data_path, cfg.forced_d);
        if (cfg.max_samples > 0) all = subsample(all, cfg.max_samples, cfg.data_seed);
        auto [train, val] = split_train_val(all, cfg.val_fraction, cfg.data_seed);
        ShardPlan train_plan = shard_iid(train, cfg.nodes, cfg.data_seed);
        ShardPlan val_plan = shard_iid(val, cfg.nodes, cfg.data_seed);
        exp.problem = std::make_unique<HyperLogRegProblem>(std::move(train), std::move(val),
                                                           std::move(train_plan),
                                                           std::move(val_plan));
    }
    return exp;
}

namespace {

RunRecord snapshot(const BilevelProblem& problem, const SwarmState& state, double elapsed_s) {
    RunRecord rec;
    rec.t = state.t;
    const auto [xbar, ybar] = mean_iterate(state);
    const Evaluation eval = evaluate(problem, xbar, ybar);
    rec.upper_loss = eval.upper_loss;
    rec.val_accuracy = eval.accuracy;
    rec.grad_norm_sq = grad_norm_oracle(problem, xbar, ybar);
    if (const auto* quad = dynamic_cast<const QuadraticBilevel*>(&problem)) {
        rec.y_gap_sq = (ybar - quadratic_oracle_y_star(*quad, xbar)).squaredNorm();
    }
    rec.consensus_x = consensus_error(state.X);
    rec.consensus_y = consensus_error(state.Y);
    for (const auto& c : state.counters) {
        rec.counters.grad_evals += c.grad_evals;
        rec.counters.jvp_evals += c.jvp_evals;
        rec.counters.hvp_evals += c.hvp_evals;
        rec.counters.comm_rounds += c.comm_rounds;
    }
    rec.wall_clock_s = elapsed_s;

    const auto finite = [](const std::optional<double>& v) { return !v || std::isfinite(*v); };
    if (!std::isfinite(rec.upper_loss) || !std::isfinite(rec.consensus_x) ||
        !std::isfinite(rec.consensus_y) || !finite(rec.val_accuracy) ||
        !finite(rec.grad_norm_sq) || !finite(rec.y_gap_sq)) {
        throw DivergenceError("evaluation produced a non-finite value", state.t);
    }
    return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const RunConfig& cfg, RecordWriter* writer) {
    const Experiment exp = build_experiment(cfg);

    std::ofstream file;
    std::optional<RecordWriter> owned;
    if (writer == nullptr && !cfg.output_path.empty()) {
        file.open(cfg.output_path);
        if (!file) throw IoError("cannot open output path: " + cfg.output_path);
        owned.emplace(file, record_format_from_string(cfg.output_format));
        writer = &*owned;
    }

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    SwarmState state = init_state(*exp.problem, exp.mixing, cfg.algo, exp.hyper, cfg.seed);
    std::vector<RunRecord> records;
    const auto emit = [&] {
        records.push_back(snapshot(*exp.problem, state, elapsed()));
        if (writer != nullptr) writer->write(records.back());
    };
    emit();
    for (long long t = 1; t <= cfg.iters; ++t) {
        step(state, *exp.problem, exp.mixing, cfg.algo, exp.hyper, cfg.seed);
        if (t % cfg.eval_every == 0 || t == cfg.iters) emit();
    }
    return records;
}

std::vector<RunRecord> read_jsonl_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open records file: " + path);
    std::vector<RunRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(ordered_json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad record line: ") + e.what(), line_no);
        }
    }
    return records;
}

std::string summarize_records(const std::vector<RunRecord>& records) {
    ordered_json j;
    j["records"] = records.size();
    if (!records.empty()) {
        const RunRecord& first = records.front();
        const RunRecord& last = records.back();
        double min_loss = first.upper_loss;
        for (const auto& r : records) min_loss = std::min(min_loss, r.upper_loss);
        j["first_t"] = first.t;
        j["last_t"] = last.t;
        j["first_upper_loss"] = first.upper_loss;
        j["last_upper_loss"] = last.upper_loss;
        j["min_upper_loss"] = min_loss;
        j["last_val_accuracy"] = json_optional(last.val_accuracy);
        j["last_grad_norm_sq"] = json_optional(last.grad_norm_sq);
        j["last_consensus_x"] = last.consensus_x;
        j["last_consensus_y"] = last.consensus_y;
        j["counters"] = ordered_json{{"grad_evals", last.counters.grad_evals},
                                     {"jvp_evals", last.counters.jvp_evals},
                                     {"hvp_evals", last.counters.hvp_evals},
                                     {"comm_rounds", last.counters.comm_rounds}};
        j["wall_clock_s"] = last.wall_clock_s;
    }
    return j.dump(2);
}

}  // namespace dbo
