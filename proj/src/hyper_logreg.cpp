#include "dbo/hyper_logreg.hpp"

#include <cmath>

#include "dbo/errors.hpp"

namespace dbo {

namespace {

// Logits z_p = sum_q y[q*c+p] a_q for one sparse row.
Eigen::VectorXd logits(const std::vector<std::pair<int, double>>& row, const Eigen::VectorXd& y,
                       int c) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(c);
    for (const auto& [q, a] : row)
        for (int p = 0; p < c; ++p) z(p) += y(static_cast<long>(q) * c + p) * a;
    return z;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
}

double cross_entropy(const Eigen::VectorXd& z, int label) {
    const double zmax = z.maxCoeff();
    return zmax + std::log((z.array() - zmax).exp().sum()) - z(label);
}

}  // namespace

HyperLogRegProblem::HyperLogRegProblem(Dataset train, Dataset val, ShardPlan train_plan,
                                       ShardPlan val_plan)
    : train_(std::move(train)),
      val_(std::move(val)),
      train_plan_(std::move(train_plan)),
      val_plan_(std::move(val_plan)) {
    if (train_plan_.node_count != val_plan_.node_count)
        throw ConfigError("training and validation shard plans disagree on the node count");
    if (train_.d != val_.d || train_.c != val_.c)
        throw ConfigError("training and validation sets disagree on dimensions");
    if (static_cast<long>(train_plan_.assignment.size()) != train_.n ||
        static_cast<long>(val_plan_.assignment.size()) != val_.n)
        throw ConfigError("shard plan does not cover its dataset");
    d_ = train_.d;
    c_ = train_.c;
    if (c_ < 2) throw ConfigError("need at least two classes");
    const int K = train_plan_.node_count;
    train_ids_.reserve(K);
    val_ids_.reserve(K);
    for (int k = 0; k < K; ++k) {
        train_ids_.push_back(train_plan_.node_samples(k));
        val_ids_.push_back(val_plan_.node_samples(k));
    }
}

long HyperLogRegProblem::sample_count(int k) const {
    if (k < 0 || k >= node_count()) throw ContractViolationError("node index out of range");
    return static_cast<long>(train_ids_[k].size());
}

long HyperLogRegProblem::upper_sample_count(int k) const {
    if (k < 0 || k >= node_count()) throw ContractViolationError("node index out of range");
    return static_cast<long>(val_ids_[k].size());
}

long HyperLogRegProblem::global_train_id(int k, long local) const { return train_ids_[k][local]; }
long HyperLogRegProblem::global_val_id(int k, long local) const { return val_ids_[k][local]; }

Eigen::VectorXd HyperLogRegProblem::grad_x_f(int k, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    check_batch(ids, upper_sample_count(k));
    return Eigen::VectorXd::Zero(dim_x());
}

Eigen::VectorXd HyperLogRegProblem::grad_y_f(int k, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    check_batch(ids, upper_sample_count(k));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_y());
    for (long local : ids) {
        const long i = global_val_id(k, local);
        const auto& row = val_.rows[i];
        Eigen::VectorXd s = softmax(logits(row, y, c_));
        s(val_.labels[i]) -= 1.0;
        for (const auto& [q, a] : row)
            for (int p = 0; p < c_; ++p) g(static_cast<long>(q) * c_ + p) += s(p) * a;
    }
    return g / static_cast<double>(ids.size());
}

Eigen::VectorXd HyperLogRegProblem::grad_y_g(int k, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    check_batch(ids, sample_count(k));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_y());
    for (long local : ids) {
        const long i = global_train_id(k, local);
        const auto& row = train_.rows[i];
        Eigen::VectorXd s = softmax(logits(row, y, c_));
        s(train_.labels[i]) -= 1.0;
        for (const auto& [q, a] : row)
            for (int p = 0; p < c_; ++p) g(static_cast<long>(q) * c_ + p) += s(p) * a;
    }
    g /= static_cast<double>(ids.size());
    const double scale = 2.0 / (static_cast<double>(c_) * d_);
    for (int q = 0; q < d_; ++q) {
        const double w = scale * std::exp(x(q));
        for (int p = 0; p < c_; ++p) g(static_cast<long>(q) * c_ + p) += w * y(static_cast<long>(q) * c_ + p);
    }
    return g;
}

Eigen::VectorXd HyperLogRegProblem::hvp_yy_g(int k, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Batch& ids,
                                             const Eigen::VectorXd& v) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    check_dim(v, dim_y(), "v");
    check_batch(ids, sample_count(k));
    Eigen::VectorXd h = Eigen::VectorXd::Zero(dim_y());
    for (long local : ids) {
        const long i = global_train_id(k, local);
        const auto& row = train_.rows[i];
        const Eigen::VectorXd s = softmax(logits(row, y, c_));
        Eigen::VectorXd w = Eigen::VectorXd::Zero(c_);
        for (const auto& [q, a] : row)
            for (int p = 0; p < c_; ++p) w(p) += v(static_cast<long>(q) * c_ + p) * a;
        const Eigen::VectorXd t = s.cwiseProduct(w) - s.dot(w) * s;
        for (const auto& [q, a] : row)
            for (int p = 0; p < c_; ++p) h(static_cast<long>(q) * c_ + p) += t(p) * a;
    }
    h /= static_cast<double>(ids.size());
    const double scale = 2.0 / (static_cast<double>(c_) * d_);
    for (int q = 0; q < d_; ++q) {
        const double wq = scale * std::exp(x(q));
        for (int p = 0; p < c_; ++p) h(static_cast<long>(q) * c_ + p) += wq * v(static_cast<long>(q) * c_ + p);
    }
    return h;
}

Eigen::VectorXd HyperLogRegProblem::jvp_xy_g(int k, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y, const Batch& ids,
                                             const Eigen::VectorXd& v) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    check_dim(v, dim_y(), "v");
    check_batch(ids, sample_count(k));
    Eigen::VectorXd out(dim_x());
    const double scale = 2.0 / (static_cast<double>(c_) * d_);
    for (int q = 0; q < d_; ++q) {
        double acc = 0.0;
        for (int p = 0; p < c_; ++p)
            acc += y(static_cast<long>(q) * c_ + p) * v(static_cast<long>(q) * c_ + p);
        out(q) = scale * std::exp(x(q)) * acc;
    }
    return out;
}

double HyperLogRegProblem::full_upper_loss(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    double loss = 0.0;
    for (long i = 0; i < val_.n; ++i)
        loss += cross_entropy(logits(val_.rows[i], y, c_), val_.labels[i]);
    return loss / static_cast<double>(val_.n);
}

std::optional<double> HyperLogRegProblem::accuracy(const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& y) const {
    long correct = 0;
    for (long i = 0; i < val_.n; ++i) {
        const Eigen::VectorXd z = logits(val_.rows[i], y, c_);
        int best = 0;
        for (int p = 1; p < c_; ++p)
            if (z(p) > z(best)) best = p;
        if (best == val_.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(val_.n);
}

double HyperLogRegProblem::lower_loss(int k, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    double loss = 0.0;
    for (long i : train_ids_[k])
        loss += cross_entropy(logits(train_.rows[i], y, c_), train_.labels[i]);
    loss /= static_cast<double>(train_ids_[k].size());
    const double scale = 1.0 / (static_cast<double>(c_) * d_);
    for (int q = 0; q < d_; ++q) {
        double acc = 0.0;
        for (int p = 0; p < c_; ++p) {
            const double ypq = y(static_cast<long>(q) * c_ + p);
            acc += ypq * ypq;
        }
        loss += scale * std::exp(x(q)) * acc;
    }
    return loss;
}

}  // namespace dbo
