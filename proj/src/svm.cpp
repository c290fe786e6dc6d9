#include "tabml/svm.hpp"

#include "tabml/error.hpp"
#include "tabml/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tabml {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kIterationCap = 10'000'000;

bool in_up(double y, double a, double C) { return (y > 0 && a < C) || (y < 0 && a > 0); }
bool in_low(double y, double a, double C) { return (y > 0 && a > 0) || (y < 0 && a < C); }

struct ViolatingPair {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double gap = 0.0;
};

ViolatingPair max_violating_pair(const Vector& y, const Vector& alpha, const Vector& grad, double C) {
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    ViolatingPair p;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        const double v = -y[t] * grad[t];
        if (in_up(y[t], alpha[t], C) && v > m) {
            m = v;
            p.i = t;
        }
        if (in_low(y[t], alpha[t], C) && v < M) {
            M = v;
            p.j = t;
        }
    }
    p.gap = (p.i < 0 || p.j < 0) ? 0.0 : m - M;
    return p;
}

}  // namespace

double smo_kkt_violation(const Eigen::MatrixXd& features, const Vector& labels, const Vector& alpha, double C) {
    const Eigen::MatrixXd K = features * features.transpose();
    const Vector grad = (labels.asDiagonal() * K * labels.asDiagonal()) * alpha - Vector::Ones(labels.size());
    return std::max(0.0, max_violating_pair(labels, alpha, grad, C).gap);
}

SmoSolution solve_smo(const Eigen::MatrixXd& features, const Vector& labels, const SmoParams& params) {
    if (params.C <= 0 || params.tolerance <= 0) throw Error(ErrorKind::InvalidArgument, "SMO needs C > 0 and tolerance > 0");
    const auto n = labels.size();
    const double C = params.C;
    const Eigen::MatrixXd Q = labels.asDiagonal() * (features * features.transpose()) * labels.asDiagonal();

    SmoSolution s;
    s.alpha = Vector::Zero(n);
    Vector grad = Vector::Constant(n, -1.0);
    Vector& a = s.alpha;

    double best_gap = std::numeric_limits<double>::infinity();
    std::size_t stalled = 0;
    const std::size_t stall_limit = std::max<std::size_t>(params.max_passes, 1) * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
    while (true) {
        const auto pair = max_violating_pair(labels, a, grad, C);
        s.kkt_violation = std::max(0.0, pair.gap);
        if (pair.gap <= params.tolerance) {
            s.converged = true;
            break;
        }
        if (pair.gap < best_gap) {
            best_gap = pair.gap;
            stalled = 0;
        } else if (++stalled >= stall_limit) {
            break;
        }
        if (s.iterations >= kIterationCap) break;
        ++s.iterations;

        const auto i = pair.i;
        const auto j = pair.j;
        const double old_ai = a[i];
        const double old_aj = a[j];
        if (labels[i] != labels[j]) {
            double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0) {
                if (a[j] < 0) {
                    a[j] = 0;
                    a[i] = diff;
                }
            } else if (a[i] < 0) {
                a[i] = 0;
                a[j] = -diff;
            }
            if (diff > 0) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = C - diff;
                }
            } else if (a[j] > C) {
                a[j] = C;
                a[i] = C + diff;
            }
        } else {
            double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = sum - C;
                }
            } else if (a[j] < 0) {
                a[j] = 0;
                a[i] = sum;
            }
            if (sum > C) {
                if (a[j] > C) {
                    a[j] = C;
                    a[i] = sum - C;
                }
            } else if (a[i] < 0) {
                a[i] = 0;
                a[j] = sum;
            }
        }
        grad += Q.col(i) * (a[i] - old_ai) + Q.col(j) * (a[j] - old_aj);
    }

    // Bias from free vectors; bounds midpoint when none are free.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = labels[t] * grad[t];
        if (a[t] >= C) {
            if (labels[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (a[t] <= 0) {
            if (labels[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / free_count : (ub + lb) / 2.0;
    s.bias = -rho;
    s.weights = features.transpose() * (labels.array() * a.array()).matrix();
    return s;
}

FeatureEncoder::FeatureEncoder(const Dataset& train) {
    for (const auto j : train.predictor_indices()) {
        const auto& spec = train.attribute(j);
        Column col;
        col.source = j;
        col.offset = width_;
        if (spec.kind == AttributeKind::Binary) {
            col.levels = 2;
            width_ += 1;
        } else if (spec.is_nominal()) {
            col.levels = spec.num_levels();
            width_ += col.levels;
        } else {
            const auto values = train.values().col(static_cast<Eigen::Index>(j));
            col.min = train.num_instances() ? values.minCoeff() : 0.0;
            col.range = train.num_instances() ? values.maxCoeff() - col.min : 0.0;
            width_ += 1;
        }
        columns_.push_back(col);
    }
}

Eigen::VectorXd FeatureEncoder::encode(Instance x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width_));
    for (const auto& col : columns_) {
        const double v = x[static_cast<Eigen::Index>(col.source)];
        const auto at = static_cast<Eigen::Index>(col.offset);
        if (col.levels == 2) {
            out[at] = v == 1.0 ? 1.0 : 0.0;
        } else if (col.levels > 2) {
            if (const auto level = level_of(v, col.levels)) out[at + static_cast<Eigen::Index>(*level)] = 1.0;
        } else if (col.range > 0) {
            out[at] = std::clamp((v - col.min) / col.range, 0.0, 1.0);
        }
    }
    return out;
}

Eigen::MatrixXd FeatureEncoder::encode(const Dataset& ds) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ds.num_instances()), static_cast<Eigen::Index>(width_));
    for (std::size_t i = 0; i < ds.num_instances(); ++i) out.row(static_cast<Eigen::Index>(i)) = encode(ds.row(i)).transpose();
    return out;
}

SvmModel::SvmModel(const Dataset& train, FeatureEncoder encoder, std::vector<BinaryMachine> machines)
    : Model(train), encoder_(std::move(encoder)), machines_(std::move(machines)) {}

double SvmModel::decision_value(std::size_t machine, Instance x) const {
    const auto& s = machines_.at(machine).solution;
    return s.weights.dot(encoder_.encode(x)) + s.bias;
}

Vector SvmModel::predict_distribution(Instance x) const {
    check_schema(x);
    const auto z = encoder_.encode(x);
    Vector votes = Vector::Zero(static_cast<Eigen::Index>(num_classes()));
    for (const auto& m : machines_) {
        const double f = m.solution.weights.dot(z) + m.solution.bias;
        const auto pos = static_cast<Eigen::Index>(m.positive);
        const auto neg = static_cast<Eigen::Index>(m.negative);
        if (f > 0) {
            votes[pos] += 1.0;
        } else if (f < 0) {
            votes[neg] += 1.0;
        } else {
            votes[pos] += 0.5;
            votes[neg] += 0.5;
        }
    }
    return votes / votes.sum();
}

SvmModel train_svm(const Dataset& train, const SmoParams& params, Seed /*seed*/) {
    const auto counts = train.class_counts();
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) present.push_back(c);
    }
    if (present.size() < 2) throw Error(ErrorKind::SingleClassTrainingSet, "SVM needs at least two classes");

    FeatureEncoder encoder(train);
    const Eigen::MatrixXd encoded = encoder.encode(train);

    std::vector<SvmModel::BinaryMachine> machines;
    for (std::size_t a = 0; a < present.size(); ++a) {
        for (std::size_t b = a + 1; b < present.size(); ++b) machines.push_back({present[a], present[b], {}});
    }
    parallel_for(machines.size(), [&](std::size_t m) {
        auto& machine = machines[m];
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < train.num_instances(); ++i) {
            const auto c = train.label(i);
            if (c == machine.positive || c == machine.negative) rows.push_back(static_cast<Eigen::Index>(i));
        }
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), encoded.cols());
        Vector y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            X.row(static_cast<Eigen::Index>(r)) = encoded.row(rows[r]);
            y[static_cast<Eigen::Index>(r)] = train.label(static_cast<std::size_t>(rows[r])) == machine.positive ? 1.0 : -1.0;
        }
        machine.solution = solve_smo(X, y, params);
    });
    return SvmModel(train, std::move(encoder), std::move(machines));
}

}  // namespace tabml
