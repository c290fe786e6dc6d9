#pragma once

#include "tabml/classifier.hpp"

#include <utility>
#include <vector>

namespace tabml {

/// Result of the SMO dual solve for one binary linear SVM.
/// Decision value: weights . x + bias.
struct SmoSolution {
    Vector alpha;
    Vector weights;
    double bias = 0.0;
    std::size_t iterations = 0;
    /// Maximal KKT violation (m(alpha) - M(alpha)) at exit.
    double kkt_violation = 0.0;
    bool converged = false;
};

/// Solves min 1/2 a'Qa - e'a s.t. 0 <= a <= C, y'a = 0 with Q_ij = y_i y_j <x_i, x_j>,
/// updating the maximal violating pair each step. `labels` holds +1/-1.
SmoSolution solve_smo(const Eigen::MatrixXd& features, const Vector& labels, const SmoParams& params);

/// KKT violation m(alpha) - M(alpha) of a dual point, computed from scratch.
double smo_kkt_violation(const Eigen::MatrixXd& features, const Vector& labels, const Vector& alpha, double C);

/// Maps instances to the SVM feature space: numeric predictors min-max scaled
/// with training statistics and clamped to [0,1]; binary predictors kept as one
/// 0/1 column; other nominal predictors one-hot (unknown levels give all zeros).
class FeatureEncoder {
public:
    FeatureEncoder() = default;
    explicit FeatureEncoder(const Dataset& train);

    std::size_t width() const noexcept { return width_; }
    Eigen::VectorXd encode(Instance x) const;
    Eigen::MatrixXd encode(const Dataset& ds) const;

private:
    struct Column {
        std::size_t source = 0;
        std::size_t offset = 0;
        std::size_t levels = 0;  // 0 numeric, 2 binary
        double min = 0.0;
        double range = 0.0;
    };
    std::vector<Column> columns_;
    std::size_t width_ = 0;
};

/// One-vs-one linear SVMs; the distribution is the normalized pairwise vote
/// count, with a zero decision value splitting the vote.
class SvmModel final : public Model {
public:
    struct BinaryMachine {
        std::size_t positive = 0;
        std::size_t negative = 0;
        SmoSolution solution;
    };

    SvmModel(const Dataset& train, FeatureEncoder encoder, std::vector<BinaryMachine> machines);

    Vector predict_distribution(Instance x) const override;

    const std::vector<BinaryMachine>& machines() const noexcept { return machines_; }
    const FeatureEncoder& encoder() const noexcept { return encoder_; }
    double decision_value(std::size_t machine, Instance x) const;

private:
    FeatureEncoder encoder_;
    std::vector<BinaryMachine> machines_;
};

SvmModel train_svm(const Dataset& train, const SmoParams& params = {}, Seed seed = 0);

}  // namespace tabml
