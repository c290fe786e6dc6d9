#pragma once

#include "tabml/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tabml {

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Vector& distribution);

struct PredictionRecord {
    std::size_t truth = 0;
    Vector distribution;
    std::size_t predicted = 0;

    /// Fills `predicted` from the distribution under the lowest-index tie-break.
    static PredictionRecord make(std::size_t truth, Vector distribution);
};

/// counts(truth, predicted).
using ConfusionMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Threshold sweep from (0,0) to (1,1). The integer tallies behind every
/// point are kept so the area can be computed without rounding drift.
struct RocCurve {
    std::vector<RocPoint> points;
    std::vector<long long> false_positives;
    std::vector<long long> true_positives;
    long long positives = 0;
    long long negatives = 0;
};

struct WeightedAuc {
    double weighted = 0.0;
    /// NaN for classes with no instances in the truth labels.
    std::vector<double> per_class;
};

struct EvalSummary {
    double accuracy = 0.0;
    double rmse = 0.0;
    double weighted_auc = 0.0;
    std::vector<double> per_class_auc;
    ConfusionMatrix confusion;
};

double accuracy(std::span<const PredictionRecord> records);

/// sqrt( sum_i sum_c (p_ic - y_ic)^2 / (N * C) ) against one-hot truth.
double rmse(std::span<const PredictionRecord> records);

ConfusionMatrix confusion(std::span<const PredictionRecord> records);

/// `labels[i]` is true for positives. Thresholds sweep the distinct scores in
/// descending order, so tied scores move along a diagonal segment.
RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

/// One-vs-rest AUC per class, averaged with empirical class priors.
WeightedAuc weighted_multiclass_auc(std::span<const PredictionRecord> records);

EvalSummary evaluate(std::span<const PredictionRecord> records);

}  // namespace tabml
