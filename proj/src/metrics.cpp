#include "tabml/metrics.hpp"

#include "tabml/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace tabml {

namespace {

void require_records(std::span<const PredictionRecord> records) {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no prediction records");
}

std::size_t class_count(std::span<const PredictionRecord> records) {
    const auto c = static_cast<std::size_t>(records.front().distribution.size());
    for (const auto& r : records) {
        if (static_cast<std::size_t>(r.distribution.size()) != c || r.truth >= c) {
            throw Error(ErrorKind::InvalidArgument, "prediction records disagree on the class count");
        }
    }
    return c;
}

}  // namespace

std::size_t argmax(const Vector& distribution) {
    std::size_t best = 0;
    for (Eigen::Index c = 1; c < distribution.size(); ++c) {
        if (distribution[c] > distribution[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(c);
    }
    return best;
}

PredictionRecord PredictionRecord::make(std::size_t truth, Vector distribution) {
    const auto predicted = argmax(distribution);
    return {truth, std::move(distribution), predicted};
}

double accuracy(std::span<const PredictionRecord> records) {
    require_records(records);
    const auto correct = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.predicted == r.truth; });
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

double rmse(std::span<const PredictionRecord> records) {
    require_records(records);
    const auto c = class_count(records);
    double sum = 0.0;
    for (const auto& r : records) {
        Vector err = r.distribution;
        err[static_cast<Eigen::Index>(r.truth)] -= 1.0;
        sum += err.squaredNorm();
    }
    return std::sqrt(sum / (static_cast<double>(records.size()) * static_cast<double>(c)));
}

ConfusionMatrix confusion(std::span<const PredictionRecord> records) {
    require_records(records);
    const auto c = static_cast<Eigen::Index>(class_count(records));
    ConfusionMatrix m = ConfusionMatrix::Zero(c, c);
    for (const auto& r : records) ++m(static_cast<Eigen::Index>(r.truth), static_cast<Eigen::Index>(r.predicted));
    return m;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
    RocCurve curve;
    curve.positives = std::count(labels.begin(), labels.end(), true);
    curve.negatives = static_cast<long long>(labels.size()) - curve.positives;
    if (curve.positives == 0 || curve.negatives == 0) {
        throw Error(ErrorKind::DegenerateLabels, "ROC needs at least one positive and one negative");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const auto P = static_cast<double>(curve.positives);
    const auto N = static_cast<double>(curve.negatives);
    long long tp = 0;
    long long fp = 0;
    curve.points.push_back({0.0, 0.0});
    curve.true_positives.push_back(0);
    curve.false_positives.push_back(0);
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == threshold; ++i) {
            if (labels[order[i]]) {
                ++tp;
            } else {
                ++fp;
            }
        }
        // FPR = 1 - specificity = FP / (FP + TN)
        curve.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P});
        curve.true_positives.push_back(tp);
        curve.false_positives.push_back(fp);
    }
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    if (curve.true_positives.size() == curve.points.size() && curve.positives > 0 && curve.negatives > 0) {
        // Twice the trapezoid area in count units is an integer.
        long long twice_area = 0;
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            twice_area += (curve.false_positives[i] - curve.false_positives[i - 1]) *
                          (curve.true_positives[i] + curve.true_positives[i - 1]);
        }
        return static_cast<double>(twice_area) / (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
    }
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (b.tpr + a.tpr) / 2.0;
    }
    return area;
}

WeightedAuc weighted_multiclass_auc(std::span<const PredictionRecord> records) {
    require_records(records);
    const auto c = class_count(records);
    std::vector<std::size_t> counts(c, 0);
    for (const auto& r : records) ++counts[r.truth];
    const auto present = std::count_if(counts.begin(), counts.end(), [](auto n) { return n > 0; });
    if (present < 2) throw Error(ErrorKind::DegenerateLabels, "weighted AUC needs at least two classes in the truth labels");

    WeightedAuc out;
    out.per_class.assign(c, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> scores(records.size());
    const auto labels = std::make_unique<bool[]>(records.size());
    double weighted = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        if (counts[k] == 0) continue;
        for (std::size_t i = 0; i < records.size(); ++i) {
            scores[i] = records[i].distribution[static_cast<Eigen::Index>(k)];
            labels[i] = records[i].truth == k;
        }
        out.per_class[k] = auc(roc_curve(scores, std::span<const bool>(labels.get(), records.size())));
        weighted += out.per_class[k] * static_cast<double>(counts[k]);
    }
    out.weighted = weighted / static_cast<double>(records.size());
    return out;
}

EvalSummary evaluate(std::span<const PredictionRecord> records) {
    EvalSummary s;
    s.accuracy = accuracy(records);
    s.rmse = rmse(records);
    auto w = weighted_multiclass_auc(records);
    s.weighted_auc = w.weighted;
    s.per_class_auc = std::move(w.per_class);
    s.confusion = confusion(records);
    return s;
}

}  // namespace tabml
