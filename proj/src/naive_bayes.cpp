#include "tabml/naive_bayes.hpp"

#include "tabml/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tabml {

NaiveBayesEstimator::NaiveBayesEstimator(const std::vector<AttributeSpec>& attributes, std::size_t class_index,
                                         double variance_floor)
    : num_levels_(attributes.size(), 0),
      nominal_(attributes.size()),
      numeric_(attributes.size()),
      class_counts_(Vector::Zero(static_cast<Eigen::Index>(attributes[class_index].num_levels()))),
      variance_floor_(variance_floor) {
    const auto c = class_counts_.size();
    for (std::size_t j = 0; j < attributes.size(); ++j) {
        if (j == class_index) continue;
        predictors_.push_back(j);
        if (attributes[j].is_nominal()) {
            num_levels_[j] = attributes[j].num_levels();
            nominal_[j] = Eigen::MatrixXd::Zero(c, static_cast<Eigen::Index>(num_levels_[j]));
        } else {
            auto& s = numeric_[j];
            s.count = Vector::Zero(c);
            s.mean = Vector::Zero(c);
            s.m2 = Vector::Zero(c);
            s.min = Vector::Constant(c, std::numeric_limits<double>::infinity());
            s.max = Vector::Constant(c, -std::numeric_limits<double>::infinity());
        }
    }
}

void NaiveBayesEstimator::add(Instance x, std::size_t label) {
    const auto c = static_cast<Eigen::Index>(label);
    class_counts_[c] += 1.0;
    total_ += 1.0;
    for (const auto j : predictors_) {
        const double v = x[static_cast<Eigen::Index>(j)];
        if (num_levels_[j] > 0) {
            if (const auto level = level_of(v, num_levels_[j])) nominal_[j](c, static_cast<Eigen::Index>(*level)) += 1.0;
        } else {
            // Welford update
            auto& s = numeric_[j];
            s.count[c] += 1.0;
            const double d = v - s.mean[c];
            s.mean[c] += d / s.count[c];
            s.m2[c] += d * (v - s.mean[c]);
            s.min[c] = std::min(s.min[c], v);
            s.max[c] = std::max(s.max[c], v);
        }
    }
}

double NaiveBayesEstimator::variance(std::size_t column, std::size_t c) const {
    const auto& s = numeric_[column];
    const auto k = static_cast<Eigen::Index>(c);
    const double var = s.count[k] > 0 ? s.m2[k] / s.count[k] : 0.0;
    return std::max(var, variance_floor_);
}

Vector NaiveBayesEstimator::posterior(Instance x) const {
    const auto C = class_counts_.size();
    if (total_ == 0.0) return Vector::Constant(C, 1.0 / static_cast<double>(C));

    const double present = static_cast<double>((class_counts_.array() > 0).count());
    Vector log_p = Vector::Constant(C, -std::numeric_limits<double>::infinity());
    for (Eigen::Index c = 0; c < C; ++c) {
        const double nc = class_counts_[c];
        if (nc == 0.0) continue;
        double lp = std::log((nc + 1.0) / (total_ + present));
        for (const auto j : predictors_) {
            const double v = x[static_cast<Eigen::Index>(j)];
            if (num_levels_[j] > 0) {
                const double levels = static_cast<double>(num_levels_[j]);
                const auto level = level_of(v, num_levels_[j]);
                const double count = level ? nominal_[j](c, static_cast<Eigen::Index>(*level)) : 0.0;
                lp += std::log((count + 1.0) / (nc + levels));
            } else {
                const double var = variance(j, static_cast<std::size_t>(c));
                const double d = v - numeric_[j].mean[c];
                lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
            }
        }
        log_p[c] = lp;
    }
    const double top = log_p.maxCoeff();
    // std::exp gives exactly 0 for absent classes.
    Vector p = (log_p.array() - top).unaryExpr([](double v) { return std::exp(v); }).matrix();
    return p / p.sum();
}

NaiveBayesModel::NaiveBayesModel(const Dataset& train, const NaiveBayesParams& params)
    : Model(train), estimator_(train.attributes(), train.class_index(), params.variance_floor) {
    if (train.num_instances() == 0) throw Error(ErrorKind::EmptyTrainingSet, "naive Bayes needs at least one instance");
    for (std::size_t i = 0; i < train.num_instances(); ++i) estimator_.add(train.row(i), train.label(i));
}

Vector NaiveBayesModel::predict_distribution(Instance x) const {
    check_schema(x);
    return estimator_.posterior(x);
}

NaiveBayesModel train_naive_bayes(const Dataset& train, const NaiveBayesParams& params) { return NaiveBayesModel(train, params); }

}  // namespace tabml
