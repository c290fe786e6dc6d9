#include "tabml/lwl.hpp"

#include "tabml/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tabml {

namespace {

constexpr double kMinGain = 1e-12;

double entropy(const Vector& counts) {
    const double total = counts.sum();
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (Eigen::Index c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
            const double p = counts[c] / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

Vector laplace(const Vector& counts) {
    return (counts.array() + 1.0).matrix() / (counts.sum() + static_cast<double>(counts.size()));
}

double split_entropy(const Vector& left, const Vector& right) {
    const double wl = left.sum();
    const double wr = right.sum();
    return (wl * entropy(left) + wr * entropy(right)) / (wl + wr);
}

}  // namespace

DecisionStump DecisionStump::fit(const Matrix& data, const std::vector<std::size_t>& labels, const Vector& weights,
                                 const std::vector<AttributeSpec>& attributes, const std::vector<std::size_t>& predictors,
                                 std::size_t num_classes) {
    const auto C = static_cast<Eigen::Index>(num_classes);
    const auto n = data.rows();
    Vector total = Vector::Zero(C);
    for (Eigen::Index i = 0; i < n; ++i) total[static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)])] += weights[i];
    const double base = entropy(total);

    DecisionStump stump;
    double best_gain = kMinGain;
    Vector best_left;
    for (const auto j : predictors) {
        const auto col = static_cast<Eigen::Index>(j);
        if (attributes[j].is_nominal()) {
            const auto levels = static_cast<Eigen::Index>(attributes[j].num_levels());
            Eigen::MatrixXd table = Eigen::MatrixXd::Zero(levels, C);
            for (Eigen::Index i = 0; i < n; ++i) {
                table(static_cast<Eigen::Index>(data(i, col)), static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)])) += weights[i];
            }
            for (Eigen::Index v = 0; v < levels; ++v) {
                const Vector left = table.row(v).transpose();
                const Vector right = total - left;
                if (left.sum() <= 0 || right.sum() <= 0) continue;
                const double gain = base - split_entropy(left, right);
                if (gain > best_gain) {
                    best_gain = gain;
                    stump.attribute = static_cast<int>(j);
                    stump.nominal = true;
                    stump.split_value = static_cast<double>(v);
                    best_left = left;
                }
            }
        } else {
            std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return data(a, col) < data(b, col); });
            Vector left = Vector::Zero(C);
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const auto i = order[k];
                left[static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)])] += weights[i];
                const double here = data(i, col);
                const double next = data(order[k + 1], col);
                if (here == next) continue;
                const Vector right = total - left;
                if (left.sum() <= 0 || right.sum() <= 0) continue;
                const double gain = base - split_entropy(left, right);
                if (gain > best_gain) {
                    best_gain = gain;
                    stump.attribute = static_cast<int>(j);
                    stump.nominal = false;
                    stump.split_value = (here + next) / 2.0;
                    best_left = left;
                }
            }
        }
    }
    if (stump.attribute < 0) {
        stump.branch[0] = stump.branch[1] = laplace(total);
    } else {
        stump.branch[0] = laplace(best_left);
        stump.branch[1] = laplace(total - best_left);
    }
    return stump;
}

std::size_t DecisionStump::branch_of(Instance x) const {
    if (attribute < 0) return 0;
    const double v = x[attribute];
    if (nominal) return v == split_value ? 0 : 1;
    return v <= split_value ? 0 : 1;
}

LwlModel::LwlModel(const Dataset& train, const LwlParams& params)
    : Model(train), params_(params), labels_(train.labels()) {
    if (train.num_instances() == 0) throw Error(ErrorKind::EmptyTrainingSet, "LWL needs at least one instance");
    const auto& values = train.values();
    min_ = values.colwise().minCoeff();
    range_ = values.colwise().maxCoeff() - min_;
    stored_ = Matrix(values.rows(), values.cols());
    for (Eigen::Index i = 0; i < values.rows(); ++i) stored_.row(i) = normalize(values.row(i));
}

LwlModel::LwlModel(const LwlModel& other)
    : Model(other),
      params_(other.params_),
      stored_(other.stored_),
      labels_(other.labels_),
      min_(other.min_),
      range_(other.range_),
      distance_evaluations_(other.distance_evaluations_.load()) {}

RowVector LwlModel::normalize(Instance x) const {
    RowVector out = x;
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        if (attributes_[static_cast<std::size_t>(j)].is_nominal()) continue;
        out[j] = range_[j] > 0 ? std::clamp((x[j] - min_[j]) / range_[j], 0.0, 1.0) : 0.0;
    }
    return out;
}

double LwlModel::squared_distance(const RowVector& query, Eigen::Index i) const {
    double sum = 0.0;
    for (const auto j : predictors_) {
        const auto col = static_cast<Eigen::Index>(j);
        const double diff = attributes_[j].is_nominal() ? (query[col] == stored_(i, col) ? 0.0 : 1.0) : query[col] - stored_(i, col);
        sum += diff * diff;
    }
    return sum;
}

double LwlModel::distance(Instance x, std::size_t i) const {
    return std::sqrt(squared_distance(normalize(x), static_cast<Eigen::Index>(i)));
}

Vector LwlModel::weights_for(Instance x) const {
    const auto n = stored_.rows();
    const RowVector q = normalize(x);
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = std::sqrt(squared_distance(q, i));
    distance_evaluations_.fetch_add(static_cast<std::size_t>(n), std::memory_order_relaxed);

    double bandwidth;
    if (params_.neighbors == 0 || params_.neighbors >= static_cast<std::size_t>(n)) {
        bandwidth = d.maxCoeff();
    } else {
        std::vector<double> sorted(d.data(), d.data() + n);
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(params_.neighbors - 1), sorted.end());
        bandwidth = sorted[params_.neighbors - 1];
    }

    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = bandwidth > 0 ? std::max(0.0, 1.0 - d[i] / bandwidth) : (d[i] <= 0 ? 1.0 : 0.0);
    }
    // Everything at the bandwidth (e.g. all points equidistant): fall back to uniform weights.
    if (w.sum() <= 0) w.setOnes();
    return w;
}

Vector LwlModel::predict_distribution(Instance x) const {
    check_schema(x);
    Vector w = weights_for(x);
    const double positive = static_cast<double>((w.array() > 0).count());
    w *= positive / w.sum();
    const auto stump = DecisionStump::fit(stored_, labels_, w, attributes_, predictors_, num_classes());
    return stump.distribution(normalize(x));
}

LwlModel train_lwl(const Dataset& train, const LwlParams& params) { return LwlModel(train, params); }

}  // namespace tabml
