#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace tabml {

/// Instance storage: one row per instance, one column per attribute.
/// Nominal values hold the level index as a double.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Read-only view of one instance (a row of a `Matrix`, or any contiguous row vector).
using Instance = Eigen::Ref<const RowVector>;

using Seed = std::uint64_t;

}  // namespace tabml
