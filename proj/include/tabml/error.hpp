#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tabml {

enum class ErrorKind {
    // dataset
    MalformedRow,
    MissingValue,
    EmptyDataset,
    UnknownClassColumn,
    UnsupportedArffFeature,
    MalformedHeader,
    KTooLarge,
    InvalidArgument,
    IoError,
    // metrics
    EmptyInput,
    DegenerateLabels,
    // classifiers
    EmptyTrainingSet,
    SingleClassTrainingSet,
    SchemaMismatch,
    // boruta
    NoPredictors,
    NoOobSamples,
    NothingConfirmed,
    // evaluation
    LengthMismatch,
    UnalignedFoldPlans,
    // cli
    ConfigError,
    SchemaError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tabml
