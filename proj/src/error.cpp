#include "tabml/error.hpp"

namespace tabml {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::MissingValue: return "MissingValue";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::UnknownClassColumn: return "UnknownClassColumn";
        case ErrorKind::UnsupportedArffFeature: return "UnsupportedArffFeature";
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::DegenerateLabels: return "DegenerateLabels";
        case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorKind::SingleClassTrainingSet: return "SingleClassTrainingSet";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::NoPredictors: return "NoPredictors";
        case ErrorKind::NoOobSamples: return "NoOobSamples";
        case ErrorKind::NothingConfirmed: return "NothingConfirmed";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::UnalignedFoldPlans: return "UnalignedFoldPlans";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace tabml
