#pragma once

#include <stdexcept>
#include <string>

namespace arfl {

// Shape conformance failures; message names both offending shapes.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-supplied configuration (sizes, ranges, file layouts).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data; message carries file and line number.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid file whose rows disagree with each other.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an API precondition (non-scalar backward root, empty batch, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Metric undefined on the given input (e.g. single-class AUC).
struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Two result sets cannot be compared (mismatched protocols).
struct ComparisonError : std::runtime_error {
    explicit ComparisonError(const std::string& what) : std::runtime_error(what) {}
};

// Training diverged or hit a non-finite objective.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arfl
