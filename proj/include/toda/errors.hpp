#pragma once

#include <stdexcept>
#include <string>

namespace toda {

// Base class for all library errors so callers can catch the whole family.
struct SovError : std::runtime_error {
    explicit SovError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoleError : SovError {
    explicit PoleError(const std::string& msg) : SovError(msg) {}
};

struct NonConvergence : SovError {
    explicit NonConvergence(const std::string& msg) : SovError(msg) {}
};

struct BudgetExceeded : SovError {
    explicit BudgetExceeded(const std::string& msg) : SovError(msg) {}
};

struct DimensionMismatch : SovError {
    explicit DimensionMismatch(const std::string& msg) : SovError(msg) {}
};

struct PreconditionViolated : SovError {
    explicit PreconditionViolated(const std::string& msg) : SovError(msg) {}
};

struct DegenerateInput : SovError {
    explicit DegenerateInput(const std::string& msg) : SovError(msg) {}
};

struct SmallDenominator : SovError {
    explicit SmallDenominator(const std::string& msg) : SovError(msg) {}
};

struct TailTooLarge : SovError {
    explicit TailTooLarge(const std::string& msg) : SovError(msg) {}
};

} // namespace toda
