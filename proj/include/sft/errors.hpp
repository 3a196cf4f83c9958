#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sft {

// Bad user input: invalid parameter values, violated preconditions.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Non-positive derivatives, overflow guards, failed inversions.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularArgumentError : NumericError {
    using NumericError::NumericError;
};

struct NonFiniteSampleError : NumericError {
    NonFiniteSampleError(std::uint32_t chunk_, std::uint64_t index_)
        : NumericError("non-finite sample in chunk " + std::to_string(chunk_) + " at index " +
                       std::to_string(index_)),
          chunk(chunk_),
          index(index_) {}
    std::uint32_t chunk;
    std::uint64_t index;
};

}  // namespace sft
