#pragma once

#include <stdexcept>
#include <string>

namespace col {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct EmptyDatasetError : Error {
    using Error::Error;
};

struct InfeasibleSplitError : Error {
    using Error::Error;
};

struct ContractViolation : Error {
    using Error::Error;
};

}  // namespace col
