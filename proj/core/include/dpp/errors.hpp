#pragma once

#include <stdexcept>
#include <string>

namespace dpp {

// Invalid argument for a mathematical function or a domain type invariant.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An iterative numerical method failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dpp
