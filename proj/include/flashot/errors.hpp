#pragma once

#include <stdexcept>
#include <string>

namespace flashot {

// Raised when an operation is called outside its mathematical domain
// (non-positive swap input, n <= n1, negative contingent profit, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace flashot
