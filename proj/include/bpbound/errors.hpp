#pragma once

#include <stdexcept>
#include <string>

namespace bpbound {

// Configuration or input that cannot be evaluated (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Exact enumeration would exceed its work budget (CLI exit code 3).
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Configuration-model sampling could not remove repeated edges within the retry cap.
class GraphConstructionError : public std::runtime_error {
public:
    explicit GraphConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bpbound
