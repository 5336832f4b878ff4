#ifndef NKCONF_ERRORS_HPP
#define NKCONF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nkconf {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad JSON, unknown labels, duplicate ids, invalid (k,n).
struct input_error : error {
    explicit input_error(const std::string& msg) : error(msg) {}
};

// Enumeration exceeded the configured cell budget.
struct budget_error : error {
    budget_error(const std::string& msg, std::size_t budget_)
        : error(msg), budget(budget_) {}
    std::size_t budget;
};

// Operation refused because the base graph is not (k,n)-sufficiently subdivided.
struct sufficiency_error : error {
    explicit sufficiency_error(const std::string& msg) : error(msg) {}
};

// A structural invariant that should hold mathematically was found violated.
// Carries the offending cell (canonical serialization) when there is one.
struct verification_error : error {
    explicit verification_error(const std::string& msg, std::string cell_ = {})
        : error(cell_.empty() ? msg : msg + " [cell " + cell_ + "]"),
          cell(std::move(cell_)) {}
    std::string cell;
};

} // namespace nkconf

#endif
