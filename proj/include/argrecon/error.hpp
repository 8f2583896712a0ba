#ifndef ARGRECON_ERROR_HPP
#define ARGRECON_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace argrecon {

enum class ErrorCode {
    parse_error,          // malformed APX / JSON / CSV input
    invalid_argument,     // well-formed input that violates a contract
    not_found,            // missing row, column or argument
    unresolved_conflicts, // merge attempted with UNDEC arguments
    dependency_cycle,     // accepted steps cannot be totally ordered
    execution_error,      // a recipe step failed on a dataset
    invalid_state,        // request needs state the caller has not provided yet
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `subjects` names the offending
// arguments, columns or steps so callers can report them structurally.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> subjects = {})
        : std::runtime_error(message), code_(code), subjects_(std::move(subjects)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& subjects() const noexcept { return subjects_; }

private:
    ErrorCode code_;
    std::vector<std::string> subjects_;
};

} // namespace argrecon

#endif
