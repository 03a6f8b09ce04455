#ifndef MMCAST_ERRORS_HPP
#define MMCAST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmcast {

// Exit-code mapping used by the CLI: validation -> 2, capacity -> 3, numerical -> 4.

struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct capacity_error : std::runtime_error {
  explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mmcast

#endif  // MMCAST_ERRORS_HPP
