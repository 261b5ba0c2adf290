#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpkit {

/// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A ratio left the open domain of its outer function.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t term_index)
      : std::domain_error(what + " (term " + std::to_string(term_index) + ")"),
        term_index_(term_index) {}
  explicit DomainError(const std::string& what)
      : std::domain_error(what), term_index_(npos) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t term_index() const noexcept { return term_index_; }

 private:
  std::size_t term_index_;
};

class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signals a bug: an algorithmic guarantee (e.g. MM monotonicity) failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fpkit
