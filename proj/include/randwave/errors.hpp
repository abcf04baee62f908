#pragma once

#include <stdexcept>
#include <string>

namespace randwave {

/// Raised for invalid experiment or grid configuration. The message names the
/// offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when a torus energy n is not a sum of two squares.
class NotRepresentable : public std::domain_error {
 public:
  explicit NotRepresentable(long long n)
      : std::domain_error(std::to_string(n) + " is not a sum of two squares"),
        n_(n) {}

  long long value() const noexcept { return n_; }

 private:
  long long n_;
};

}  // namespace randwave
