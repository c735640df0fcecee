#pragma once

#include <stdexcept>
#include <string>

namespace treedpp {

// Failure of a numerical routine: special functions, quadrature convergence,
// spectrum containment, sampler consistency.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel argument outside the kernel's domain or evaluation window.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Value would overflow (Ginibre far from the origin).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// A refinement produced a cell of zero reference mass.
class PartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message)
      : std::runtime_error(format(field, line, message)),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }  // 1-based, 0 when unknown

 private:
  static std::string format(const std::string& field, int line,
                            const std::string& message) {
    std::string out = "config error";
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    if (!field.empty()) out += " [" + field + "]";
    return out + ": " + message;
  }

  std::string field_;
  int line_;
};

}  // namespace treedpp
