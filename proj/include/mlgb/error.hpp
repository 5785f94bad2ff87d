#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mlgb {

/// Bad input data or configuration. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset file; the message names the file and line.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// A metric is undefined on the given input (no edges, no usable labels...).
class MetricError : public DataError {
 public:
  using DataError::DataError;
};

class CalibrationError : public DataError {
 public:
  using DataError::DataError;
};

/// One or more configuration problems; what() joins them one per line.
class ConfigError : public DataError {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : DataError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += '\n';
      out += e;
    }
    return out;
  }
  std::vector<std::string> errors_;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Bad command-line usage. The CLI maps these to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlgb
