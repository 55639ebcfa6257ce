#pragma once

#include <stdexcept>
#include <string>

namespace mbq {

// Bad configuration or arguments (CLI exit code 1).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: degenerate bins, zero-energy signal (CLI exit code 2).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantization bin whose probability underflowed the configured floor.
class degenerate_bin_error : public numerical_error {
 public:
  degenerate_bin_error(int bin, double probability)
      : numerical_error("degenerate quantization bin " + std::to_string(bin) +
                        " (probability " + std::to_string(probability) + ")"),
        bin_(bin),
        probability_(probability) {}

  int bin() const noexcept { return bin_; }
  double probability() const noexcept { return probability_; }

 private:
  int bin_;
  double probability_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw validation_error(what);
}

}  // namespace mbq
