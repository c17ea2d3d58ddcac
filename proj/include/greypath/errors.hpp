#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace greypath {

// Domain violations throw std::domain_error, unsupported parameter ranges
// throw std::out_of_range, malformed user input throws std::invalid_argument.
// Numerical breakdown (a factorization that fails, a sampler that cannot
// produce a finite value) throws numeric_error with a key/value diagnostic
// block that the CLI prints verbatim.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, std::map<std::string, std::string> diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::map<std::string, std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::map<std::string, std::string> diagnostics_;
};

}  // namespace greypath
