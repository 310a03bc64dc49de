#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cohortce {

/// Input data breaks a documented invariant. Carries every problem found,
/// not only the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  explicit ValidationError(std::string problem);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// A lookup into loaded data failed (missing age group, stage, file row).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cohortce
