#pragma once

#include <string>
#include <vector>

#include "railplan/instance.hpp"

namespace railplan {

enum class Severity { Error, Warning };

struct Violation {
  Severity severity = Severity::Error;
  std::string rule;     // stable machine-readable tag
  std::string subject;  // id of the offending entity
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool valid() const;  // no error-level entries
  std::vector<Violation> errors() const;
  std::vector<Violation> warnings() const;
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validateInstance(const Instance& inst);

}  // namespace railplan
