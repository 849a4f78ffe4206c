#pragma once

#include <string>
#include <vector>

#include "specmon/spec.hpp"

namespace specmon {

enum class ViolationKind {
  UnresolvedPort,
  CyclicDataflow,
  MissingBehaviorModel,
  UnknownComponent,
  UnboundIdentifier,
  MalformedCondition,
  UndeclaredAttackType,
  DuplicateName,
  DuplicateDataflowTarget,
  PortMismatch,
  CyclicDecomposition,
  TopComponent,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
  SourceLoc loc;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

// Structural well-formedness. Never throws; an empty report means the spec
// can be monitored.
ValidationReport validate_spec(const AppSpec& spec);

std::string format_report(const ValidationReport& report);

}  // namespace specmon
