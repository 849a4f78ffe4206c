#pragma once

#include <string_view>

#include "specmon/spec.hpp"

namespace specmon {

// Parses `.bspec` text. Recognised forms: define-ensemble (synonym
// define-component-type), defbehavior-model, define-attack-model, defrule.
// Throws ParseError for unknown forms/slots, duplicates and malformed values.
AppSpec parse_spec(std::string_view text);

// Same, over already-read forms.
AppSpec parse_spec_forms(const std::vector<SExpr>& forms);

}  // namespace specmon
