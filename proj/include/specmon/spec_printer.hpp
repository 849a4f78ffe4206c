#pragma once

#include <string>

#include "specmon/spec.hpp"

namespace specmon {

// Canonical `.bspec` text; parse_spec(print_spec(s)) == s. Empty slots are
// omitted, so an empty ensemble prints as `(define-ensemble name)`.
std::string print_spec(const AppSpec& spec);

}  // namespace specmon
