#pragma once

#include <string>

#include "specmon/monitor.hpp"

namespace specmon {

// Human-readable: verdict line, alarms ordered by seq, component tree.
std::string format_text_report(const Verdict& v, bool color = false);

// Machine-readable JSON mirroring the Alarm fields; byte-identical for
// identical verdicts.
std::string format_json_report(const Verdict& v);

}  // namespace specmon
