// _specmon: thin pybind11 layer. Structured data crosses as JSON text; the
// Python package decodes it.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "specmon/monitor.hpp"
#include "specmon/report.hpp"
#include "specmon/spec_parser.hpp"
#include "specmon/spec_printer.hpp"
#include "specmon/trace.hpp"
#include "specmon/validator.hpp"
#include "specmon/water_tank.hpp"

namespace py = pybind11;
using namespace specmon;

namespace {

Bindings bindings_or_empty(const std::string& json) { return json.empty() ? Bindings{} : parse_bindings_json(json); }

std::vector<py::dict> violations(const ValidationReport& r) {
  std::vector<py::dict> out;
  for (const auto& v : r.violations) {
    py::dict d;
    d["kind"] = std::string(to_string(v.kind));
    d["message"] = v.message;
    d["line"] = v.loc.line;
    d["column"] = v.loc.column;
    out.push_back(std::move(d));
  }
  return out;
}

MonitorConfig make_config(double atol, double rtol, bool halt_on_first, bool attack_rules, const std::string& params) {
  MonitorConfig c;
  c.tolerance = {atol, rtol};
  c.halt_on_first = halt_on_first;
  c.attack_rules_enabled = attack_rules;
  c.parameters = bindings_or_empty(params);
  return c;
}

std::vector<RuntimeEvent> events_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

// Incremental session over spec text; events arrive as JSON lines.
class Session {
 public:
  Session(const std::string& spec_text, double atol, double rtol, bool halt_on_first, bool attack_rules,
          const std::string& params)
      : session_(parse_spec(spec_text), make_config(atol, rtol, halt_on_first, attack_rules, params)) {}

  void feed(const std::string& line) {
    ++line_;
    session_.handle_event(parse_event_line(line, line_));
  }
  std::string report() const { return format_json_report(session_.verdict()); }
  std::string verdict_kind() const { return std::string(to_string(session_.verdict().kind)); }
  std::size_t alarm_count() const { return session_.alarms().size(); }
  std::uint64_t last_seq() const { return session_.last_seq(); }

 private:
  MonitorSession session_;
  std::size_t line_ = 0;
};

}  // namespace

PYBIND11_MODULE(_specmon, m) {
  m.doc() = "Specification-based runtime monitor (native core)";

  auto base = py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TraceError>(m, "TraceError", PyExc_ValueError);
  py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);
  (void)base;

  m.def("bundled_spec", [] { return std::string(bundled_spec()); }, "Source of the bundled water-tank spec.");

  m.def("format_spec", [](const std::string& text) { return print_spec(parse_spec(text)); },
        "Parse and print in canonical form.", py::arg("text"));

  m.def("top_component", [](const std::string& text) { return parse_spec(text).top_component; }, py::arg("text"));

  m.def("validate", [](const std::string& text) { return violations(validate_spec(parse_spec(text))); },
        "Violations as dicts with kind, message, line, column.", py::arg("text"));

  m.def(
      "monitor",
      [](const std::string& spec_text, const std::string& trace_text, double atol, double rtol, bool halt_on_first,
         bool attack_rules, const std::string& params) {
        AppSpec spec = parse_spec(spec_text);
        auto events = events_from_text(trace_text);
        MonitorConfig c = make_config(atol, rtol, halt_on_first, attack_rules, params);
        py::gil_scoped_release nogil;
        return format_json_report(run_monitor(spec, events, c));
      },
      "Run the monitor over JSON-lines trace text; returns the JSON report.", py::arg("spec_text"),
      py::arg("trace_text"), py::arg("atol") = 1e-9, py::arg("rtol") = 1e-9, py::arg("halt_on_first") = false,
      py::arg("attack_rules") = true, py::arg("params") = "");

  m.def(
      "simulate",
      [](std::uint64_t steps, const std::string& attack, double kp, double ki, double kd, double set_point,
         double time_step, double level, double leak_coeff, double pump_gain) {
        tank::ControllerParams p{kp, ki, kd, set_point, time_step};
        tank::PlantState plant{level, leak_coeff, pump_gain};
        const auto scenario = tank::AttackScenario::parse(attack);
        std::ostringstream out;
        {
          py::gil_scoped_release nogil;
          write_trace(out, tank::simulate_trace(p, plant, scenario, steps));
        }
        return py::make_tuple(out.str(), format_bindings_json(tank::monitor_parameters(p, plant)));
      },
      "Water-tank trace as JSON lines plus the matching monitor parameters.", py::arg("steps"),
      py::arg("attack") = "none", py::arg("kp") = 1.0, py::arg("ki") = 0.2, py::arg("kd") = 0.5,
      py::arg("set_point") = 5.0, py::arg("time_step") = 0.1, py::arg("level") = 0.0, py::arg("leak_coeff") = 0.3,
      py::arg("pump_gain") = 1.0);

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&, double, double, bool, bool, const std::string&>(), py::arg("spec_text"),
           py::arg("atol") = 1e-9, py::arg("rtol") = 1e-9, py::arg("halt_on_first") = false,
           py::arg("attack_rules") = true, py::arg("params") = "")
      .def("feed", &Session::feed, py::arg("line"))
      .def("report", &Session::report)
      .def_property_readonly("verdict", &Session::verdict_kind)
      .def_property_readonly("alarm_count", &Session::alarm_count)
      .def_property_readonly("last_seq", &Session::last_seq);
}
