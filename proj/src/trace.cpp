#include "specmon/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json_value.hpp"

namespace specmon {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Call: return "call";
    case EventKind::Return: return "return";
    case EventKind::Emit: return "emit";
  }
  return "emit";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "call") return EventKind::Call;
  if (text == "return") return EventKind::Return;
  if (text == "emit") return EventKind::Emit;
  return std::nullopt;
}

TraceError::TraceError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

// JSON has no NaN/Infinity literals; report them as what they are rather
// than as a generic syntax error.
bool has_nonfinite_literal(std::string_view text) {
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    auto rest = text.substr(i);
    if (rest.starts_with("NaN") || rest.starts_with("nan") || rest.starts_with("Infinity") ||
        rest.starts_with("inf")) {
      return true;
    }
  }
  return false;
}

Value value_from_json(const json& j, std::size_t line, const std::string& key) {
  switch (j.type()) {
    case json::value_t::number_float:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw TraceError(line, "non-finite number in value '" + key + "'");
      return v;
    }
    case json::value_t::boolean:
      return j.get<bool>();
    case json::value_t::string:
      return Value::text(j.get<std::string>());
    case json::value_t::array: {
      Value::List items;
      for (const auto& x : j) items.push_back(value_from_json(x, line, key));
      return items;
    }
    case json::value_t::object:
      if (j.size() == 1 && j.contains("symbol") && j["symbol"].is_string()) {
        return Value::symbol(j["symbol"].get<std::string>());
      }
      break;
    default:
      break;
  }
  throw TraceError(line, "unsupported value for '" + key + "'");
}

}  // namespace

RuntimeEvent parse_event_line(std::string_view text, std::size_t line) {
  if (has_nonfinite_literal(text)) throw TraceError(line, "non-finite number");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TraceError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceError(line, "event must be a JSON object");

  RuntimeEvent ev;
  bool has_seq = false, has_kind = false, has_name = false, has_path = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "seq") {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
        throw TraceError(line, "seq must be a positive integer");
      }
      ev.seq = v.get<std::uint64_t>();
      has_seq = true;
    } else if (key == "ts") {
      if (v.is_null()) continue;
      if (!v.is_number() || !std::isfinite(v.get<double>())) throw TraceError(line, "ts must be a finite number");
      ev.ts = v.get<double>();
    } else if (key == "kind") {
      auto kind = v.is_string() ? parse_event_kind(v.get<std::string>()) : std::nullopt;
      if (!kind) throw TraceError(line, "kind must be one of call, return, emit");
      ev.kind = *kind;
      has_kind = true;
    } else if (key == "name") {
      if (!v.is_string() || v.get<std::string>().empty()) throw TraceError(line, "name must be a non-empty string");
      ev.name = v.get<std::string>();
      has_name = true;
    } else if (key == "path") {
      if (!v.is_string() || v.get<std::string>().empty()) throw TraceError(line, "path must be a non-empty string");
      ev.path = v.get<std::string>();
      has_path = true;
    } else if (key == "values") {
      if (!v.is_object()) throw TraceError(line, "values must be an object");
      for (const auto& [name, x] : v.items()) ev.values.emplace(name, value_from_json(x, line, name));
    } else {
      throw TraceError(line, "unknown key '" + key + "'");
    }
  }
  if (!has_seq) throw TraceError(line, "missing seq");
  if (!has_kind) throw TraceError(line, "missing kind");
  if (!has_name) throw TraceError(line, "missing name");
  if (!has_path) throw TraceError(line, "missing path");
  return ev;
}

std::string format_event_line(const RuntimeEvent& event) {
  ordered_json j;
  j["seq"] = event.seq;
  if (event.ts) j["ts"] = *event.ts;
  j["kind"] = std::string(to_string(event.kind));
  j["name"] = event.name;
  j["path"] = event.path;
  j["values"] = detail::bindings_to_json(event.values);
  return j.dump();
}

Bindings parse_bindings_json(std::string_view text) {
  if (has_nonfinite_literal(text)) throw TraceError(0, "non-finite number");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TraceError(0, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceError(0, "expected a JSON object");
  Bindings out;
  for (const auto& [k, v] : j.items()) out.emplace(k, value_from_json(v, 0, k));
  return out;
}

std::string format_bindings_json(const Bindings& values) { return detail::bindings_to_json(values).dump(2) + "\n"; }

std::optional<RuntimeEvent> TraceReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    RuntimeEvent ev = parse_event_line(text, line_);
    if (last_seq_ && ev.seq <= *last_seq_) throw TraceError(line_, "seq not increasing");
    last_seq_ = ev.seq;
    return ev;
  }
  return std::nullopt;
}

std::vector<RuntimeEvent> read_trace(std::istream& in) {
  TraceReader reader(in);
  std::vector<RuntimeEvent> events;
  while (auto ev = reader.next()) events.push_back(std::move(*ev));
  return events;
}

std::vector<RuntimeEvent> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  return read_trace(in);
}

void write_trace(std::ostream& out, const std::vector<RuntimeEvent>& events) {
  for (const auto& ev : events) out << format_event_line(ev) << '\n';
}

void EventChannel::push(RuntimeEvent event) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) throw ProbeClosed();
    queue_.push_back(std::move(event));
  }
  ready_.notify_one();
}

void EventChannel::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  ready_.notify_all();
}

std::optional<RuntimeEvent> EventChannel::pop() {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [&] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  RuntimeEvent ev = std::move(queue_.front());
  queue_.pop_front();
  return ev;
}

void StreamSink::write(const RuntimeEvent& event) { out_ << format_event_line(event) << '\n'; }

void StreamSink::close() { out_.flush(); }

ProbeHandle::~ProbeHandle() {
  if (sink_) sink_->close();
}

std::uint64_t ProbeHandle::emit(EventKind kind, std::string name, std::string path, Bindings values,
                                std::optional<double> ts) {
  if (!sink_) throw ProbeClosed();
  RuntimeEvent ev;
  ev.seq = ++seq_;
  ev.ts = ts;
  ev.kind = kind;
  ev.name = std::move(name);
  ev.path = std::move(path);
  ev.values = std::move(values);
  sink_->write(ev);
  return ev.seq;
}

void ProbeHandle::close() {
  if (!sink_) return;
  sink_->close();
  sink_ = nullptr;
}

}  // namespace specmon
