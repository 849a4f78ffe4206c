#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specmon/value.hpp"

namespace specmon {

enum class EventKind { Call, Return, Emit };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

// One observation from the running application.
struct RuntimeEvent {
  std::uint64_t seq = 0;
  std::optional<double> ts;  // diagnostic only, never used for ordering
  EventKind kind = EventKind::Call;
  std::string name;
  std::string path;  // slash-separated instance path from the top component
  Bindings values;

  friend bool operator==(const RuntimeEvent&, const RuntimeEvent&) = default;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Decodes one `.trace` line. Throws TraceError tagged with `line`.
RuntimeEvent parse_event_line(std::string_view text, std::size_t line = 0);

// Encodes one event as a single JSON line (no trailing newline), keys in the
// order seq, ts, kind, name, path, values.
std::string format_event_line(const RuntimeEvent& event);

// Streaming reader: holds one line at a time and enforces strictly
// increasing sequence numbers. Blank lines are skipped.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in) : in_(in) {}

  std::optional<RuntimeEvent> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::optional<std::uint64_t> last_seq_;
};

std::vector<RuntimeEvent> read_trace(std::istream& in);
std::vector<RuntimeEvent> read_trace_file(const std::string& path);
void write_trace(std::ostream& out, const std::vector<RuntimeEvent>& events);

// Flat JSON object <-> Bindings (used for monitor parameter files).
Bindings parse_bindings_json(std::string_view text);
std::string format_bindings_json(const Bindings& values);

// Ordered hand-off between a probe (writer thread) and a monitor (reader).
class EventChannel {
 public:
  void push(RuntimeEvent event);
  void close();
  // Blocks until an event is available; nullopt once closed and drained.
  std::optional<RuntimeEvent> pop();

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<RuntimeEvent> queue_;
  bool closed_ = false;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void write(const RuntimeEvent& event) = 0;
  virtual void close() {}
};

class StreamSink : public EventSink {
 public:
  explicit StreamSink(std::ostream& out) : out_(out) {}
  void write(const RuntimeEvent& event) override;
  void close() override;

 private:
  std::ostream& out_;
};

class VectorSink : public EventSink {
 public:
  void write(const RuntimeEvent& event) override { events_.push_back(event); }
  const std::vector<RuntimeEvent>& events() const { return events_; }
  std::vector<RuntimeEvent> take() { return std::move(events_); }

 private:
  std::vector<RuntimeEvent> events_;
};

class ChannelSink : public EventSink {
 public:
  explicit ChannelSink(EventChannel& channel) : channel_(channel) {}
  void write(const RuntimeEvent& event) override { channel_.push(event); }
  void close() override { channel_.close(); }

 private:
  EventChannel& channel_;
};

class ProbeClosed : public std::logic_error {
 public:
  ProbeClosed() : std::logic_error("probe handle is closed") {}
};

// In-process probe: assigns sequence numbers 1, 2, ... and forwards events to
// a sink. Single writer.
class ProbeHandle {
 public:
  explicit ProbeHandle(EventSink& sink) : sink_(&sink) {}
  ProbeHandle(const ProbeHandle&) = delete;
  ProbeHandle& operator=(const ProbeHandle&) = delete;
  ~ProbeHandle();

  std::uint64_t emit(EventKind kind, std::string name, std::string path, Bindings values = {},
                     std::optional<double> ts = std::nullopt);
  void close();
  bool is_open() const { return sink_ != nullptr; }
  std::uint64_t last_seq() const { return seq_; }

 private:
  EventSink* sink_;
  std::uint64_t seq_ = 0;
};

}  // namespace specmon
