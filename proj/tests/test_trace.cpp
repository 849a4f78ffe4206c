#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "helpers.hpp"

using namespace specmon;
using namespace specmon::testing;

TEST(Trace, ThreeLines) {
  std::istringstream in(
      R"({"seq":1,"kind":"call","name":"controller-step","path":"controller-step","values":{"set-point":5,"sens-val":0}}
{"seq":2,"kind":"emit","name":"update-state","path":"controller-step","values":{}}

{"seq":3,"kind":"return","name":"controller-step","path":"controller-step","values":{"com":1.5}}
)");
  auto events = read_trace(in);
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].kind, EventKind::Call);
  EXPECT_EQ(events[1].kind, EventKind::Emit);
  EXPECT_EQ(events[2].values.at("com").as_number(), 1.5);
}

TEST(Trace, SeqMustIncrease) {
  std::istringstream in(R"({"seq":5,"kind":"emit","name":"a","path":"p","values":{}}
{"seq":4,"kind":"emit","name":"a","path":"p","values":{}})");
  try {
    read_trace(in);
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("seq not increasing"), std::string::npos);
  }
}

TEST(Trace, NonFiniteRejected) {
  for (const char* bad : {"NaN", "Infinity", "-Infinity"}) {
    const std::string line = std::string(R"({"seq":1,"kind":"call","name":"a","path":"p","values":{"x":)") + bad + "}}";
    try {
      parse_event_line(line, 1);
      FAIL() << bad;
    } catch (const TraceError& e) {
      EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
    }
  }
  // inside a string it is just text
  EXPECT_NO_THROW(parse_event_line(R"({"seq":1,"kind":"call","name":"NaN","path":"p","values":{}})", 1));
}

TEST(Trace, MalformedLines) {
  EXPECT_THROW(parse_event_line("{", 1), TraceError);
  EXPECT_THROW(parse_event_line(R"({"seq":1,"kind":"jump","name":"a","path":"p","values":{}})", 1), TraceError);
  EXPECT_THROW(parse_event_line(R"({"seq":1,"kind":"call","name":"a","path":"p","values":{},"x":1})", 1), TraceError);
  EXPECT_THROW(parse_event_line(R"({"seq":-1,"kind":"call","name":"a","path":"p","values":{}})", 1), TraceError);
  EXPECT_THROW(parse_event_line(R"({"kind":"call","name":"a","path":"p","values":{}})", 1), TraceError);
  EXPECT_THROW(parse_event_line(R"([1,2])", 1), TraceError);
}

TEST(Trace, WriteReadIdentity) {
  std::vector<RuntimeEvent> events = {
      event(1, EventKind::Call, "a", "top", {{"x", 0.1}, {"s", Value::text("hi")}, {"b", true}}),
      event(2, EventKind::Emit, "note", "top/c", {{"sym", Value::symbol("normal")}}),
      event(7, EventKind::Return, "a", "top", {{"y", -1e-300}, {"z", 1.0 / 3.0}}),
  };
  events[0].ts = 0.25;
  std::stringstream buf;
  write_trace(buf, events);
  EXPECT_EQ(read_trace(buf), events);
}

TEST(Trace, ProbeNumbersFromOne) {
  VectorSink sink;
  ProbeHandle probe(sink);
  EXPECT_EQ(probe.emit(EventKind::Call, "a", "top"), 1u);
  EXPECT_EQ(probe.emit(EventKind::Return, "a", "top"), 2u);
  EXPECT_EQ(probe.last_seq(), 2u);
  ASSERT_EQ(sink.events().size(), 2u);
  EXPECT_EQ(sink.events()[1].seq, 2u);
}

TEST(Trace, EmitAfterCloseThrows) {
  VectorSink sink;
  ProbeHandle probe(sink);
  probe.emit(EventKind::Call, "a", "top");
  probe.close();
  EXPECT_FALSE(probe.is_open());
  EXPECT_THROW(probe.emit(EventKind::Call, "a", "top"), ProbeClosed);
  EXPECT_EQ(sink.events().size(), 1u);
}

TEST(Trace, ChannelAcrossThreads) {
  EventChannel channel;
  std::thread producer([&] {
    ChannelSink sink(channel);
    ProbeHandle probe(sink);
    for (int i = 0; i < 100; ++i) probe.emit(EventKind::Emit, "tick", "top");
  });  // handle destructor closes the channel
  std::uint64_t expected = 1;
  while (auto ev = channel.pop()) EXPECT_EQ(ev->seq, expected++);
  producer.join();
  EXPECT_EQ(expected, 101u);
  EXPECT_THROW(channel.push(RuntimeEvent{}), ProbeClosed);
}

TEST(Trace, BindingsJson) {
  Bindings b = parse_bindings_json(R"({"kp": 1.5, "name": "x", "controller-step/comp-der:kd": 2})");
  EXPECT_EQ(b.at("kp").as_number(), 1.5);
  EXPECT_TRUE(b.at("name").is_text());
  EXPECT_EQ(parse_bindings_json(format_bindings_json(b)), b);
  EXPECT_THROW(parse_bindings_json("[1]"), TraceError);
  EXPECT_THROW(parse_bindings_json(R"({"x": NaN})"), TraceError);
}
