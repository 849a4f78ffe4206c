#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "specmon/condition.hpp"
#include "specmon/spec.hpp"
#include "specmon/trace.hpp"

namespace specmon {

enum class Flag { Ready, Running, Completed };
enum class Mode { Normal, Compromised };
enum class EventClass { Entry, Exit, Allowable, None };
enum class AlarmReason { Precondition, Postcondition, Invariant, UnexpectedEvent, AttackPlan, IncompleteData };
enum class VerdictKind { Ok, Alarm, Incomplete };

std::string_view to_string(Flag f);
std::string_view to_string(Mode m);
std::string_view to_string(EventClass c);
std::string_view to_string(AlarmReason r);
std::string_view to_string(VerdictKind v);

struct MonitorConfig {
  Tolerance tolerance;
  bool attack_rules_enabled = true;
  bool halt_on_first = false;
  // Values for root inputs not carried by the entry event (gains, initial
  // state). Keys are port names; "path:port" addresses a nested instance.
  Bindings parameters;
  // Run the engine-level consistency checker after every event.
  bool check_invariants = false;
};

// Spec/trace structural mismatch. Distinct from alarms: no verdict is produced.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::uint64_t seq, const std::string& message);
  std::uint64_t seq() const { return seq_; }

 private:
  std::uint64_t seq_;
};

// Raised by the consistency checker (mode regression, flag disorder,
// verdict inconsistency). Indicates an engine bug, never an attack.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ComponentInstance {
  std::string name;  // instance name inside the parent
  std::string path;
  std::string type;
  Flag flag = Flag::Ready;
  Mode mode = Mode::Normal;
  bool enabled = true;
  bool entry_checked = false;
  bool has_compromised_model = false;
  std::uint64_t activation = 0;
  Bindings inputs;
  Bindings outputs;    // observed values shadow predicted ones
  Bindings predicted;  // ensemble outputs computed from children
  Bindings latched;    // state carried to the next activation
  ComponentInterface iface;
  ComponentInstance* parent = nullptr;
  std::vector<std::unique_ptr<ComponentInstance>> children;

  std::string active_behavior() const;
  ComponentInstance* child(std::string_view instance_name) const;
};

struct MatchedAttack {
  std::string attack_type;
  std::string model;
  double prior = 0.0;
  std::vector<std::pair<std::string, double>> vulnerabilities;
  friend bool operator==(const MatchedAttack&, const MatchedAttack&) = default;
};

struct Alarm {
  std::uint64_t seq = 0;
  std::string path;
  AlarmReason reason = AlarmReason::UnexpectedEvent;
  std::string event;  // name of the triggering event
  std::vector<ConditionResult> failed;
  Bindings observed;
  std::string rule;  // fired attack rule, ATTACK_PLAN only
  std::vector<MatchedAttack> attacks;
  std::string detail;
};

struct BehaviorRecord {
  std::uint64_t seq = 0;
  Bindings inputs;
  Bindings outputs;
};

struct BehaviorHistory {
  std::vector<BehaviorRecord> normal;
  std::vector<BehaviorRecord> compromised;
};

// Attack-plan part of the environment.
struct AttackEnvironment {
  std::map<std::string, MatchedAttack> registered;  // attack type -> model info
  std::set<std::string> active;                     // asserted attack types
  std::set<std::string> compromised;                // asserted instances/resources
  std::set<std::string> observed;                   // event names seen so far
  std::set<std::string> fired;                      // rule names
};

struct InstanceSnapshot {
  std::string path;
  std::string type;
  Flag flag = Flag::Ready;
  Mode mode = Mode::Normal;
  std::string behavior;
  std::uint64_t activation = 0;
  Bindings inputs;
  Bindings outputs;
  std::vector<InstanceSnapshot> children;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Incomplete;
  std::vector<Alarm> alarms;
  InstanceSnapshot tree;
  std::map<std::string, BehaviorHistory> history;
  std::set<std::string> active_attacks;
  std::uint64_t events = 0;
  std::uint64_t last_seq = 0;
};

class InvariantChecker;

class MonitorSession {
 public:
  // Throws std::invalid_argument listing violations when the spec is invalid.
  MonitorSession(AppSpec spec, MonitorConfig config = {});
  ~MonitorSession();
  MonitorSession(MonitorSession&&) noexcept;
  MonitorSession& operator=(MonitorSession&&) noexcept;

  // Throws EngineError on non-increasing seq or a payload that does not fit
  // the spec. Events after a halt are ignored.
  void handle_event(const RuntimeEvent& ev);

  EventClass classify_event(const RuntimeEvent& ev, const ComponentInstance& inst) const;
  bool check_no_attack(const ComponentInstance& inst) const;
  void apply_attack_rules(std::uint64_t seq, const std::string& event = {});

  const ComponentInstance& root() const { return *root_; }
  const ComponentInstance* find(std::string_view path) const;
  const std::vector<Alarm>& alarms() const { return alarms_; }
  const AttackEnvironment& attacks() const { return attacks_; }
  const std::map<std::string, BehaviorHistory>& history() const { return history_; }
  const AppSpec& spec() const { return spec_; }
  const MonitorConfig& config() const { return config_; }
  std::uint64_t last_seq() const { return last_seq_; }
  bool halted() const { return halted_; }

  Verdict verdict() const;

 private:
  ComponentInstance* resolve(const std::string& path, bool& exact);
  std::unique_ptr<ComponentInstance> make_instance(const std::string& name, const std::string& type,
                                                   ComponentInstance* parent);
  void reset_for_activation(ComponentInstance& inst);
  void start_root_activation();
  void enter(ComponentInstance& inst, std::uint64_t seq);
  void bind_input(ComponentInstance& inst, const std::string& port, const Value& v, std::uint64_t seq,
                  const std::string& event);
  void inputs_changed(ComponentInstance& inst, std::uint64_t seq, const std::string& event);
  bool inputs_complete(const ComponentInstance& inst) const;
  bool check_entry(ComponentInstance& inst, std::uint64_t seq, const std::string& event);
  void handle_entry(ComponentInstance& inst, const RuntimeEvent& ev);
  void handle_exit(ComponentInstance& inst, const RuntimeEvent& ev);
  void handle_allowable(ComponentInstance& inst, const RuntimeEvent& ev);
  void complete_child(ComponentInstance& child, std::uint64_t seq, const std::string& event);
  void enable(ComponentInstance& inst, std::uint64_t seq, const std::string& event);
  void record_behavior(const ComponentInstance& inst, std::uint64_t seq, bool normal);
  const BehaviorModelDef* active_model(const ComponentInstance& inst) const;
  Bindings scope(const ComponentInstance& inst) const;
  Alarm& raise(ComponentInstance& inst, AlarmReason reason, std::uint64_t seq, const std::string& event);
  ComponentInstance* find_mutable(std::string_view path) const;
  bool rule_predicate(const CondExpr& call, bool& ok) const;

  AppSpec spec_;
  MonitorConfig config_;
  std::unique_ptr<ComponentInstance> root_;
  std::vector<Alarm> alarms_;
  AttackEnvironment attacks_;
  std::map<std::string, BehaviorHistory> history_;
  std::uint64_t last_seq_ = 0;
  std::uint64_t events_ = 0;
  bool halted_ = false;
  std::unique_ptr<InvariantChecker> checker_;
};

InstanceSnapshot snapshot(const ComponentInstance& inst);

Verdict run_monitor(const AppSpec& spec, const std::vector<RuntimeEvent>& trace, const MonitorConfig& config = {});
Verdict run_monitor(const AppSpec& spec, TraceReader& reader, const MonitorConfig& config = {});

// Engine-level checker: modes never go back to NORMAL, flags move forward
// within one activation, verdict agrees with alarms and root state.
class InvariantChecker {
 public:
  void observe(const ComponentInstance& root);
  static void check_verdict(const Verdict& v);

 private:
  struct Seen {
    std::uint64_t activation;
    Flag flag;
    Mode mode;
  };
  void walk(const ComponentInstance& inst);
  std::map<std::string, Seen> seen_;
};

}  // namespace specmon
