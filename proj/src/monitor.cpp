#include "specmon/monitor.hpp"

#include <algorithm>

#include "specmon/validator.hpp"

namespace specmon {

std::string_view to_string(Flag f) {
  switch (f) {
    case Flag::Ready: return "READY";
    case Flag::Running: return "RUNNING";
    case Flag::Completed: return "COMPLETED";
  }
  return "READY";
}

std::string_view to_string(Mode m) { return m == Mode::Normal ? "NORMAL" : "COMPROMISED"; }

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::Entry: return "ENTRY";
    case EventClass::Exit: return "EXIT";
    case EventClass::Allowable: return "ALLOWABLE";
    case EventClass::None: return "NONE";
  }
  return "NONE";
}

std::string_view to_string(AlarmReason r) {
  switch (r) {
    case AlarmReason::Precondition: return "PRECONDITION";
    case AlarmReason::Postcondition: return "POSTCONDITION";
    case AlarmReason::Invariant: return "INVARIANT";
    case AlarmReason::UnexpectedEvent: return "UNEXPECTED_EVENT";
    case AlarmReason::AttackPlan: return "ATTACK_PLAN";
    case AlarmReason::IncompleteData: return "INCOMPLETE_DATA";
  }
  return "UNEXPECTED_EVENT";
}

std::string_view to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Ok: return "OK";
    case VerdictKind::Alarm: return "ALARM";
    case VerdictKind::Incomplete: return "INCOMPLETE";
  }
  return "INCOMPLETE";
}

EngineError::EngineError(std::uint64_t seq, const std::string& message)
    : std::runtime_error("seq " + std::to_string(seq) + ": " + message), seq_(seq) {}

std::string ComponentInstance::active_behavior() const {
  return std::string(mode == Mode::Compromised && has_compromised_model ? kCompromisedMode : kNormalMode);
}

ComponentInstance* ComponentInstance::child(std::string_view instance_name) const {
  for (const auto& c : children) {
    if (c->name == instance_name) return c.get();
  }
  return nullptr;
}

namespace {

bool contains(const std::vector<std::string>& v, std::string_view x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Failed-condition record for something that is not a CondExpr (missing data,
// payload disagreeing with a prediction).
ConditionResult synthetic_failure(std::string condition, Bindings values = {}) {
  ConditionResult r;
  r.condition = std::move(condition);
  r.status = CondStatus::Fail;
  r.values = std::move(values);
  return r;
}

bool is_guarded(const EnsembleDef& e, std::string_view instance) {
  for (const auto& cf : e.controlflows) {
    if (cf.target == instance) return true;
  }
  for (const auto& s : e.splits) {
    for (const auto& b : s.branches) {
      if (b.target == instance) return true;
    }
  }
  for (const auto& j : e.joins) {
    if (j.target == instance) return true;
  }
  return false;
}

// Invariant conditions whose identifiers are all bound; the rest wait for exit.
std::vector<CondExpr> bound_only(const std::vector<CondExpr>& conds, const Bindings& env) {
  std::vector<CondExpr> out;
  for (const auto& c : conds) {
    std::set<std::string> ids;
    collect_free_identifiers(c, ids);
    if (std::all_of(ids.begin(), ids.end(), [&](const std::string& id) { return env.contains(id); })) {
      out.push_back(c);
    }
  }
  return out;
}

void append_failures(std::vector<ConditionResult>& out, const ConditionReport& report) {
  for (auto& f : report.failures()) out.push_back(std::move(f));
}

bool truthy(const CondExpr& guard, const Bindings& env, const EvalContext& ctx) {
  try {
    Value v = eval_expr(guard, env, ctx);
    return v.is_bool() && v.as_bool();
  } catch (const EvalError&) {
    return false;
  }
}

void for_each_instance(const ComponentInstance& inst, const std::function<void(const ComponentInstance&)>& fn) {
  fn(inst);
  for (const auto& c : inst.children) for_each_instance(*c, fn);
}

}  // namespace

MonitorSession::MonitorSession(AppSpec spec, MonitorConfig config) : spec_(std::move(spec)), config_(std::move(config)) {
  ValidationReport report = validate_spec(spec_);
  if (!report.ok()) throw std::invalid_argument("invalid spec:\n" + format_report(report));
  if (spec_.top_component.empty()) spec_.top_component = find_top_component(spec_);

  for (const auto& [name, model] : spec_.attack_models) {
    for (const auto& t : model.attack_types) {
      MatchedAttack m{t.name, name, t.prior, {}};
      for (const auto& vm : model.vulnerability_mapping) {
        if (vm.attack_type == t.name) m.vulnerabilities.emplace_back(vm.vulnerability, vm.probability);
      }
      attacks_.registered.emplace(t.name, std::move(m));
    }
  }

  root_ = make_instance(spec_.top_component, spec_.top_component, nullptr);
  reset_for_activation(*root_);
  if (config_.check_invariants) {
    checker_ = std::make_unique<InvariantChecker>();
    checker_->observe(*root_);
  }
}

MonitorSession::~MonitorSession() = default;
MonitorSession::MonitorSession(MonitorSession&&) noexcept = default;
MonitorSession& MonitorSession::operator=(MonitorSession&&) noexcept = default;

std::unique_ptr<ComponentInstance> MonitorSession::make_instance(const std::string& name, const std::string& type,
                                                                 ComponentInstance* parent) {
  auto inst = std::make_unique<ComponentInstance>();
  inst->name = name;
  inst->type = type;
  inst->path = parent ? parent->path + "/" + name : name;
  inst->parent = parent;
  inst->iface = resolve_interface(spec_, type);
  inst->has_compromised_model = spec_.find_behavior(type, std::string(kCompromisedMode)) != nullptr;
  return inst;
}

void MonitorSession::reset_for_activation(ComponentInstance& inst) {
  inst.flag = Flag::Ready;
  inst.entry_checked = false;
  inst.inputs.clear();
  inst.outputs.clear();
  inst.predicted.clear();
  ++inst.activation;
  inst.enabled = inst.parent == nullptr || !is_guarded(*inst.parent->iface.ensemble, inst.name);

  const std::string prefix = inst.parent ? inst.path + ":" : std::string();
  for (const auto& port : inst.iface.inputs) {
    if (auto it = config_.parameters.find(prefix + port); it != config_.parameters.end()) {
      inst.inputs[port] = it->second;
    }
    if (auto it = inst.latched.find(port); it != inst.latched.end()) inst.inputs[port] = it->second;
  }
}

const BehaviorModelDef* MonitorSession::active_model(const ComponentInstance& inst) const {
  if (inst.mode == Mode::Compromised) {
    if (auto* m = spec_.find_behavior(inst.type, std::string(kCompromisedMode))) return m;
  }
  return spec_.find_behavior(inst.type, std::string(kNormalMode));
}

Bindings MonitorSession::scope(const ComponentInstance& inst) const {
  Bindings env = inst.inputs;
  for (const auto& [k, v] : inst.outputs) env.insert_or_assign(k, v);
  return env;
}

Alarm& MonitorSession::raise(ComponentInstance& inst, AlarmReason reason, std::uint64_t seq,
                             const std::string& event) {
  inst.mode = Mode::Compromised;
  Alarm a;
  a.seq = seq;
  a.path = inst.path;
  a.reason = reason;
  a.event = event;
  a.observed = scope(inst);
  alarms_.push_back(std::move(a));
  return alarms_.back();
}

ComponentInstance* MonitorSession::resolve(const std::string& path, bool& exact) {
  exact = false;
  std::vector<std::string> parts;
  for (std::size_t start = 0;;) {
    const std::size_t slash = path.find('/', start);
    parts.push_back(path.substr(start, slash == std::string::npos ? std::string::npos : slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  if (parts.empty() || parts[0] != root_->name) return root_.get();
  ComponentInstance* cur = root_.get();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    ComponentInstance* c = cur->child(parts[i]);
    if (!c) return cur;
    cur = c;
  }
  exact = true;
  return cur;
}

ComponentInstance* MonitorSession::find_mutable(std::string_view path) const {
  ComponentInstance* found = nullptr;
  std::function<void(ComponentInstance&)> walk = [&](ComponentInstance& i) {
    if (found) return;
    if (i.path == path) {
      found = &i;
      return;
    }
    for (auto& c : i.children) walk(*c);
  };
  walk(*root_);
  return found;
}

const ComponentInstance* MonitorSession::find(std::string_view path) const { return find_mutable(path); }

EventClass MonitorSession::classify_event(const RuntimeEvent& ev, const ComponentInstance& inst) const {
  const auto& iface = inst.iface;
  switch (ev.kind) {
    case EventKind::Call: {
      if (iface.entry_auto || !contains(iface.entry_events, ev.name)) return EventClass::None;
      const bool ready = inst.flag == Flag::Ready || (inst.parent == nullptr && inst.flag == Flag::Completed);
      const bool parent_running = inst.parent == nullptr || inst.parent->flag == Flag::Running;
      return ready && inst.enabled && parent_running ? EventClass::Entry : EventClass::None;
    }
    case EventKind::Return:
      return contains(iface.exit_events, ev.name) && inst.flag == Flag::Running ? EventClass::Exit : EventClass::None;
    case EventKind::Emit: {
      if (inst.flag != Flag::Running) return EventClass::None;
      if (contains(iface.allowable_events, ev.name)) return EventClass::Allowable;
      if (auto* m = active_model(inst); m && contains(m->allowable_events, ev.name)) return EventClass::Allowable;
      return EventClass::None;
    }
  }
  return EventClass::None;
}

bool MonitorSession::check_no_attack(const ComponentInstance& inst) const {
  const auto& marked = attacks_.compromised;
  if (marked.contains(inst.name) || marked.contains(inst.path) || marked.contains(inst.type)) return false;
  for (const ComponentInstance* p = &inst; p; p = p->parent) {
    for (const auto& r : p->iface.resources) {
      if (marked.contains(r)) return false;
    }
  }
  for (const auto& t : attacks_.active) {
    auto it = attacks_.registered.find(t);
    if (it == attacks_.registered.end()) continue;
    for (const auto& [vuln, prob] : it->second.vulnerabilities) {
      if (contains(inst.iface.vulnerabilities, vuln)) return false;
    }
  }
  return true;
}

void MonitorSession::handle_event(const RuntimeEvent& ev) {
  if (halted_) return;
  if (ev.seq <= last_seq_) {
    throw EngineError(ev.seq, "sequence number not greater than previous " + std::to_string(last_seq_));
  }
  last_seq_ = ev.seq;
  ++events_;
  attacks_.observed.insert(ev.name);

  bool exact = false;
  ComponentInstance* inst = resolve(ev.path, exact);
  if (!exact) {
    Alarm& a = raise(*inst, AlarmReason::UnexpectedEvent, ev.seq, ev.name);
    a.detail = "no live instance at path '" + ev.path + "'";
  } else {
    switch (classify_event(ev, *inst)) {
      case EventClass::Entry: handle_entry(*inst, ev); break;
      case EventClass::Exit: handle_exit(*inst, ev); break;
      case EventClass::Allowable: handle_allowable(*inst, ev); break;
      case EventClass::None: {
        Alarm& a = raise(*inst, AlarmReason::UnexpectedEvent, ev.seq, ev.name);
        a.detail = std::string(to_string(ev.kind)) + " '" + ev.name + "' not permitted while " +
                   std::string(to_string(inst->flag));
        break;
      }
    }
  }

  apply_attack_rules(ev.seq, ev.name);
  if (checker_) checker_->observe(*root_);
  if (config_.halt_on_first && !alarms_.empty()) halted_ = true;
}

void MonitorSession::handle_entry(ComponentInstance& inst, const RuntimeEvent& ev) {
  if (inst.parent == nullptr && inst.flag == Flag::Completed) reset_for_activation(inst);

  std::vector<ConditionResult> mismatches;
  for (const auto& [port, v] : ev.values) {
    if (!contains(inst.iface.inputs, port)) {
      throw EngineError(ev.seq, "'" + port + "' is not an input of " + inst.path);
    }
    auto it = inst.inputs.find(port);
    if (it == inst.inputs.end()) {
      inst.inputs.emplace(port, v);
    } else if (!values_equal(it->second, v, config_.tolerance)) {
      mismatches.push_back(synthetic_failure("(equal " + port + " " + to_string(it->second) + ")", {{port, v}}));
    }
  }
  if (!mismatches.empty()) {
    Alarm& a = raise(inst, AlarmReason::Precondition, ev.seq, ev.name);
    a.failed = std::move(mismatches);
    a.detail = "entry payload disagrees with predicted inputs";
  }

  if (!inst.entry_checked) {
    inst.entry_checked = true;
    if (inputs_complete(inst)) {
      check_entry(inst, ev.seq, ev.name);
    } else {
      std::vector<ConditionResult> missing;
      for (const auto& port : inst.iface.inputs) {
        if (!inst.inputs.contains(port)) missing.push_back(synthetic_failure("(bound " + port + ")"));
      }
      Alarm& a = raise(inst, AlarmReason::IncompleteData, ev.seq, ev.name);
      a.failed = std::move(missing);
      a.detail = "inputs missing at entry";
    }
  }
  enter(inst, ev.seq);
}

void MonitorSession::enter(ComponentInstance& inst, std::uint64_t seq) {
  inst.flag = Flag::Running;
  const EnsembleDef* e = inst.iface.ensemble;
  if (!e) return;

  if (inst.children.empty()) {
    for (const auto& ref : e->components) inst.children.push_back(make_instance(ref.instance, ref.type, &inst));
  }
  for (auto& c : inst.children) reset_for_activation(*c);

  for (const auto& df : e->dataflows) {
    if (df.src_instance != e->name) continue;
    auto it = inst.inputs.find(df.src_port);
    if (it == inst.inputs.end()) continue;
    if (df.dst_instance == e->name) {
      if (contains(inst.iface.outputs, df.dst_port)) {
        inst.predicted[df.dst_port] = it->second;
        inst.outputs[df.dst_port] = it->second;
      }
      continue;
    }
    if (ComponentInstance* c = inst.child(df.dst_instance)) bind_input(*c, df.dst_port, it->second, seq, "");
  }
  for (auto& c : inst.children) inputs_changed(*c, seq, "");
}

void MonitorSession::bind_input(ComponentInstance& inst, const std::string& port, const Value& v, std::uint64_t seq,
                                const std::string& event) {
  auto it = inst.inputs.find(port);
  if (it == inst.inputs.end()) {
    inst.inputs.emplace(port, v);
    return;
  }
  // Already bound by an entry payload or a parameter: the dataflow value is
  // the prediction and must agree.
  if (values_equal(it->second, v, config_.tolerance)) return;
  Alarm& a = raise(inst, AlarmReason::Precondition, seq, event);
  a.failed.push_back(synthetic_failure("(equal " + port + " " + to_string(v) + ")", {{port, it->second}}));
  a.detail = "bound input disagrees with dataflow";
}

bool MonitorSession::inputs_complete(const ComponentInstance& inst) const {
  return std::all_of(inst.iface.inputs.begin(), inst.iface.inputs.end(),
                     [&](const std::string& p) { return inst.inputs.contains(p); });
}

void MonitorSession::inputs_changed(ComponentInstance& inst, std::uint64_t seq, const std::string& event) {
  if (inst.parent && inst.parent->flag != Flag::Running) return;
  if (inst.flag != Flag::Ready || inst.entry_checked || !inst.enabled) return;
  if (!inputs_complete(inst)) return;
  inst.entry_checked = true;
  check_entry(inst, seq, event);
  if (inst.iface.entry_auto) enter(inst, seq);
}

bool MonitorSession::check_entry(ComponentInstance& inst, std::uint64_t seq, const std::string& event) {
  EvalContext ctx{config_.tolerance, nullptr};
  ConditionReport pre, inv;
  if (const BehaviorModelDef* m = active_model(inst)) {
    pre = check_conditions(m->prerequisites, inst.inputs, ctx);
    auto conds = bound_only(m->invariant, inst.inputs);
    inv = check_conditions(conds, inst.inputs, ctx);
  }
  const bool noatk = check_no_attack(inst);
  if (pre.passed && inv.passed && noatk) return true;

  AlarmReason reason = !pre.passed ? AlarmReason::Precondition
                       : !inv.passed ? AlarmReason::Invariant
                                     : AlarmReason::AttackPlan;
  Alarm& a = raise(inst, reason, seq, event);
  append_failures(a.failed, pre);
  append_failures(a.failed, inv);
  if (!noatk) {
    a.detail = "active attack plan affects this component";
    for (const auto& t : attacks_.active) a.attacks.push_back(attacks_.registered.at(t));
  }
  return false;
}

void MonitorSession::handle_exit(ComponentInstance& inst, const RuntimeEvent& ev) {
  std::vector<ConditionResult> mismatches;
  for (const auto& [port, v] : ev.values) {
    if (!contains(inst.iface.outputs, port)) {
      throw EngineError(ev.seq, "'" + port + "' is not an output of " + inst.path);
    }
    if (auto it = inst.predicted.find(port); it != inst.predicted.end() && !values_equal(it->second, v, config_.tolerance)) {
      mismatches.push_back(synthetic_failure("(equal " + port + " " + to_string(it->second) + ")", {{port, v}}));
    }
    inst.outputs.insert_or_assign(port, v);
  }
  if (!mismatches.empty()) {
    Alarm& a = raise(inst, AlarmReason::Postcondition, ev.seq, ev.name);
    a.failed = std::move(mismatches);
    a.detail = "observed output disagrees with prediction";
  }

  std::vector<ConditionResult> missing;
  for (const auto& c : inst.children) {
    if (c->enabled && c->flag != Flag::Completed) missing.push_back(synthetic_failure("(completed " + c->name + ")"));
  }
  for (const auto& port : inst.iface.outputs) {
    if (!inst.outputs.contains(port)) missing.push_back(synthetic_failure("(bound " + port + ")"));
  }
  const bool outputs_bound = std::all_of(inst.iface.outputs.begin(), inst.iface.outputs.end(),
                                         [&](const std::string& p) { return inst.outputs.contains(p); });
  if (!missing.empty()) {
    Alarm& a = raise(inst, AlarmReason::IncompleteData, ev.seq, ev.name);
    a.failed = std::move(missing);
    a.detail = "data missing at exit";
  }

  if (outputs_bound) {
    EvalContext ctx{config_.tolerance, nullptr};
    const Bindings env = scope(inst);
    ConditionReport post, inv;
    if (const BehaviorModelDef* m = active_model(inst)) {
      post = check_conditions(m->postconditions, env, ctx);
      inv = check_conditions(m->invariant, env, ctx);
    }
    const bool noatk = check_no_attack(inst);
    if (!post.passed || !inv.passed || !noatk) {
      AlarmReason reason = !post.passed ? AlarmReason::Postcondition
                           : !inv.passed ? AlarmReason::Invariant
                                         : AlarmReason::AttackPlan;
      Alarm& a = raise(inst, reason, ev.seq, ev.name);
      append_failures(a.failed, post);
      append_failures(a.failed, inv);
      if (!noatk) {
        a.detail = "active attack plan affects this component";
        for (const auto& t : attacks_.active) a.attacks.push_back(attacks_.registered.at(t));
      }
    }
  }

  inst.flag = Flag::Completed;
  record_behavior(inst, ev.seq, inst.mode == Mode::Normal);

  if (const EnsembleDef* e = inst.iface.ensemble) {
    for (const auto& df : e->dataflows) {
      if (df.src_instance != e->name || df.dst_instance != e->name) continue;
      if (!contains(inst.iface.outputs, df.src_port) || !contains(inst.iface.inputs, df.dst_port)) continue;
      if (auto it = inst.outputs.find(df.src_port); it != inst.outputs.end()) inst.latched[df.dst_port] = it->second;
    }
  }
  if (inst.parent) complete_child(inst, ev.seq, ev.name);
}

void MonitorSession::complete_child(ComponentInstance& child, std::uint64_t seq, const std::string& event) {
  ComponentInstance& parent = *child.parent;
  const EnsembleDef& e = *parent.iface.ensemble;
  EvalContext ctx{config_.tolerance, nullptr};

  std::vector<ComponentInstance*> touched;
  for (const auto& df : e.dataflows) {
    if (df.src_instance != child.name) continue;
    auto it = child.outputs.find(df.src_port);
    if (it == child.outputs.end()) continue;
    if (df.dst_instance == e.name) {
      parent.predicted[df.dst_port] = it->second;
      parent.outputs[df.dst_port] = it->second;
    } else if (ComponentInstance* sib = parent.child(df.dst_instance)) {
      bind_input(*sib, df.dst_port, it->second, seq, event);
      if (std::find(touched.begin(), touched.end(), sib) == touched.end()) touched.push_back(sib);
    }
  }

  for (const auto& cf : e.controlflows) {
    if (cf.branch == child.name && truthy(cf.guard, child.outputs, ctx)) {
      if (ComponentInstance* t = parent.child(cf.target)) enable(*t, seq, event);
    }
  }
  for (const auto& s : e.splits) {
    if (s.source != child.name) continue;
    std::size_t taken = 0;
    for (const auto& b : s.branches) {
      if (!truthy(b.guard, child.outputs, ctx)) continue;
      ++taken;
      if (ComponentInstance* t = parent.child(b.target)) enable(*t, seq, event);
    }
    if (taken == 0) {
      std::vector<ConditionResult> failed;
      for (const auto& b : s.branches) failed.push_back(synthetic_failure(print_cond(b.guard), child.outputs));
      Alarm& a = raise(child, AlarmReason::Precondition, seq, event);
      a.failed = std::move(failed);
      a.detail = "no split branch taken";
    }
  }
  for (const auto& j : e.joins) {
    if (!contains(j.required, child.name)) continue;
    const bool all_done = std::all_of(j.required.begin(), j.required.end(), [&](const std::string& r) {
      const ComponentInstance* c = parent.child(r);
      return c && c->flag == Flag::Completed;
    });
    if (all_done) {
      if (ComponentInstance* t = parent.child(j.target)) enable(*t, seq, event);
    }
  }
  for (ComponentInstance* sib : touched) inputs_changed(*sib, seq, event);
}

void MonitorSession::enable(ComponentInstance& inst, std::uint64_t seq, const std::string& event) {
  if (inst.enabled) return;
  inst.enabled = true;
  inputs_changed(inst, seq, event);
}

void MonitorSession::handle_allowable(ComponentInstance& inst, const RuntimeEvent& ev) {
  EvalContext ctx{config_.tolerance, nullptr};
  const Bindings env = scope(inst);
  ConditionReport inv;
  if (const BehaviorModelDef* m = active_model(inst)) inv = check_conditions(bound_only(m->invariant, env), env, ctx);
  const bool noatk = check_no_attack(inst);
  if (inv.passed && noatk) return;
  Alarm& a = raise(inst, inv.passed ? AlarmReason::AttackPlan : AlarmReason::Invariant, ev.seq, ev.name);
  append_failures(a.failed, inv);
  if (!noatk) {
    a.detail = "active attack plan affects this component";
    for (const auto& t : attacks_.active) a.attacks.push_back(attacks_.registered.at(t));
  }
}

void MonitorSession::record_behavior(const ComponentInstance& inst, std::uint64_t seq, bool normal) {
  auto& h = history_[inst.path];
  (normal ? h.normal : h.compromised).push_back({seq, inst.inputs, inst.outputs});
}

bool MonitorSession::rule_predicate(const CondExpr& call, bool& ok) const {
  auto arg = [&](std::size_t i) -> std::string {
    return i < call.args.size() && call.args[i].kind == CondExpr::Kind::Ref ? call.args[i].name : std::string();
  };
  ok = true;
  const std::string x = arg(0);
  if (call.name == "attack") return attacks_.active.contains(x);
  if (call.name == "observed") return attacks_.observed.contains(x);
  if (call.name == "compromised") {
    if (attacks_.compromised.contains(x)) return true;
    bool hit = false;
    for_each_instance(*root_, [&](const ComponentInstance& i) {
      if ((i.name == x || i.type == x || i.path == x) && i.mode == Mode::Compromised) hit = true;
    });
    return hit;
  }
  if (call.name == "vulnerable") {
    const std::string v = arg(1);
    for (const auto& [name, e] : spec_.ensembles) {
      if (name == x && contains(e.vulnerabilities, v)) return true;
      for (const auto& ref : e.components) {
        if (ref.instance != x) continue;
        if (const EnsembleDef* t = spec_.find_ensemble(ref.type); t && contains(t->vulnerabilities, v)) return true;
      }
    }
    return false;
  }
  ok = false;
  return false;
}

void MonitorSession::apply_attack_rules(std::uint64_t seq, const std::string& event) {
  if (!config_.attack_rules_enabled || spec_.attack_rules.empty()) return;
  PredicateHook hook = [this](const CondExpr& call) -> std::optional<Value> {
    bool ok = false;
    bool r = rule_predicate(call, ok);
    if (!ok) return std::nullopt;
    return Value(r);
  };
  EvalContext ctx{config_.tolerance, &hook};
  const Bindings empty;

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& rule : spec_.attack_rules) {
      if (attacks_.fired.contains(rule.name)) continue;
      const bool holds = std::all_of(rule.conditions.begin(), rule.conditions.end(),
                                     [&](const CondExpr& c) { return truthy(c, empty, ctx); });
      if (!holds) continue;
      attacks_.fired.insert(rule.name);
      changed = true;

      std::vector<MatchedAttack> matched;
      ComponentInstance* target = nullptr;
      for (const auto& cons : rule.consequences) {
        if (cons.kind == AttackConsequence::Kind::AttackActive) {
          attacks_.active.insert(cons.target);
          if (auto it = attacks_.registered.find(cons.target); it != attacks_.registered.end()) {
            matched.push_back(it->second);
          }
        } else {
          attacks_.compromised.insert(cons.target);
          for_each_instance(*root_, [&](const ComponentInstance& i) {
            if (i.name != cons.target && i.path != cons.target) return;
            auto* live = const_cast<ComponentInstance*>(&i);
            if (!target) target = live;
            live->mode = Mode::Compromised;
          });
        }
      }
      Alarm& a = raise(target ? *target : *root_, AlarmReason::AttackPlan, seq, event);
      a.rule = rule.name;
      a.attacks = std::move(matched);
      a.detail = "attack rule fired";
    }
  }
}

InstanceSnapshot snapshot(const ComponentInstance& inst) {
  InstanceSnapshot s;
  s.path = inst.path;
  s.type = inst.type;
  s.flag = inst.flag;
  s.mode = inst.mode;
  s.behavior = inst.active_behavior();
  s.activation = inst.activation;
  s.inputs = inst.inputs;
  s.outputs = inst.outputs;
  for (const auto& c : inst.children) s.children.push_back(snapshot(*c));
  return s;
}

Verdict MonitorSession::verdict() const {
  Verdict v;
  if (!alarms_.empty()) {
    v.kind = VerdictKind::Alarm;
  } else if (root_->flag == Flag::Completed && root_->mode == Mode::Normal) {
    v.kind = VerdictKind::Ok;
  } else {
    v.kind = VerdictKind::Incomplete;
  }
  v.alarms = alarms_;
  v.tree = snapshot(*root_);
  v.history = history_;
  v.active_attacks = attacks_.active;
  v.events = events_;
  v.last_seq = last_seq_;
  return v;
}

Verdict run_monitor(const AppSpec& spec, const std::vector<RuntimeEvent>& trace, const MonitorConfig& config) {
  MonitorSession session(spec, config);
  for (const auto& ev : trace) {
    session.handle_event(ev);
    if (session.halted()) break;
  }
  Verdict v = session.verdict();
  if (config.check_invariants) InvariantChecker::check_verdict(v);
  return v;
}

Verdict run_monitor(const AppSpec& spec, TraceReader& reader, const MonitorConfig& config) {
  MonitorSession session(spec, config);
  while (auto ev = reader.next()) {
    session.handle_event(*ev);
    if (session.halted()) break;
  }
  Verdict v = session.verdict();
  if (config.check_invariants) InvariantChecker::check_verdict(v);
  return v;
}

void InvariantChecker::observe(const ComponentInstance& root) { walk(root); }

void InvariantChecker::walk(const ComponentInstance& inst) {
  auto it = seen_.find(inst.path);
  if (it != seen_.end()) {
    const Seen& prev = it->second;
    if (prev.mode == Mode::Compromised && inst.mode == Mode::Normal) {
      throw InvariantViolation(inst.path + ": mode went from COMPROMISED back to NORMAL");
    }
    if (inst.activation < prev.activation) throw InvariantViolation(inst.path + ": activation counter went back");
    if (inst.activation == prev.activation && static_cast<int>(inst.flag) < static_cast<int>(prev.flag)) {
      throw InvariantViolation(inst.path + ": flag went from " + std::string(to_string(prev.flag)) + " to " +
                               std::string(to_string(inst.flag)));
    }
  }
  seen_[inst.path] = {inst.activation, inst.flag, inst.mode};
  for (const auto& c : inst.children) walk(*c);
}

namespace {
bool any_compromised(const InstanceSnapshot& s) {
  if (s.mode == Mode::Compromised) return true;
  return std::any_of(s.children.begin(), s.children.end(), any_compromised);
}
}  // namespace

void InvariantChecker::check_verdict(const Verdict& v) {
  const bool ok = v.tree.flag == Flag::Completed && v.tree.mode == Mode::Normal && v.alarms.empty();
  const bool alarm = !v.alarms.empty();
  const bool incomplete = v.alarms.empty() && v.tree.flag != Flag::Completed;
  if (static_cast<int>(ok) + static_cast<int>(alarm) + static_cast<int>(incomplete) != 1) {
    throw InvariantViolation("verdict trichotomy broken");
  }
  const VerdictKind expected = ok ? VerdictKind::Ok : alarm ? VerdictKind::Alarm : VerdictKind::Incomplete;
  if (v.kind != expected) throw InvariantViolation("verdict disagrees with final state");
  if (alarm != any_compromised(v.tree)) throw InvariantViolation("alarm log and compromised modes disagree");
  for (const auto& a : v.alarms) {
    if (a.failed.empty() && a.rule.empty() && a.reason != AlarmReason::UnexpectedEvent && a.attacks.empty()) {
      throw InvariantViolation("alarm at seq " + std::to_string(a.seq) + " carries no diagnostic");
    }
  }
}

}  // namespace specmon
