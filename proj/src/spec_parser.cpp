#include "specmon/spec_parser.hpp"

#include <set>

namespace specmon {
namespace {

[[noreturn]] void fail(const std::string& message, SourceLoc loc) { throw ParseError(message, loc); }

const SExpr& expect_list(const SExpr& e, std::string_view what) {
  if (!e.is_list()) fail(std::string(what) + " must be a list", e.loc);
  return e;
}

std::string expect_name(const SExpr& e, std::string_view what) {
  if (!e.is_atom()) fail(std::string(what) + " must be a name", e.loc);
  return e.text;
}

std::vector<std::string> name_list(const SExpr& e, std::string_view slot) {
  expect_list(e, slot);
  std::vector<std::string> out;
  out.reserve(e.items.size());
  for (const auto& item : e.items) out.push_back(expect_name(item, std::string(slot) + " entry"));
  return out;
}

std::vector<CondExpr> cond_list(const SExpr& e, std::string_view slot) {
  expect_list(e, slot);
  std::vector<CondExpr> out;
  out.reserve(e.items.size());
  for (const auto& item : e.items) out.push_back(cond_from_sexpr(item));
  return out;
}

double probability(const SExpr& e) {
  if (e.kind != SExpr::Kind::Number) fail("probability must be a number", e.loc);
  if (e.number < 0.0 || e.number > 1.0) fail("probability outside [0, 1]", e.loc);
  return e.number;
}

std::string canonical_mode(const std::string& mode) {
  if (iequals(mode, kNormalMode)) return std::string(kNormalMode);
  if (iequals(mode, kCompromisedMode)) return std::string(kCompromisedMode);
  return mode;
}

// Walks `:slot value` pairs starting at items[first], rejecting repeats.
template <typename Handler>
void for_each_slot(const SExpr& form, std::size_t first, Handler&& handle) {
  std::set<std::string> seen;
  for (std::size_t i = first; i < form.items.size(); i += 2) {
    const SExpr& key = form.items[i];
    if (!key.is_atom() || key.text.empty() || key.text[0] != ':') fail("expected a :slot keyword", key.loc);
    if (i + 1 >= form.items.size()) fail("slot " + key.text + " has no value", key.loc);
    std::string slot = to_lower(key.text);
    if (!seen.insert(slot).second) fail("duplicate slot " + key.text, key.loc);
    if (!handle(slot, form.items[i + 1])) fail("unknown slot " + key.text, key.loc);
  }
}

ComponentRef parse_component(const SExpr& e) {
  expect_list(e, ":components entry");
  if (e.items.empty()) fail("empty :components entry", e.loc);
  ComponentRef c;
  c.loc = e.loc;
  c.instance = expect_name(e.items[0], "component instance");
  bool has_type = false;
  for_each_slot(e, 1, [&](const std::string& slot, const SExpr& v) {
    if (slot == ":type") {
      c.type = expect_name(v, ":type");
      has_type = true;
    } else if (slot == ":models") {
      for (auto& m : name_list(v, ":models")) c.models.push_back(canonical_mode(m));
    } else {
      return false;
    }
    return true;
  });
  if (!has_type) fail("component " + c.instance + " has no :type", e.loc);
  return c;
}

DataFlowDef parse_dataflow(const SExpr& e) {
  expect_list(e, ":dataflows entry");
  if (e.items.size() != 4) fail("dataflow must be (src-port src-instance dst-port dst-instance)", e.loc);
  return {expect_name(e.items[0], "dataflow port"), expect_name(e.items[1], "dataflow instance"),
          expect_name(e.items[2], "dataflow port"), expect_name(e.items[3], "dataflow instance"), e.loc};
}

ControlFlowDef parse_controlflow(const SExpr& e) {
  expect_list(e, ":controlflows entry");
  if (e.items.size() != 3) fail("controlflow must be (branch guard target)", e.loc);
  return {expect_name(e.items[0], "controlflow branch"), cond_from_sexpr(e.items[1]),
          expect_name(e.items[2], "controlflow target"), e.loc};
}

SplitDef parse_split(const SExpr& e) {
  expect_list(e, ":splits entry");
  if (e.items.size() < 2) fail("split must be (source (target guard) ...)", e.loc);
  SplitDef s;
  s.loc = e.loc;
  s.source = expect_name(e.items[0], "split source");
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& b = expect_list(e.items[i], "split branch");
    if (b.items.size() != 2) fail("split branch must be (target guard)", b.loc);
    s.branches.push_back({expect_name(b.items[0], "split target"), cond_from_sexpr(b.items[1])});
  }
  return s;
}

JoinDef parse_join(const SExpr& e) {
  expect_list(e, ":joins entry");
  if (e.items.size() != 2) fail("join must be (target (required ...))", e.loc);
  return {expect_name(e.items[0], "join target"), name_list(e.items[1], "join inputs"), e.loc};
}

ResourceDef parse_resource(const SExpr& e) {
  if (e.is_atom()) return {e.text, {}, e.loc};
  expect_list(e, ":resources entry");
  if (e.items.size() != 2) fail("resource must be name or (name kind)", e.loc);
  return {expect_name(e.items[0], "resource name"), expect_name(e.items[1], "resource kind"), e.loc};
}

template <typename T, typename F>
std::vector<T> parse_each(const SExpr& v, std::string_view slot, F&& f) {
  expect_list(v, slot);
  std::vector<T> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(f(item));
  return out;
}

EnsembleDef parse_ensemble(const SExpr& form) {
  if (form.items.size() < 2) fail("missing component name", form.loc);
  EnsembleDef e;
  e.form = to_lower(form.items[0].text);
  e.name = expect_name(form.items[1], "component name");
  e.loc = form.loc;
  for_each_slot(form, 2, [&](const std::string& slot, const SExpr& v) {
    if (slot == ":entry-events") {
      if (v.is_keyword(":auto")) {
        e.entry_auto = true;
      } else {
        e.entry_events = name_list(v, slot);
      }
    } else if (slot == ":exit-events") {
      e.exit_events = name_list(v, slot);
    } else if (slot == ":allowable-events") {
      e.allowable_events = name_list(v, slot);
    } else if (slot == ":inputs") {
      e.inputs = name_list(v, slot);
    } else if (slot == ":outputs") {
      e.outputs = name_list(v, slot);
    } else if (slot == ":behavior-modes") {
      for (auto& m : name_list(v, slot)) e.behavior_modes.push_back(canonical_mode(m));
    } else if (slot == ":components") {
      e.components = parse_each<ComponentRef>(v, slot, parse_component);
    } else if (slot == ":controlflows") {
      e.controlflows = parse_each<ControlFlowDef>(v, slot, parse_controlflow);
    } else if (slot == ":splits") {
      e.splits = parse_each<SplitDef>(v, slot, parse_split);
    } else if (slot == ":joins") {
      e.joins = parse_each<JoinDef>(v, slot, parse_join);
    } else if (slot == ":dataflows") {
      e.dataflows = parse_each<DataFlowDef>(v, slot, parse_dataflow);
    } else if (slot == ":resources") {
      e.resources = parse_each<ResourceDef>(v, slot, parse_resource);
    } else if (slot == ":resource-mapping") {
      e.resource_mapping = expect_list(v, slot).items;
    } else if (slot == ":model-mappings") {
      e.model_mappings = expect_list(v, slot).items;
    } else if (slot == ":vulnerabilities") {
      e.vulnerabilities = name_list(v, slot);
    } else {
      return false;
    }
    return true;
  });
  return e;
}

BehaviorModelDef parse_behavior(const SExpr& form) {
  if (form.items.size() < 2) fail("missing (component mode)", form.loc);
  const SExpr& key = form.items[1];
  if (!key.is_list() || key.items.size() != 2) fail("behavior model must name (component mode)", key.loc);
  BehaviorModelDef b;
  b.loc = form.loc;
  b.component_type = expect_name(key.items[0], "component name");
  b.mode = canonical_mode(expect_name(key.items[1], "behavior mode"));
  for_each_slot(form, 2, [&](const std::string& slot, const SExpr& v) {
    if (slot == ":inputs") {
      b.inputs = name_list(v, slot);
    } else if (slot == ":outputs") {
      b.outputs = name_list(v, slot);
    } else if (slot == ":allowable-events") {
      b.allowable_events = name_list(v, slot);
    } else if (slot == ":prerequisites") {
      b.prerequisites = cond_list(v, slot);
    } else if (slot == ":postconditions" || slot == ":post-conditions") {
      b.postconditions = cond_list(v, slot);
    } else if (slot == ":invariant" || slot == ":invariants") {
      b.invariant = cond_list(v, slot);
    } else {
      return false;
    }
    return true;
  });
  return b;
}

AttackModelDef parse_attack_model(const SExpr& form) {
  if (form.items.size() < 2) fail("missing attack model name", form.loc);
  AttackModelDef m;
  m.loc = form.loc;
  m.name = expect_name(form.items[1], "attack model name");
  for_each_slot(form, 2, [&](const std::string& slot, const SExpr& v) {
    if (slot == ":attack-types") {
      m.attack_types = parse_each<AttackType>(v, slot, [](const SExpr& e) {
        expect_list(e, "attack type");
        if (e.items.size() != 2) fail("attack type must be (name prior)", e.loc);
        return AttackType{expect_name(e.items[0], "attack type"), probability(e.items[1]), e.loc};
      });
    } else if (slot == ":vulnerability-mapping") {
      m.vulnerability_mapping = parse_each<VulnerabilityMapping>(v, slot, [](const SExpr& e) {
        expect_list(e, "vulnerability mapping");
        if (e.items.size() != 3) fail("vulnerability mapping must be (attack-type vulnerability probability)", e.loc);
        return VulnerabilityMapping{expect_name(e.items[0], "attack type"), expect_name(e.items[1], "vulnerability"),
                                    probability(e.items[2]), e.loc};
      });
    } else {
      return false;
    }
    return true;
  });
  return m;
}

AttackConsequence parse_consequence(const SExpr& e) {
  expect_list(e, "rule consequence");
  if (e.items.size() != 2 || !e.items[0].is_atom()) fail("consequence must be (attack T) or (compromised X)", e.loc);
  AttackConsequence c;
  c.loc = e.loc;
  c.target = expect_name(e.items[1], "consequence target");
  if (e.items[0].is_keyword("attack")) {
    c.kind = AttackConsequence::Kind::AttackActive;
  } else if (e.items[0].is_keyword("compromised")) {
    c.kind = AttackConsequence::Kind::Compromised;
  } else {
    fail("unknown consequence '" + e.items[0].text + "'", e.loc);
  }
  return c;
}

AttackRuleDef parse_rule(const SExpr& form) {
  // (defrule name (:forward) if (conds...) then (consequences...))
  const auto& items = form.items;
  if (items.size() != 7) fail("rule must be (defrule name (:forward) if (...) then (...))", form.loc);
  AttackRuleDef r;
  r.loc = form.loc;
  r.name = expect_name(items[1], "rule name");
  const SExpr& dir = items[2];
  const SExpr* dir_atom = dir.is_list() && dir.items.size() == 1 ? &dir.items[0] : &dir;
  if (!dir_atom->is_keyword(":forward")) fail("only :forward rules are supported", dir.loc);
  if (!items[3].is_keyword("if")) fail("expected 'if'", items[3].loc);
  r.conditions = cond_list(items[4], "rule conditions");
  if (!items[5].is_keyword("then")) fail("expected 'then'", items[5].loc);
  r.consequences = parse_each<AttackConsequence>(items[6], "rule consequences", parse_consequence);
  return r;
}

}  // namespace

AppSpec parse_spec_forms(const std::vector<SExpr>& forms) {
  AppSpec spec;
  std::set<std::string> rule_names;
  for (const auto& form : forms) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom()) fail("expected a definition form", form.loc);
    const SExpr& head = form.items[0];
    if (head.is_keyword("define-ensemble") || head.is_keyword("define-component-type")) {
      EnsembleDef e = parse_ensemble(form);
      if (spec.ensembles.contains(e.name)) fail("duplicate definition of component " + e.name, form.loc);
      spec.ensembles.emplace(e.name, std::move(e));
    } else if (head.is_keyword("defbehavior-model")) {
      BehaviorModelDef b = parse_behavior(form);
      BehaviorKey key{b.component_type, b.mode};
      if (spec.behaviors.contains(key)) {
        fail("duplicate behavior model (" + b.component_type + " " + b.mode + ")", form.loc);
      }
      spec.behaviors.emplace(std::move(key), std::move(b));
    } else if (head.is_keyword("define-attack-model")) {
      AttackModelDef m = parse_attack_model(form);
      if (spec.attack_models.contains(m.name)) fail("duplicate attack model " + m.name, form.loc);
      spec.attack_models.emplace(m.name, std::move(m));
    } else if (head.is_keyword("defrule")) {
      AttackRuleDef r = parse_rule(form);
      if (!rule_names.insert(r.name).second) fail("duplicate rule " + r.name, form.loc);
      spec.attack_rules.push_back(std::move(r));
    } else {
      fail("unknown top-level form '" + head.text + "'", form.loc);
    }
  }
  spec.top_component = find_top_component(spec);
  return spec;
}

AppSpec parse_spec(std::string_view text) { return parse_spec_forms(parse_sexprs(text)); }

}  // namespace specmon
