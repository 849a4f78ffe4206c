#include "specmon/spec_printer.hpp"

namespace specmon {
namespace {

std::string names(const std::vector<std::string>& xs) {
  std::string out = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out.push_back(' ');
    out += xs[i];
  }
  return out + ")";
}

class Printer {
 public:
  void open(const std::string& head) { out_ += "(" + head; }
  void close() { out_ += ")\n\n"; }

  void slot(const char* key, const std::string& value) {
    out_ += "\n  ";
    out_ += key;
    out_ += " ";
    out_ += value;
  }

  void names_slot(const char* key, const std::vector<std::string>& xs) {
    if (!xs.empty()) slot(key, names(xs));
  }

  // One entry per line.
  void block(const char* key, const std::vector<std::string>& entries) {
    if (entries.empty()) return;
    out_ += "\n  ";
    out_ += key;
    out_ += " (";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) out_ += "\n    ";
      out_ += entries[i];
    }
    out_ += ")";
  }

  void conds(const char* key, const std::vector<CondExpr>& cs) {
    if (cs.empty()) return;
    std::vector<std::string> entries;
    for (const auto& c : cs) entries.push_back(print_cond(c));
    block(key, entries);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

void print_ensemble(Printer& p, const EnsembleDef& e) {
  p.open(e.form + " " + e.name);
  if (e.entry_auto) {
    p.slot(":entry-events", ":auto");
  } else {
    p.names_slot(":entry-events", e.entry_events);
  }
  p.names_slot(":exit-events", e.exit_events);
  p.names_slot(":allowable-events", e.allowable_events);
  p.names_slot(":inputs", e.inputs);
  p.names_slot(":outputs", e.outputs);
  p.names_slot(":behavior-modes", e.behavior_modes);

  std::vector<std::string> entries;
  for (const auto& c : e.components) {
    std::string s = "(" + c.instance + " :type " + c.type;
    if (!c.models.empty()) s += " :models " + names(c.models);
    entries.push_back(s + ")");
  }
  p.block(":components", entries);

  entries.clear();
  for (const auto& c : e.controlflows) entries.push_back("(" + c.branch + " " + print_cond(c.guard) + " " + c.target + ")");
  p.block(":controlflows", entries);

  entries.clear();
  for (const auto& s : e.splits) {
    std::string line = "(" + s.source;
    for (const auto& b : s.branches) line += " (" + b.target + " " + print_cond(b.guard) + ")";
    entries.push_back(line + ")");
  }
  p.block(":splits", entries);

  entries.clear();
  for (const auto& j : e.joins) entries.push_back("(" + j.target + " " + names(j.required) + ")");
  p.block(":joins", entries);

  entries.clear();
  for (const auto& d : e.dataflows) {
    entries.push_back("(" + d.src_port + " " + d.src_instance + " " + d.dst_port + " " + d.dst_instance + ")");
  }
  p.block(":dataflows", entries);

  entries.clear();
  for (const auto& r : e.resources) entries.push_back(r.kind.empty() ? r.name : "(" + r.name + " " + r.kind + ")");
  if (!entries.empty()) p.slot(":resources", names(entries));

  entries.clear();
  for (const auto& x : e.resource_mapping) entries.push_back(print_sexpr(x));
  p.block(":resource-mapping", entries);
  entries.clear();
  for (const auto& x : e.model_mappings) entries.push_back(print_sexpr(x));
  p.block(":model-mappings", entries);

  p.names_slot(":vulnerabilities", e.vulnerabilities);
  p.close();
}

void print_behavior(Printer& p, const BehaviorModelDef& b) {
  p.open("defbehavior-model (" + b.component_type + " " + b.mode + ")");
  p.names_slot(":inputs", b.inputs);
  p.names_slot(":outputs", b.outputs);
  p.names_slot(":allowable-events", b.allowable_events);
  p.conds(":prerequisites", b.prerequisites);
  p.conds(":postconditions", b.postconditions);
  p.conds(":invariant", b.invariant);
  p.close();
}

void print_attack_model(Printer& p, const AttackModelDef& m) {
  p.open("define-attack-model " + m.name);
  std::vector<std::string> entries;
  for (const auto& t : m.attack_types) entries.push_back("(" + t.name + " " + format_number(t.prior) + ")");
  p.block(":attack-types", entries);
  entries.clear();
  for (const auto& v : m.vulnerability_mapping) {
    entries.push_back("(" + v.attack_type + " " + v.vulnerability + " " + format_number(v.probability) + ")");
  }
  p.block(":vulnerability-mapping", entries);
  p.close();
}

void print_rule(std::string& out, const AttackRuleDef& r) {
  out += "(defrule " + r.name + " (:forward)\n  if (";
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (i) out += "\n      ";
    out += print_cond(r.conditions[i]);
  }
  out += ")\n  then (";
  for (std::size_t i = 0; i < r.consequences.size(); ++i) {
    if (i) out += "\n        ";
    const auto& c = r.consequences[i];
    out += c.kind == AttackConsequence::Kind::AttackActive ? "(attack " : "(compromised ";
    out += c.target + ")";
  }
  out += "))\n\n";
}

}  // namespace

std::string print_spec(const AppSpec& spec) {
  Printer p;
  for (const auto& [_, e] : spec.ensembles) print_ensemble(p, e);
  for (const auto& [_, b] : spec.behaviors) print_behavior(p, b);
  for (const auto& [_, m] : spec.attack_models) print_attack_model(p, m);
  std::string out = p.take();
  for (const auto& r : spec.attack_rules) print_rule(out, r);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace specmon
