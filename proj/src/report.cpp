#include "specmon/report.hpp"

#include <algorithm>
#include <sstream>

#include "json_value.hpp"

namespace specmon {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string paint(std::string_view text, std::string_view code, bool color) {
  if (!color) return std::string(text);
  return "\x1b[" + std::string(code) + "m" + std::string(text) + "\x1b[0m";
}

std::string inline_bindings(const Bindings& b) {
  std::string out;
  for (const auto& [k, v] : b) {
    if (!out.empty()) out += ", ";
    out += k + "=" + to_string(v);
  }
  return out;
}

void write_tree(std::ostringstream& out, const InstanceSnapshot& s, int depth, bool color) {
  const std::string name = s.path.substr(s.path.rfind('/') == std::string::npos ? 0 : s.path.rfind('/') + 1);
  out << std::string(2 * (depth + 1), ' ') << name << "  " << to_string(s.flag) << "  "
      << (s.mode == Mode::Normal ? std::string("NORMAL") : paint("COMPROMISED", "31", color));
  if (s.activation > 1) out << "  (activation " << s.activation << ")";
  out << '\n';
  for (const auto& c : s.children) write_tree(out, c, depth + 1, color);
}

ordered_json tree_json(const InstanceSnapshot& s) {
  ordered_json j;
  j["path"] = s.path;
  j["type"] = s.type;
  j["flag"] = std::string(to_string(s.flag));
  j["mode"] = std::string(to_string(s.mode));
  j["behavior"] = s.behavior;
  j["activation"] = s.activation;
  j["inputs"] = detail::bindings_to_json(s.inputs);
  j["outputs"] = detail::bindings_to_json(s.outputs);
  auto kids = ordered_json::array();
  for (const auto& c : s.children) kids.push_back(tree_json(c));
  j["children"] = std::move(kids);
  return j;
}

ordered_json attack_json(const MatchedAttack& m) {
  ordered_json j;
  j["attack_type"] = m.attack_type;
  j["model"] = m.model;
  j["prior"] = m.prior;
  auto vulns = ordered_json::array();
  for (const auto& [name, p] : m.vulnerabilities) vulns.push_back({{"vulnerability", name}, {"probability", p}});
  j["vulnerabilities"] = std::move(vulns);
  return j;
}

ordered_json records_json(const std::vector<BehaviorRecord>& rs) {
  auto arr = ordered_json::array();
  for (const auto& r : rs) {
    arr.push_back({{"seq", r.seq},
                   {"inputs", detail::bindings_to_json(r.inputs)},
                   {"outputs", detail::bindings_to_json(r.outputs)}});
  }
  return arr;
}

}  // namespace

std::string format_text_report(const Verdict& v, bool color) {
  std::ostringstream out;
  const std::string_view code = v.kind == VerdictKind::Ok ? "32" : v.kind == VerdictKind::Alarm ? "31" : "33";
  out << "verdict: " << paint(to_string(v.kind), code, color) << '\n';
  out << "events: " << v.events << " (last seq " << v.last_seq << ")\n";
  out << "alarms: " << v.alarms.size() << '\n';

  std::vector<const Alarm*> ordered;
  for (const auto& a : v.alarms) ordered.push_back(&a);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Alarm* a, const Alarm* b) { return a->seq < b->seq; });
  for (const Alarm* a : ordered) {
    out << "  [seq " << a->seq << "] " << a->path << "  " << paint(to_string(a->reason), "31", color);
    if (!a->event.empty()) out << "  event " << a->event;
    out << '\n';
    if (!a->detail.empty()) out << "      " << a->detail << '\n';
    for (const auto& f : a->failed) {
      out << "      failed " << f.condition;
      if (!f.error.empty()) out << "  error: " << f.error;
      if (!f.values.empty()) out << "  with " << inline_bindings(f.values);
      out << '\n';
    }
    if (!a->rule.empty()) out << "      rule " << a->rule << '\n';
    for (const auto& m : a->attacks) {
      out << "      attack " << m.attack_type << " (prior " << format_number(m.prior) << ", model " << m.model << ")\n";
    }
  }
  if (!v.active_attacks.empty()) {
    out << "active attacks:";
    for (const auto& t : v.active_attacks) out << ' ' << t;
    out << '\n';
  }
  out << "component tree:\n";
  write_tree(out, v.tree, 0, color);
  return out.str();
}

std::string format_json_report(const Verdict& v) {
  ordered_json j;
  j["verdict"] = std::string(to_string(v.kind));
  j["events"] = v.events;
  j["last_seq"] = v.last_seq;
  auto alarms = ordered_json::array();
  for (const auto& a : v.alarms) {
    ordered_json aj;
    aj["seq"] = a.seq;
    aj["path"] = a.path;
    aj["reason"] = std::string(to_string(a.reason));
    aj["event"] = a.event;
    auto failed = ordered_json::array();
    for (const auto& f : a.failed) {
      ordered_json fj;
      fj["condition"] = f.condition;
      fj["status"] = f.status == CondStatus::Error ? "error" : "fail";
      fj["error"] = f.error;
      fj["values"] = detail::bindings_to_json(f.values);
      failed.push_back(std::move(fj));
    }
    aj["failed_conditions"] = std::move(failed);
    aj["observed"] = detail::bindings_to_json(a.observed);
    aj["rule"] = a.rule;
    auto attacks = ordered_json::array();
    for (const auto& m : a.attacks) attacks.push_back(attack_json(m));
    aj["attacks"] = std::move(attacks);
    aj["detail"] = a.detail;
    alarms.push_back(std::move(aj));
  }
  j["alarms"] = std::move(alarms);
  j["active_attacks"] = v.active_attacks;
  j["tree"] = tree_json(v.tree);
  auto history = ordered_json::object();
  for (const auto& [path, h] : v.history) {
    history[path] = {{"normal", records_json(h.normal)}, {"compromised", records_json(h.compromised)}};
  }
  j["history"] = std::move(history);
  return j.dump(2) + "\n";
}

}  // namespace specmon
