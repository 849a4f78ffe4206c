#include "oracle/random_spec.hpp"

#include <algorithm>
#include <sstream>

#include "specmon/condition.hpp"
#include "specmon/spec_parser.hpp"

namespace specmon::testing {

namespace {

struct Gen {
  std::mt19937_64& rng;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }
  template <typename T>
  const T& one_of(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(static_cast<int>(v.size())))];
  }

  std::string expr(const std::vector<std::string>& scope, int depth) {
    if (depth == 0 || chance(0.6)) {
      if (!scope.empty() && chance(0.7)) return one_of(scope);
      return std::to_string(pick(4));
    }
    static const std::vector<std::string> ops = {"+", "-", "*"};
    return "(" + one_of(ops) + " " + expr(scope, depth - 1) + " " + expr(scope, depth - 1) + ")";
  }

  std::string cond(const std::vector<std::string>& scope, int depth) {
    const int k = depth == 0 ? pick(4) : pick(7);
    switch (k) {
      case 0: return "(less-than " + expr(scope, 1) + " " + expr(scope, 1) + ")";
      case 1: return "(greater-than " + expr(scope, 1) + " " + expr(scope, 1) + ")";
      case 2: return "(equal " + expr(scope, 1) + " " + expr(scope, 1) + ")";
      case 3:
        if (scope.empty()) return "(equal 1 1)";
        return "(data-type-of " + one_of(scope) + " number)";
      case 4: return "(not " + cond(scope, depth - 1) + ")";
      case 5: return "(and " + cond(scope, depth - 1) + " " + cond(scope, depth - 1) + ")";
      default: return "(or " + cond(scope, depth - 1) + " " + cond(scope, depth - 1) + ")";
    }
  }

  // Mostly conditions that hold under `env`, so specs stay satisfiable.
  std::string cond_for(const std::vector<std::string>& scope, const Bindings& env) {
    std::string c = cond(scope, 1);
    if (chance(0.05)) return c;
    for (int attempt = 0; attempt < 20; ++attempt) {
      const CondExpr e = cond_from_sexpr(parse_sexprs(c).front());
      if (check_conditions(std::span(&e, 1), env).passed) break;
      c = cond(scope, 1);
    }
    return c;
  }

  std::string conds(const std::vector<std::string>& scope, const Bindings& env, int max) {
    std::string out = "(";
    const int n = pick(max + 1);
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + cond_for(scope, env);
    return out + ")";
  }
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
  return out;
}

std::vector<std::string> names(const char* prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string model(Gen& g, const std::string& type, const std::vector<std::string>& in,
                  const std::vector<std::string>& out, bool allowable, const Bindings& env) {
  std::ostringstream s;
  s << "(defbehavior-model (" << type << " normal)\n :inputs (" << join(in) << ")\n :outputs (" << join(out) << ")\n";
  if (allowable) s << " :allowable-events (note)\n";
  s << " :prerequisites " << g.conds(in, env, 3) << "\n";
  s << " :postconditions " << g.conds(concat(in, out), env, 3) << "\n";
  // invariants mostly over inputs so they are checked at entry too
  s << " :invariant " << g.conds(g.chance(0.7) ? in : concat(in, out), env, 2) << ")\n";
  return s.str();
}

}  // namespace

RandomSpec random_spec(std::mt19937_64& rng) {
  Gen g{rng};
  const auto root_in = names("x", 1 + g.pick(2));
  const auto root_out = names("y", 1 + g.pick(2));
  const int n_children = 1 + g.pick(3);

  struct Child {
    std::string inst, type;
    std::vector<std::string> in, out;
  };
  std::vector<Child> children;
  std::vector<std::string> flows;
  std::vector<std::pair<std::string, std::string>> sources;  // (port, instance) producing a value
  Bindings witness;
  auto key = [](const std::string& inst, const std::string& port) { return inst + ":" + port; };
  for (const auto& x : root_in) {
    sources.emplace_back(x, "top");
    witness[key("top", x)] = static_cast<double>(g.pick(4));
  }

  for (int k = 1; k <= n_children; ++k) {
    Child c{"c" + std::to_string(k), "t" + std::to_string(k), names("i", g.pick(3)), names("o", 1 + g.pick(2))};
    for (const auto& port : c.in) {
      const auto& [sp, si] = g.one_of(sources);
      flows.push_back("(" + sp + " " + si + " " + port + " " + c.inst + ")");
      witness[key(c.inst, port)] = witness.at(key(si, sp));
    }
    for (const auto& o : c.out) {
      sources.emplace_back(o, c.inst);
      witness[key(c.inst, o)] = static_cast<double>(g.pick(4));
    }
    children.push_back(std::move(c));
  }
  for (const auto& y : root_out) {
    if (g.chance(0.1)) continue;
    std::pair<std::string, std::string> src = g.one_of(sources);
    if (src.second == "top" && !g.chance(0.2)) src = sources.back();
    flows.push_back("(" + src.first + " " + src.second + " " + y + " top)");
    witness[key("top", y)] = witness.at(key(src.second, src.first));
  }

  std::ostringstream s;
  s << "(define-ensemble top\n :entry-events (top)\n :exit-events (top)\n :allowable-events (tick)\n";
  s << " :inputs (" << join(root_in) << ")\n :outputs (" << join(root_out) << ")\n :components (";
  for (const auto& c : children) s << "(" << c.inst << " :type " << c.type << " :models (normal)) ";
  s << ")\n :dataflows (" << join(flows) << "))\n";
  auto env_of = [&](const std::string& inst) {
    Bindings env;
    const std::string prefix = inst + ":";
    for (const auto& [k, v] : witness) {
      if (k.starts_with(prefix)) env[k.substr(prefix.size())] = v;
    }
    return env;
  };
  if (g.chance(0.6)) s << model(g, "top", root_in, root_out, false, env_of("top"));
  for (const auto& c : children) {
    s << "(define-component-type " << c.type << "\n :entry-events (run-" << c.type << ")\n :exit-events (run-"
      << c.type << ")\n :inputs (" << join(c.in) << ")\n :outputs (" << join(c.out) << ")\n :behavior-modes (normal))\n";
    s << model(g, c.type, c.in, c.out, g.chance(0.4), env_of(c.inst));
  }
  RandomSpec r;
  r.text = s.str();
  r.spec = parse_spec(r.text);
  r.witness = std::move(witness);
  return r;
}

namespace {

Value random_value(Gen& g) {
  if (g.chance(0.04)) return Value::text("zz");
  return static_cast<double>(g.pick(4));
}

bool contains_name(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

RuntimeEvent make(EventKind kind, std::string name, std::string path, Bindings values = {}) {
  RuntimeEvent e;
  e.kind = kind;
  e.name = std::move(name);
  e.path = std::move(path);
  e.values = std::move(values);
  return e;
}

bool holds(const BehaviorModelDef* m, const Bindings& in, const Bindings& all) {
  if (!m) return true;
  return check_conditions(m->prerequisites, in).passed && check_conditions(m->postconditions, all).passed &&
         check_conditions(m->invariant, all).passed;
}

// One activation of top. With `clean` set nothing is perturbed; the result
// reports whether every model check would pass.
std::vector<RuntimeEvent> activation(const AppSpec& spec, Gen& g, bool clean, const Bindings* witness,
                                     bool& consistent) {
  const EnsembleDef& top = *spec.find_ensemble("top");
  std::vector<RuntimeEvent> out;
  consistent = true;
  std::map<std::pair<std::string, std::string>, Value> produced;  // (instance, port) -> value
  Bindings root_in;
  for (const auto& x : top.inputs) {
    if (!clean && g.chance(0.06)) continue;
    if (witness) {
      root_in[x] = witness->at("top:" + x);
    } else {
      root_in[x] = clean ? Value(static_cast<double>(g.pick(4))) : random_value(g);
    }
    produced[{"top", x}] = root_in[x];
  }
  out.push_back(make(EventKind::Call, "top", "top", root_in));
  if (g.chance(0.2)) out.push_back(make(EventKind::Emit, "tick", "top"));

  std::vector<const ComponentRef*> order;
  for (const auto& c : top.components) order.push_back(&c);
  if (!clean && order.size() > 1 && g.chance(0.1)) std::swap(order[0], order[1]);

  for (const ComponentRef* ref : order) {
    const EnsembleDef& t = *spec.find_ensemble(ref->type);
    const BehaviorModelDef* m = spec.find_behavior(ref->type, "normal");
    const std::string path = "top/" + ref->instance;
    const std::string ev = "run-" + ref->type;

    Bindings in;
    for (const auto& df : top.dataflows) {
      if (df.dst_instance != ref->instance) continue;
      if (auto it = produced.find({df.src_instance, df.src_port}); it != produced.end()) in[df.dst_port] = it->second;
    }
    Bindings call_payload;
    if (!t.inputs.empty() && g.chance(0.15)) {
      const std::string& port = g.one_of(t.inputs);
      if (clean && in.contains(port)) {
        call_payload[port] = in[port];
      } else if (!clean) {
        call_payload[port] = in.contains(port) && g.chance(0.5) ? in[port] : random_value(g);
      }
    }
    out.push_back(make(EventKind::Call, ev, path, call_payload));
    if (m && contains_name(m->allowable_events, "note") && g.chance(0.15)) {
      out.push_back(make(EventKind::Emit, "note", path));
    } else if (!clean && g.chance(0.15)) {
      out.push_back(make(EventKind::Emit, g.chance(0.7) ? "note" : "stray", path));
    }

    // Look for outputs satisfying the postconditions most of the time.
    Bindings result;
    const bool aim = clean || g.chance(0.8);
    bool ok = false;
    for (int attempt = 0; attempt < 30 && !ok; ++attempt) {
      result.clear();
      for (const auto& o : t.outputs) {
        result[o] = witness && attempt == 0 ? witness->at(ref->instance + ":" + o) : Value(static_cast<double>(g.pick(4)));
      }
      if (!aim) break;
      Bindings env = in;
      for (const auto& [k, v] : result) env[k] = v;
      ok = holds(m, in, env);
    }
    consistent = consistent && ok && in.size() == t.inputs.size();
    if (!clean && !t.outputs.empty() && g.chance(0.05)) result.erase(g.one_of(t.outputs));
    for (const auto& [k, v] : result) produced[{ref->instance, k}] = v;
    out.push_back(make(EventKind::Return, ev, path, result));
  }

  Bindings root_out;
  for (const auto& df : top.dataflows) {
    if (df.dst_instance != "top") continue;
    auto it = produced.find({df.src_instance, df.src_port});
    if (clean) {
      if (it != produced.end()) root_out[df.dst_port] = it->second;
      continue;
    }
    if (g.chance(0.1)) continue;
    root_out[df.dst_port] = it != produced.end() && g.chance(0.85) ? it->second : random_value(g);
  }
  Bindings all = root_in;
  for (const auto& [k, v] : root_out) all[k] = v;
  consistent = consistent && root_out.size() == top.outputs.size() &&
               holds(spec.find_behavior("top", "normal"), root_in, all);
  if (g.chance(0.1)) out.push_back(make(EventKind::Emit, "tick", "top"));
  out.push_back(make(EventKind::Return, "top", "top", root_out));
  return out;
}

}  // namespace

std::vector<RuntimeEvent> random_trace(const AppSpec& spec, std::mt19937_64& rng, std::size_t max_events) {
  return random_trace(spec, {}, rng, max_events);
}

std::vector<RuntimeEvent> random_trace(const RandomSpec& spec, std::mt19937_64& rng, std::size_t max_events) {
  return random_trace(spec.spec, spec.witness, rng, max_events);
}

std::vector<RuntimeEvent> random_trace(const AppSpec& spec, const Bindings& witness, std::mt19937_64& rng,
                                       std::size_t max_events) {
  Gen g{rng};
  std::vector<RuntimeEvent> out;
  // Roughly a third of the traces are built to pass every check.
  const bool clean = g.chance(0.35);

  const int activations = 1 + g.pick(3);
  for (int a = 0; a < activations; ++a) {
    bool consistent = false;
    std::vector<RuntimeEvent> act;
    for (int attempt = 0; attempt < (clean ? 40 : 1) && !consistent; ++attempt) {
      const bool replay = clean && attempt == 0 && !witness.empty();
      act = activation(spec, g, clean, replay ? &witness : nullptr, consistent);
    }
    out.insert(out.end(), act.begin(), act.end());
  }

  if (clean) {
    if (out.size() > max_events) out.resize(max_events);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].seq = i + 1;
    return out;
  }
  if (g.chance(0.5)) {
    const int damage = 1 + g.pick(3);
    for (int d = 0; d < damage && !out.empty(); ++d) {
      const std::size_t i = static_cast<std::size_t>(g.pick(static_cast<int>(out.size())));
      switch (g.pick(6)) {
        case 0: out.erase(out.begin() + static_cast<std::ptrdiff_t>(i)); break;
        case 1:
          if (i + 1 < out.size()) std::swap(out[i], out[i + 1]);
          break;
        case 2: {
          static const std::vector<std::string> paths = {"top", "top/c1", "top/c2", "top/nowhere", "elsewhere",
                                                         "top/c1/deep"};
          out.insert(out.begin() + static_cast<std::ptrdiff_t>(i), make(EventKind::Emit, "bogus", g.one_of(paths)));
          break;
        }
        case 3: out[i].path = g.chance(0.5) ? "top/nowhere" : "top/c1/x"; break;
        case 4:
          out[i].kind = out[i].kind == EventKind::Call ? EventKind::Return : EventKind::Call;
          out[i].values.clear();
          break;
        default: out.insert(out.begin() + static_cast<std::ptrdiff_t>(i), out[i]); break;
      }
    }
  }
  if (out.size() > max_events) out.resize(max_events);
  if (out.size() > 2 && g.chance(0.1)) out.resize(static_cast<std::size_t>(1 + g.pick(static_cast<int>(out.size()) - 1)));

  std::uint64_t seq = 0;
  for (auto& e : out) {
    seq += g.chance(0.1) ? 2 : 1;
    e.seq = seq;
  }
  return out;
}

}  // namespace specmon::testing
