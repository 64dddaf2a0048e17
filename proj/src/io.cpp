#include "onelife/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace onelife {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

// Label list sorted by name, for canonical set printing.
std::vector<std::string> sorted_names(std::span<const ActionId> ids,
                                      const std::vector<std::string>& names) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (ActionId a : ids) out.push_back(names.at(static_cast<std::size_t>(a)));
  std::sort(out.begin(), out.end());
  return out;
}

std::string print_bad_set(std::span<const ActionId> bad, const WorldLabels& labels) {
  std::string out = "{";
  const auto names = sorted_names(bad, labels.actions);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out + "}";
}

std::vector<ActionId> parse_bad_set(const std::string& s, const WorldLabels& labels) {
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
    throw InputError("bad set must be brace-delimited: '" + s + "'");
  }
  std::vector<ActionId> out;
  const std::string body = s.substr(1, s.size() - 2);
  if (!body.empty()) {
    for (const auto& name : split_on(body, ',')) out.push_back(labels.action_id(name));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string expect_prefix(const std::string& token, const std::string& prefix, const char* what) {
  if (token.rfind(prefix, 0) != 0) {
    throw InputError(std::string("expected ") + what + ", got '" + token + "'");
  }
  return token.substr(prefix.size());
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw InputError("cannot format a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const WorldLabels& labels_of(const AnyWorld& w) {
  return std::visit([](const auto& x) -> const WorldLabels& { return x.labels(); }, w);
}

// ---------------------------------------------------------------------------
// world files

AnyWorld parse_world(std::istream& in) {
  std::string line;
  std::string kind;
  WorldLabels labels;
  std::map<std::pair<StateId, ActionId>, std::vector<StateId>> transitions;
  std::map<StateId, ObsId> view;
  std::map<StateId, std::vector<ActionId>> incorrect;
  StateId current = -1;
  std::uint64_t oracle_seed = 0;
  bool saw_header = false, saw_states = false;

  auto need_alphabets = [&]() {
    if (!saw_states) throw InputError("world file: alphabets must precede tables");
  };

  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (!saw_header) {
      if (tok.size() != 3 || tok[0] != "world" || tok[1] != "v1") {
        throw InputError("world file must start with 'world v1 kind=...'");
      }
      kind = expect_prefix(tok[2], "kind=", "kind=...");
      if (kind != "perfect" && kind != "random") throw InputError("world kind must be perfect|random");
      saw_header = true;
      continue;
    }
    if (tok[0] == "actions") {
      labels.actions.assign(tok.begin() + 1, tok.end());
    } else if (tok[0] == "observations") {
      labels.observations.assign(tok.begin() + 1, tok.end());
    } else if (tok[0] == "states") {
      labels.states.assign(tok.begin() + 1, tok.end());
      labels.validate();
      labels.build_index();
      saw_states = true;
    } else if (tok[0] == "transition") {
      need_alphabets();
      if (tok.size() != 4) throw InputError("transition line needs: state action state");
      transitions[{labels.state_id(tok[1]), labels.action_id(tok[2])}].push_back(
          labels.state_id(tok[3]));
    } else if (tok[0] == "view") {
      need_alphabets();
      if (tok.size() != 3) throw InputError("view line needs: state observation");
      view[labels.state_id(tok[1])] = labels.obs_id(tok[2]);
    } else if (tok[0] == "incorrect") {
      need_alphabets();
      if (tok.size() < 2) throw InputError("incorrect line needs: state [actions...]");
      auto& list = incorrect[labels.state_id(tok[1])];
      for (std::size_t i = 2; i < tok.size(); ++i) list.push_back(labels.action_id(tok[i]));
    } else if (tok[0] == "current") {
      need_alphabets();
      if (tok.size() != 2) throw InputError("current line needs: state");
      current = labels.state_id(tok[1]);
    } else if (tok[0] == "oracle-seed") {
      oracle_seed = static_cast<std::uint64_t>(parse_int(tok.at(1), "oracle seed"));
    } else {
      throw InputError("unknown world file line '" + tok[0] + "'");
    }
  }
  if (!saw_header) throw InputError("empty world file");
  if (current < 0) throw InputError("world file is missing the current state");

  const int S = static_cast<int>(labels.states.size());
  const int A = static_cast<int>(labels.actions.size());
  std::vector<ObsId> view_table(static_cast<std::size_t>(S), -1);
  for (const auto& [s, o] : view) view_table[static_cast<std::size_t>(s)] = o;
  for (int s = 0; s < S; ++s) {
    if (view_table[static_cast<std::size_t>(s)] < 0) {
      throw InputError("world file: no view for state " + labels.states[static_cast<std::size_t>(s)]);
    }
  }
  std::vector<std::uint8_t> incorrect_table(static_cast<std::size_t>(S) * A, 0);
  for (const auto& [s, list] : incorrect) {
    for (ActionId a : list) {
      incorrect_table[static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)] = 1;
    }
  }

  if (kind == "perfect") {
    std::vector<StateId> table(static_cast<std::size_t>(S) * A, -1);
    for (const auto& [key, targets] : transitions) {
      if (targets.size() != 1) {
        throw InputError("perfect world has multiple arrows for one (state, action)");
      }
      table[static_cast<std::size_t>(key.first) * A + static_cast<std::size_t>(key.second)] =
          targets[0];
    }
    for (StateId t : table) {
      if (t < 0) throw InputError("perfect world transition table is not total");
    }
    return PerfectWorld(std::move(labels), std::move(table), std::move(view_table),
                        std::move(incorrect_table), current);
  }

  std::vector<std::vector<StateId>> successors(static_cast<std::size_t>(S) * A);
  for (auto& [key, targets] : transitions) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    successors[static_cast<std::size_t>(key.first) * A + static_cast<std::size_t>(key.second)] =
        std::move(targets);
  }
  OracleBundle bundle;
  bundle.seed = oracle_seed;
  return RandomWorld(std::move(labels), std::move(successors), std::move(view_table),
                     std::move(incorrect_table), current, std::move(bundle));
}

namespace {

template <class W>
std::string print_world_common(const W& w, const char* kind,
                               const std::function<std::vector<StateId>(StateId, ActionId)>& succ,
                               std::uint64_t oracle_seed, bool emit_seed) {
  const WorldLabels& L = w.labels();
  std::string out = "world v1 kind=" + std::string(kind) + "\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
      s += ' ';
      s += x;
    }
    return s;
  };
  out += "actions" + join(L.actions) + "\n";
  out += "observations" + join(L.observations) + "\n";
  out += "states" + join(L.states) + "\n";
  for (StateId s = 0; s < w.num_states(); ++s) {
    for (ActionId a = 0; a < w.num_actions(); ++a) {
      for (StateId t : succ(s, a)) {
        out += "transition " + L.states[static_cast<std::size_t>(s)] + " " +
               L.actions[static_cast<std::size_t>(a)] + " " +
               L.states[static_cast<std::size_t>(t)] + "\n";
      }
    }
  }
  for (StateId s = 0; s < w.num_states(); ++s) {
    ObsId o;
    if constexpr (std::is_same_v<W, PerfectWorld>) {
      o = w.observation(s);
    } else {
      o = w.default_observation(s);
    }
    out += "view " + L.states[static_cast<std::size_t>(s)] + " " +
           L.observations[static_cast<std::size_t>(o)] + "\n";
  }
  for (StateId s = 0; s < w.num_states(); ++s) {
    out += "incorrect " + L.states[static_cast<std::size_t>(s)];
    for (ActionId a : w.incorrect_set(s)) {
      out += " " + L.actions[static_cast<std::size_t>(a)];
    }
    out += "\n";
  }
  out += "current " + L.states[static_cast<std::size_t>(w.current())] + "\n";
  if (emit_seed) out += "oracle-seed " + std::to_string(oracle_seed) + "\n";
  return out;
}

}  // namespace

std::string print_world(const AnyWorld& w) {
  if (std::holds_alternative<PerfectWorld>(w)) {
    const auto& pw = std::get<PerfectWorld>(w);
    return print_world_common(
        pw, "perfect", [&](StateId s, ActionId a) { return pw.successors(s, a); }, 0, false);
  }
  const auto& rw = std::get<RandomWorld>(w);
  return print_world_common(
      rw, "random", [&](StateId s, ActionId a) { return rw.successors(s, a); },
      rw.oracles().seed, true);
}

AnyWorld load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open world file '" + path + "'");
  return parse_world(in);
}

// ---------------------------------------------------------------------------
// model files

ModelFile parse_model(std::istream& in) {
  std::string line;
  bool saw_header = false;
  EventDrivenModel edm;
  std::vector<VariableDecl> vars;
  std::vector<std::tuple<std::string, std::string, std::string>> arrow_lines;
  std::vector<std::vector<std::string>> update_lines;
  std::string outside_name = "none";
  std::string start_name;
  std::string start_eval_spec;
  std::map<std::string, std::string> obs_tags;

  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != "model" || tok[1] != "v1") {
        throw InputError("model file must start with 'model v1'");
      }
      saw_header = true;
      continue;
    }
    if (tok[0] == "states") {
      edm.state_names.assign(tok.begin() + 1, tok.end());
    } else if (tok[0] == "outside") {
      if (tok.size() != 2) throw InputError("outside line needs: none|state");
      outside_name = tok[1];
    } else if (tok[0] == "start") {
      if (tok.size() != 2) throw InputError("start line needs: state");
      start_name = tok[1];
    } else if (tok[0] == "event") {
      if (tok.size() != 3) throw InputError("event line needs: name kind");
      edm.events.push_back({tok[1], event_kind_from_string(tok[2])});
    } else if (tok[0] == "arrow") {
      if (tok.size() != 4) throw InputError("arrow line needs: state event state");
      arrow_lines.emplace_back(tok[1], tok[2], tok[3]);
    } else if (tok[0] == "obs-tag") {
      if (tok.size() != 3) throw InputError("obs-tag line needs: state tag");
      obs_tags[tok[1]] = tok[2];
    } else if (tok[0] == "var") {
      if (tok.size() < 3) throw InputError("var line needs: name value value...");
      VariableDecl v;
      v.name = tok[1];
      v.domain.assign(tok.begin() + 2, tok.end());
      vars.push_back(std::move(v));
    } else if (tok[0] == "start-eval") {
      if (tok.size() != 2) throw InputError("start-eval line needs: name=value,...");
      start_eval_spec = tok[1];
    } else if (tok[0] == "update") {
      // update <state> <eval> <event> -> <state> <eval>
      if (tok.size() != 7 || tok[4] != "->") {
        throw InputError("update line needs: state eval event -> state eval");
      }
      update_lines.push_back(tok);
    } else {
      throw InputError("unknown model file line '" + tok[0] + "'");
    }
  }
  if (!saw_header) throw InputError("empty model file");
  if (edm.state_names.empty()) throw InputError("model file declares no states");

  edm.arrows.assign(edm.state_names.size(),
                    std::vector<std::vector<StateId>>(edm.events.size()));
  for (const auto& [s, e, t] : arrow_lines) {
    edm.add_arrow(edm.state_id(s), edm.event_id(e), edm.state_id(t));
  }
  if (outside_name != "none") edm.outside = edm.state_id(outside_name);
  if (!start_name.empty()) edm.start = edm.state_id(start_name);
  if (!obs_tags.empty()) {
    std::vector<std::string> tags(edm.state_names.size());
    for (const auto& [s, tag] : obs_tags) tags[static_cast<std::size_t>(edm.state_id(s))] = tag;
    edm.expected_obs = std::move(tags);
  }

  ModelFile out;
  out.model.base = std::move(edm);
  out.model.variables = std::move(vars);

  auto parse_eval = [&](const std::string& spec) -> EvalIndex {
    Evaluation e;
    e.values.assign(out.model.variables.size(), 0);
    if (!spec.empty() && spec != "-") {
      for (const auto& part : split_on(spec, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw InputError("bad evaluation token '" + part + "'");
        const std::string name = part.substr(0, eq);
        const std::string value = part.substr(eq + 1);
        bool found = false;
        for (std::size_t i = 0; i < out.model.variables.size(); ++i) {
          if (out.model.variables[i].name != name) continue;
          const auto& dom = out.model.variables[i].domain;
          const auto it = std::find(dom.begin(), dom.end(), value);
          if (it == dom.end()) {
            throw InputError("value '" + value + "' not in domain of variable '" + name + "'");
          }
          e.values[i] = static_cast<int>(it - dom.begin());
          found = true;
          break;
        }
        if (!found) throw InputError("unknown variable '" + name + "'");
      }
    }
    return out.model.pack(e);
  };

  if (!start_eval_spec.empty()) out.model.start_eval = parse_eval(start_eval_spec);
  for (const auto& tok : update_lines) {
    const StateId s = out.model.base.state_id(tok[1]);
    const EvalIndex ev = parse_eval(tok[2]);
    const EventId e = out.model.base.event_id(tok[3]);
    const StateId ts = out.model.base.state_id(tok[5]);
    const EvalIndex tev = parse_eval(tok[6]);
    out.model.update[{s, ev, e}].emplace_back(ts, tev);
  }
  out.model.validate();
  return out;
}

std::string print_model(const ModelFile& m) {
  const EventDrivenModel& edm = m.base();
  std::string out = "model v1\n";
  out += "states";
  for (const auto& s : edm.state_names) out += " " + s;
  out += "\n";
  out += "outside " +
         (edm.outside ? edm.state_names[static_cast<std::size_t>(*edm.outside)] : "none") + "\n";
  out += "start " + edm.state_names[static_cast<std::size_t>(edm.start)] + "\n";
  for (const auto& e : edm.events) {
    out += "event " + e.name + " " + to_string(e.kind) + "\n";
  }
  for (StateId s = 0; s < edm.num_states(); ++s) {
    for (EventId e = 0; e < edm.num_events(); ++e) {
      for (StateId t : edm.targets(s, e)) {
        out += "arrow " + edm.state_names[static_cast<std::size_t>(s)] + " " +
               edm.events[static_cast<std::size_t>(e)].name + " " +
               edm.state_names[static_cast<std::size_t>(t)] + "\n";
      }
    }
  }
  if (edm.expected_obs) {
    for (StateId s = 0; s < edm.num_states(); ++s) {
      const std::string& tag = (*edm.expected_obs)[static_cast<std::size_t>(s)];
      if (!tag.empty()) {
        out += "obs-tag " + edm.state_names[static_cast<std::size_t>(s)] + " " + tag + "\n";
      }
    }
  }
  for (const auto& v : m.model.variables) {
    out += "var " + v.name;
    for (const auto& d : v.domain) out += " " + d;
    out += "\n";
  }
  if (m.has_variables()) {
    out += "start-eval " + m.model.eval_name(m.model.start_eval) + "\n";
    for (const auto& [key, targets] : m.model.update) {
      const auto& [s, ev, e] = key;
      for (const auto& [ts, tev] : targets) {
        out += "update " + edm.state_names[static_cast<std::size_t>(s)] + " " +
               m.model.eval_name(ev) + " " + edm.events[static_cast<std::size_t>(e)].name +
               " -> " + edm.state_names[static_cast<std::size_t>(ts)] + " " +
               m.model.eval_name(tev) + "\n";
      }
    }
  }
  return out;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  return parse_model(in);
}

// ---------------------------------------------------------------------------
// event definitions

namespace {

BadPattern parse_bad_pattern(const std::string& s, const WorldLabels& labels) {
  if (s == "*") return BadPattern::any();
  if (s.size() >= 2 && s.front() == '+') {
    return BadPattern::containing(labels.action_id(s.substr(1)));
  }
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
    std::vector<ActionId> set;
    const std::string body = s.substr(1, s.size() - 2);
    if (!body.empty()) {
      for (const auto& name : split_on(body, ',')) set.push_back(labels.action_id(name));
    }
    return BadPattern::exactly(std::move(set));
  }
  throw InputError("bad-set pattern must be *, +action, or {a,b}: '" + s + "'");
}

SuffixPattern parse_suffix_pattern(const std::string& s, const WorldLabels& labels) {
  SuffixPattern out;
  for (const auto& element : split_on(s, ';')) {
    const auto slots = split_on(element, '/');
    if (slots.size() != 3) {
      throw InputError("pattern element needs bad/action/obs slots: '" + element + "'");
    }
    StepPattern p;
    p.bad = parse_bad_pattern(slots[0], labels);
    if (slots[1] != "*") p.action = labels.action_id(slots[1]);
    if (slots[2] != "*") p.observation = labels.obs_id(slots[2]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<EventDef> parse_event_defs(std::istream& in, const WorldLabels& labels) {
  std::vector<EventDef> out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != "events" || tok[1] != "v1") {
        throw InputError("events file must start with 'events v1'");
      }
      saw_header = true;
      continue;
    }
    if (tok[0] != "event" || tok.size() < 3) {
      throw InputError("events file lines are: event <name> <kind> [patterns]");
    }
    EventDef def;
    def.name = tok[1];
    def.kind = event_kind_from_string(tok[2]);
    if (def.kind == EventKind::Invisible) {
      if (tok.size() != 3) throw InputError("invisible event '" + def.name + "' takes no patterns");
    } else {
      if (tok.size() != 4) throw InputError("event '" + def.name + "' needs exactly one pattern token");
      for (const auto& member : split_on(tok[3], '|')) {
        def.members.push_back(parse_suffix_pattern(member, labels));
      }
    }
    out.push_back(std::move(def));
  }
  if (!saw_header) throw InputError("empty events file");
  return out;
}

std::vector<EventDef> load_event_defs(const std::string& path, const WorldLabels& labels) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open events file '" + path + "'");
  return parse_event_defs(in, labels);
}

ChiTranscript parse_chi(std::istream& in) {
  ChiTranscript out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != "chi" || tok[1] != "v1") {
        throw InputError("transcript file must start with 'chi v1'");
      }
      saw_header = true;
      continue;
    }
    auto& marks = out.marks[tok[0]];
    for (std::size_t i = 1; i < tok.size(); ++i) {
      if (tok[i] == "-") continue;  // declared, no occurrences
      marks.insert(static_cast<int>(parse_int(tok[i], "transcript moment")));
    }
  }
  if (!saw_header) throw InputError("empty transcript file");
  return out;
}

ChiTranscript load_chi(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript file '" + path + "'");
  return parse_chi(in);
}

// ---------------------------------------------------------------------------
// life logs and paths

std::string print_life_log(const History& h, const WorldLabels& labels) {
  std::string out = "# life v1 steps=" + std::to_string(h.step_count()) +
                    " pending=" + (h.pending ? "1" : "0") + "\n";
  for (const auto& s : h.steps) {
    out += "bad=" + print_bad_set(s.bad_before, labels) + " action=" +
           labels.actions[static_cast<std::size_t>(s.action)] + " obs=" +
           labels.observations[static_cast<std::size_t>(s.observation)] + "\n";
  }
  if (h.pending) {
    out += "pending bad=" + print_bad_set(h.pending->bad, labels) + " action=" +
           labels.actions[static_cast<std::size_t>(h.pending->action)] + "\n";
  }
  return out;
}

History parse_life_log(std::istream& in, const WorldLabels& labels) {
  History h;
  std::string line;
  bool saw_header = false;
  std::int64_t declared_steps = -1;
  int declared_pending = -1;
  while (std::getline(in, line)) {
    if (!saw_header) {
      const auto tok = split_ws(line);
      if (tok.size() != 5 || tok[0] != "#" || tok[1] != "life" || tok[2] != "v1") {
        throw InputError("life log must start with '# life v1 steps=N pending=0|1'");
      }
      declared_steps = parse_int(expect_prefix(tok[3], "steps=", "steps=N"), "step count");
      declared_pending =
          static_cast<int>(parse_int(expect_prefix(tok[4], "pending=", "pending=0|1"), "pending"));
      saw_header = true;
      continue;
    }
    if (is_comment_or_blank(line)) continue;
    auto tok = split_ws(line);
    if (tok[0] == "pending") {
      if (tok.size() != 3) throw InputError("pending line needs: pending bad={...} action=...");
      PendingStep p;
      p.bad = parse_bad_set(expect_prefix(tok[1], "bad=", "bad={...}"), labels);
      p.action = labels.action_id(expect_prefix(tok[2], "action=", "action=..."));
      if (std::binary_search(p.bad.begin(), p.bad.end(), p.action)) {
        throw InputError("pending action also appears in its bad set");
      }
      h.pending = std::move(p);
      continue;
    }
    if (tok.size() != 3) throw InputError("life log step line needs: bad={...} action=... obs=...");
    HistoryStep s;
    s.bad_before = parse_bad_set(expect_prefix(tok[0], "bad=", "bad={...}"), labels);
    s.action = labels.action_id(expect_prefix(tok[1], "action=", "action=..."));
    s.observation = labels.obs_id(expect_prefix(tok[2], "obs=", "obs=..."));
    if (std::binary_search(s.bad_before.begin(), s.bad_before.end(), s.action)) {
      throw InputError("step action also appears in its bad set");
    }
    if (h.pending) throw InputError("life log has steps after the pending line");
    h.steps.push_back(std::move(s));
  }
  if (!saw_header) throw InputError("empty life log");
  if (declared_steps != h.step_count()) {
    throw InputError("life log header declares " + std::to_string(declared_steps) +
                     " steps but has " + std::to_string(h.step_count()));
  }
  if (declared_pending != (h.pending ? 1 : 0)) {
    throw InputError("life log header pending flag disagrees with the body");
  }
  return h;
}

History load_life_log(const std::string& path, const WorldLabels& labels) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open life log '" + path + "'");
  return parse_life_log(in, labels);
}

std::string print_path(const PathFile& p, const WorldLabels& labels) {
  std::string out = "# path v1 ground-truth steps=" + std::to_string(p.path.moves()) + " start=" +
                    labels.states[static_cast<std::size_t>(p.path.start)] +
                    " cause=" + to_string(p.cause) + "\n";
  for (StateId s : p.path.visited) {
    out += labels.states[static_cast<std::size_t>(s)] + "\n";
  }
  return out;
}

PathFile parse_path(std::istream& in, const WorldLabels& labels) {
  PathFile out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!saw_header) {
      const auto tok = split_ws(line);
      if (tok.size() != 7 || tok[0] != "#" || tok[1] != "path" || tok[2] != "v1" ||
          tok[3] != "ground-truth") {
        throw InputError("path file must start with '# path v1 ground-truth steps=N start=S cause=C'");
      }
      out.path.start = labels.state_id(expect_prefix(tok[5], "start=", "start=..."));
      const std::string cause = expect_prefix(tok[6], "cause=", "cause=...");
      if (cause == "natural-death") {
        out.cause = TerminationCause::NaturalDeath;
      } else if (cause == "sudden-death") {
        out.cause = TerminationCause::SuddenDeath;
      } else {
        throw InputError("unknown termination cause '" + cause + "'");
      }
      saw_header = true;
      continue;
    }
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 1) throw InputError("path file lines carry one state each");
    out.path.visited.push_back(labels.state_id(tok[0]));
  }
  if (!saw_header) throw InputError("empty path file");
  return out;
}

PathFile load_path(const std::string& path, const WorldLabels& labels) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open path file '" + path + "'");
  return parse_path(in, labels);
}

// ---------------------------------------------------------------------------
// rewards and score traces

RewardMap parse_rewards(std::istream& in, const WorldLabels& labels) {
  RewardMap out;
  std::string line;
  bool saw_header = false;
  std::vector<bool> covered(labels.observations.size(), false);
  out.by_observation.resize(labels.observations.size());
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto tok = split_ws(line);
    if (!saw_header) {
      if (tok.size() != 3 || tok[0] != "rewards" || tok[1] != "v1") {
        throw InputError("rewards file must start with 'rewards v1 arity=K'");
      }
      out.arity = static_cast<std::size_t>(
          parse_int(expect_prefix(tok[2], "arity=", "arity=K"), "arity"));
      if (out.arity < 1) throw InputError("reward arity must be >= 1");
      saw_header = true;
      continue;
    }
    if (tok.size() != out.arity + 1) {
      throw InputError("rewards line needs: observation + " + std::to_string(out.arity) + " scores");
    }
    const ObsId o = labels.obs_id(tok[0]);
    ScoreVector row(out.arity);
    for (std::size_t i = 0; i < out.arity; ++i) {
      if (tok[i + 1] != "undef") row[i] = parse_double(tok[i + 1], "score");
    }
    out.by_observation[static_cast<std::size_t>(o)] = std::move(row);
    covered[static_cast<std::size_t>(o)] = true;
  }
  if (!saw_header) throw InputError("empty rewards file");
  for (std::size_t o = 0; o < covered.size(); ++o) {
    if (!covered[o]) {
      throw InputError("reward map is not total: observation '" + labels.observations[o] +
                       "' has no entry");
    }
  }
  return out;
}

RewardMap load_rewards(const std::string& path, const WorldLabels& labels) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open rewards file '" + path + "'");
  return parse_rewards(in, labels);
}

std::string print_scores_csv(const ScoreSequence& s) {
  std::string out;
  for (std::size_t c = 0; c < s.arity; ++c) {
    if (c) out += ',';
    out += "c" + std::to_string(c + 1);
  }
  out += '\n';
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < s.arity; ++c) {
      if (c) out += ',';
      out += row[c] ? format_double(*row[c]) : "undef";
    }
    out += '\n';
  }
  return out;
}

ScoreSequence parse_scores_csv(std::istream& in) {
  ScoreSequence out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_on(line, ',');
    if (!saw_header) {
      out.arity = cells.size();
      saw_header = true;
      continue;
    }
    if (cells.size() != out.arity) throw InputError("score CSV row arity mismatch");
    ScoreVector row(out.arity);
    for (std::size_t i = 0; i < out.arity; ++i) {
      if (cells[i] != "undef") row[i] = parse_double(cells[i], "score");
    }
    out.rows.push_back(std::move(row));
  }
  if (!saw_header) throw InputError("empty score CSV");
  return out;
}

ScoreSequence load_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open score CSV '" + path + "'");
  return parse_scores_csv(in);
}

std::string findings_csv(std::span<const TraceFinding> findings,
                         std::span<const std::string> state_names,
                         std::span<const std::string> label_names,
                         std::span<const std::string> event_names) {
  std::string out = "location,event,empirical,baseline,support,deviation\n";
  for (const auto& f : findings) {
    out += f.location_string(state_names, label_names) + "," +
           event_names[static_cast<std::size_t>(f.event)] + "," + format_double(f.empirical) +
           "," + format_double(f.baseline) + "," + format_double(f.support) + "," +
           format_double(f.deviation) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// experiment configuration

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config lines are key=value; got '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
    } else if (key == "world") {
      cfg.world_file = value;
    } else if (key == "policy") {
      cfg.policy = value;
    } else if (key == "horizon") {
      cfg.horizon = static_cast<int>(parse_int(value, "horizon"));
    } else if (key == "events") {
      cfg.events_file = value;
    } else if (key == "model") {
      cfg.model_file = value;
    } else if (key == "chi") {
      cfg.chi_file = value;
    } else if (key == "rewards") {
      cfg.rewards_file = value;
    } else if (key == "window") {
      cfg.window = static_cast<int>(parse_int(value, "window"));
    } else if (key == "min-support") {
      cfg.min_support = parse_double(value, "min-support");
    } else if (key == "threshold") {
      cfg.threshold = parse_double(value, "threshold");
    } else if (key == "lag") {
      cfg.lag = static_cast<int>(parse_int(value, "lag"));
    } else if (key == "significance") {
      cfg.significance = parse_double(value, "significance");
    } else if (key == "outdir") {
      cfg.output_directory = value;
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  if (cfg.horizon < 0) throw InputError("config horizon must be nonnegative");
  if (cfg.window < 0) throw InputError("config window must be nonnegative");
  if (cfg.lag < 1) throw InputError("config lag must be >= 1");
  if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) {
    throw InputError("config significance must be in (0, 1)");
  }
  for (const std::string* f :
       {&cfg.world_file, &cfg.events_file, &cfg.model_file, &cfg.chi_file, &cfg.rewards_file}) {
    if (!f->empty() && !std::filesystem::exists(*f)) {
      throw InputError("config references a missing file: '" + *f + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace onelife
