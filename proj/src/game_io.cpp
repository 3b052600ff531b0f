#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ism/io.hpp"
#include "json.hpp"

namespace ism {

using nlohmann::json;

ParseError::ParseError(const std::string& what, std::size_t l, std::size_t c)
    : std::runtime_error(l ? what + " (line " + std::to_string(l) + ", column " +
                                 std::to_string(c) + ")"
                           : what),
      line(l),
      column(c) {}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

namespace detail {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed JSON: " + std::string(e.what()), line, col);
  }
}

}  // namespace detail

namespace {

class NameTable {
 public:
  NameTable(std::string kind, const std::vector<std::string>& names) : kind_(std::move(kind)) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!idx_.emplace(names[i], i).second)
        throw ParseError("duplicate " + kind_ + " name '" + names[i] + "'");
    }
    size_ = names.size();
  }

  Index operator()(const json& ref) const {
    if (ref.is_number_integer()) {
      const auto v = ref.get<long long>();
      if (v < 0 || static_cast<std::size_t>(v) >= size_)
        throw ParseError(kind_ + " index " + std::to_string(v) + " out of range");
      return static_cast<Index>(v);
    }
    if (!ref.is_string()) throw ParseError(kind_ + " reference must be a name or index");
    return (*this)(ref.get<std::string>());
  }

  Index operator()(const std::string& name) const {
    auto it = idx_.find(name);
    if (it == idx_.end()) throw ParseError("unknown " + kind_ + " '" + name + "'");
    return it->second;
  }

 private:
  std::string kind_;
  std::map<std::string, Index> idx_;
  std::size_t size_ = 0;
};

std::vector<std::string> names(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ParseError(std::string("missing array '") + key + "'");
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ParseError(std::string("'") + key + "' must list names");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void normalize_row(std::span<double> row, const std::string& what, bool strict) {
  if (!strict) return;
  double sum = 0.0;
  for (double x : row) {
    if (!(x >= 0.0)) throw ParseError(what + ": negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTolerance)
    throw ParseError(what + ": probabilities sum to " + std::to_string(sum));
  // Rows already normalized up to rounding are kept bit-for-bit so that
  // dump/parse round trips are exact.
  if (std::abs(sum - 1.0) <= 8 * std::numeric_limits<double>::epsilon()) return;
  for (auto& x : row) x /= sum;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  return j.get<double>();
}

// Accepts a list of rows or a flat row-major list.
SwitchModel switch_matrix(const json& j, std::size_t n, bool strict) {
  std::vector<double> m;
  for (const auto& row : j) {
    if (row.is_array()) {
      for (const auto& v : row) m.push_back(number(v, "switch entry"));
    } else {
      m.push_back(number(row, "switch entry"));
    }
  }
  if (m.size() != n * n)
    throw ParseError("switch matrix has " + std::to_string(m.size()) + " entries, expected " +
                     std::to_string(n * n));
  for (std::size_t i = 0; i < n; ++i)
    normalize_row({m.data() + i * n, n}, "switch row " + std::to_string(i), strict);
  return SwitchModel(n, std::move(m));
}

}  // namespace

namespace {

GameInstance parse_game_json(const json& j, bool strict) {
  if (!j.is_object()) throw ParseError("game file must be a JSON object");
  const auto sn = names(j, "states"), a1n = names(j, "p1_actions"), a2n = names(j, "p2_actions");
  const NameTable S("state", sn), A1("p1 action", a1n), A2("p2 action", a2n);
  GameArena arena(sn, a1n, a2n);

  std::vector<bool> given(sn.size() * a1n.size() * a2n.size(), false);
  if (j.contains("transitions")) {
    for (const auto& t : j["transitions"]) {
      const Index s = S(t.at("s")), a1 = A1(t.at("a1")), a2 = A2(t.at("a2"));
      auto row = arena.next_mut(s, a1, a2);
      std::fill(row.begin(), row.end(), 0.0);
      if (!t.contains("next") || !t["next"].is_object())
        throw ParseError("transition needs a 'next' object");
      for (const auto& [name, p] : t["next"].items()) row[S(name)] += number(p, "transition probability");
      given[(s * a1n.size() + a1) * a2n.size() + a2] = true;
    }
  }
  for (Index s = 0; s < sn.size(); ++s)
    for (Index a1 = 0; a1 < a1n.size(); ++a1)
      for (Index a2 = 0; a2 < a2n.size(); ++a2) {
        auto row = arena.next_mut(s, a1, a2);
        if (!given[(s * a1n.size() + a1) * a2n.size() + a2]) row[s] = 1.0;
        normalize_row(row, "transition (" + sn[s] + ", " + a1n[a1] + ", " + a2n[a2] + ")", strict);
      }
  if (j.contains("rewards"))
    for (const auto& r : j["rewards"])
      arena.set_reward(S(r.at("s")), A1(r.at("a1")), A2(r.at("a2")), number(r.at("r"), "reward"));
  if (j.contains("initial_state")) arena.set_initial_state(S(j["initial_state"]));

  std::vector<OpponentPolicy> pols;
  if (!j.contains("policies") || !j["policies"].is_array()) throw ParseError("missing array 'policies'");
  for (const auto& p : j["policies"]) {
    OpponentPolicy pol{p.value("name", "pi" + std::to_string(pols.size() + 1)), a2n.size(),
                       std::vector<double>(sn.size() * a2n.size(), 0.0)};
    const json& choice = p.at("choice");
    if (!choice.is_object()) throw ParseError("policy '" + pol.name + "': choice must be an object");
    const json* fallback = choice.contains("*") ? &choice["*"] : nullptr;
    for (Index s = 0; s < sn.size(); ++s) {
      const json* dist = choice.contains(sn[s]) ? &choice[sn[s]] : fallback;
      if (!dist) throw ParseError("policy '" + pol.name + "' is undefined at state '" + sn[s] + "'");
      for (const auto& [a, v] : dist->items()) pol.choice[s * a2n.size() + A2(a)] += number(v, "policy probability");
      normalize_row({pol.choice.data() + s * a2n.size(), a2n.size()},
                    "policy '" + pol.name + "' at state '" + sn[s] + "'", strict);
    }
    pols.push_back(std::move(pol));
  }

  if (!j.contains("switch")) throw ParseError("missing 'switch' matrix");
  SwitchModel t = switch_matrix(j["switch"], pols.size(), strict);
  return {std::move(arena), std::move(pols), std::move(t)};
}

}  // namespace

SwitchModel parse_switch(const std::string& text) {
  const json j = detail::parse_json(text);
  if (!j.is_array()) throw ParseError("switch file must hold an array of rows");
  return switch_matrix(j, j.size(), true);
}

GameInstance parse_game(const std::string& text, bool strict) {
  const json j = detail::parse_json(text);
  try {
    return parse_game_json(j, strict);
  } catch (const json::exception& e) {
    throw ParseError(std::string("game file: ") + e.what());
  }
}

std::string dump_game(const GameInstance& g) {
  const auto& a = g.arena;
  json j;
  j["states"] = a.state_names();
  j["p1_actions"] = a.p1_action_names();
  j["p2_actions"] = a.p2_action_names();
  j["initial_state"] = a.state_names()[a.initial_state()];
  json tr = json::array(), rw = json::array();
  for (Index s = 0; s < a.num_states(); ++s)
    for (Index a1 = 0; a1 < a.num_p1_actions(); ++a1)
      for (Index a2 = 0; a2 < a.num_p2_actions(); ++a2) {
        json next = json::object();
        auto row = a.next(s, a1, a2);
        const bool self_loop = row[s] == 1.0;
        for (Index t = 0; t < row.size(); ++t)
          if (row[t] != 0.0) next[a.state_names()[t]] = row[t];
        if (!self_loop)
          tr.push_back({{"s", a.state_names()[s]}, {"a1", a.p1_action_names()[a1]},
                        {"a2", a.p2_action_names()[a2]}, {"next", next}});
        if (a.reward(s, a1, a2) != 0.0)
          rw.push_back({{"s", a.state_names()[s]}, {"a1", a.p1_action_names()[a1]},
                        {"a2", a.p2_action_names()[a2]}, {"r", a.reward(s, a1, a2)}});
      }
  j["transitions"] = tr;
  j["rewards"] = rw;
  json pols = json::array();
  for (const auto& p : g.policies) {
    json choice = json::object();
    for (Index s = 0; s < a.num_states(); ++s) {
      json d = json::object();
      for (Index k = 0; k < p.num_actions; ++k)
        if (p.prob(s, k) != 0.0) d[a.p2_action_names()[k]] = p.prob(s, k);
      choice[a.state_names()[s]] = d;
    }
    pols.push_back({{"name", p.name}, {"choice", choice}});
  }
  j["policies"] = pols;
  json sw = json::array();
  for (Index i = 0; i < g.switching.size(); ++i) {
    auto r = g.switching.row(i);
    sw.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["switch"] = sw;
  return j.dump(1) + "\n";
}

std::vector<Observation> parse_script(const std::string& text, const GameInstance& g) {
  const NameTable S("state", g.arena.state_names()), A2("p2 action", g.arena.p2_action_names());
  std::vector<Observation> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    try {
      if (tok.size() == 1) {
        if (g.arena.num_states() != 1)
          throw ParseError("state name required for multi-state games");
        out.push_back({0, A2(tok[0])});
      } else if (tok.size() == 2) {
        out.push_back({S(tok[0]), A2(tok[1])});
      } else {
        throw ParseError("expected 'state action'");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, 1);
    }
  }
  return out;
}

}  // namespace ism
