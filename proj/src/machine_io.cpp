#include <cstdio>
#include <sstream>

#include "ism/io.hpp"
#include "json.hpp"

namespace ism {

using nlohmann::json;

namespace detail {
json parse_json(const std::string& text);
}

std::string serialize(const Ism& ism) {
  json j;
  json alpha = json::array();
  for (const auto& o : ism.alphabet()) alpha.push_back({o.state, o.action});
  j["alphabet"] = alpha;
  j["initial"] = ism.initial();
  json states = json::array();
  for (Index m = 0; m < ism.num_states(); ++m)
    states.push_back({{"index", m}, {"belief", ism.belief(m).vec()}});
  j["states"] = states;
  json edges = json::array();
  for (Index m = 0; m < ism.num_states(); ++m)
    for (Index l = 0; l < ism.alphabet().size(); ++l)
      if (auto d = ism.successor(m, l); d != Ism::kUndefined)
        edges.push_back({{"src", m},
                         {"state", ism.alphabet()[l].state},
                         {"action", ism.alphabet()[l].action},
                         {"dst", d}});
  j["edges"] = edges;
  return j.dump(1) + "\n";
}

Ism deserialize(const std::string& text) {
  const json j = detail::parse_json(text);
  try {
    std::vector<Observation> alpha;
    for (const auto& o : j.at("alphabet")) alpha.push_back({o.at(0).get<Index>(), o.at(1).get<Index>()});
    if (j.value("initial", Index{0}) != 0) throw ParseError("ISM initial state must be 0");
    Ism ism(std::move(alpha));
    const auto& states = j.at("states");
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i].at("index").get<Index>() != i) throw ParseError("ISM states must be listed in index order");
      ism.add_state(Belief::exact(states[i].at("belief").get<std::vector<double>>()));
    }
    for (const auto& e : j.at("edges"))
      ism.set_edge(e.at("src").get<Index>(),
                   Observation{e.at("state").get<Index>(), e.at("action").get<Index>()},
                   e.at("dst").get<Index>());
    return ism;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ISM file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("ISM file: ") + e.what());
  }
}

std::string export_dot(const Ism& ism, const GameInstance* g) {
  auto label = [&](const Observation& o) {
    if (!g) return "(" + std::to_string(o.state) + "," + std::to_string(o.action) + ")";
    return "(" + g->arena.state_names()[o.state] + "," + g->arena.p2_action_names()[o.action] + ")";
  };
  std::ostringstream os;
  os << "digraph ism {\n  rankdir=LR;\n";
  for (Index m = 0; m < ism.num_states(); ++m) {
    os << "  m" << m << " [label=\"" << m << "\\n(";
    const auto& b = ism.belief(m);
    for (std::size_t i = 0; i < b.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", b[i]);
      os << (i ? ", " : "") << buf;
    }
    os << ")\"" << (m == ism.initial() ? ", shape=doublecircle" : "") << "];\n";
  }
  for (Index m = 0; m < ism.num_states(); ++m)
    for (Index l = 0; l < ism.alphabet().size(); ++l)
      if (auto d = ism.successor(m, l); d != Ism::kUndefined)
        os << "  m" << m << " -> m" << d << " [label=\"" << label(ism.alphabet()[l]) << "\"];\n";
  os << "}\n";
  return os.str();
}

EdgeQuery parse_query(const std::string& text, const std::filesystem::path& base) {
  const json j = detail::parse_json(text);
  try {
    EdgeQuery q;
    q.source = Belief(j.at("source").get<std::vector<double>>());
    q.target = Belief(j.at("target").get<std::vector<double>>());
    q.lambda = j.at("lambda").get<double>();
    const auto& o = j.at("observation");
    if (j.contains("game")) {
      auto path = std::filesystem::path(j["game"].get<std::string>());
      if (path.is_relative()) path = base / path;
      const GameInstance g = parse_game(read_text(path));
      auto ref = [](const json& v, const std::vector<std::string>& names) -> Index {
        if (v.is_number_integer()) return v.get<Index>();
        for (Index i = 0; i < names.size(); ++i)
          if (names[i] == v.get<std::string>()) return i;
        throw ParseError("unknown name in observation: " + v.get<std::string>());
      };
      q.observation = {ref(o.at(0), g.arena.state_names()), ref(o.at(1), g.arena.p2_action_names())};
      q.alphas = g.alphas(q.observation);
      q.switching = g.switching;
    } else {
      q.observation = {o.at(0).get<Index>(), o.at(1).get<Index>()};
      q.alphas = j.at("alphas").get<std::vector<double>>();
      std::vector<double> m;
      for (const auto& row : j.at("switch"))
        for (const auto& v : row) m.push_back(v.get<double>());
      const auto n = q.alphas.size();
      q.switching = SwitchModel(n, std::move(m));
    }
    if (j.contains("switch") && j.contains("game")) {
      std::vector<double> m;
      for (const auto& row : j["switch"])
        for (const auto& v : row) m.push_back(v.get<double>());
      q.switching = SwitchModel(q.alphas.size(), std::move(m));
    }
    return q;
  } catch (const json::exception& e) {
    throw ParseError(std::string("query file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("query file: ") + e.what());
  }
}

}  // namespace ism

namespace ism {

std::string serialize_policy(const PlannerPolicy& p, const GameInstance& g, double gamma) {
  json j;
  j["gamma"] = gamma;
  json entries = json::array();
  for (Index k = 0; k < p.composed.size(); ++k) {
    const auto [s, m] = p.composed.pairs[k];
    entries.push_back({{"s", g.arena.state_names()[s]},
                       {"m", m},
                       {"action", g.arena.p1_action_names()[p.plan.policy[k]]},
                       {"value", p.plan.values[k]}});
  }
  j["entries"] = entries;
  return j.dump(1) + "\n";
}

PlannerPolicy deserialize_policy(const std::string& text, ComposedMdp composed, const GameInstance& g) {
  const json j = detail::parse_json(text);
  auto find = [](const std::vector<std::string>& names, const std::string& v, const char* kind) {
    for (Index i = 0; i < names.size(); ++i)
      if (names[i] == v) return i;
    throw ParseError(std::string("policy file: unknown ") + kind + " '" + v + "'");
  };
  try {
    PlannerPolicy p{std::move(composed), {}};
    const std::size_t n = p.composed.size();
    p.plan.policy.assign(n, 0);
    p.plan.values.assign(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& e : j.at("entries")) {
      const Index s = find(g.arena.state_names(), e.at("s").get<std::string>(), "state");
      const Index k = p.composed.index_of(s, e.at("m").get<Index>());
      if (k == ComposedMdp::kUnreached) continue;
      p.plan.policy[k] = find(g.arena.p1_action_names(), e.at("action").get<std::string>(), "action");
      p.plan.values[k] = e.value("value", 0.0);
      seen[k] = true;
    }
    for (Index k = 0; k < n; ++k)
      if (!seen[k]) throw ParseError("policy file does not cover composed state " + std::to_string(k));
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy file: ") + e.what());
  }
}

}  // namespace ism
