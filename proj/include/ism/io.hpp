#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ism/consistency.hpp"
#include "ism/game.hpp"
#include "ism/machine.hpp"
#include "ism/planner.hpp"

namespace ism {

/// Malformed input. Line and column are 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line, column;
};

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);

/// Game file (JSON). Probability rows within 1e-9 of summing to 1 are
/// renormalized; anything further off is rejected with ParseError. With
/// strict = false values are kept as written so validate() can report them.
GameInstance parse_game(const std::string& text, bool strict = true);
std::string dump_game(const GameInstance& g);

/// Square switch matrix given as a JSON array of rows.
SwitchModel parse_switch(const std::string& text);

std::string serialize(const Ism& ism);
Ism deserialize(const std::string& text);
std::string export_dot(const Ism& ism, const GameInstance* g = nullptr);

/// Edge query file: {"source": [...], "target": [...], "alphas": [...],
/// "switch": [[...]], "lambda": x, "observation": [s, a]} or, instead of
/// alphas and switch, "game": <path> with the observation resolved against it.
EdgeQuery parse_query(const std::string& text, const std::filesystem::path& base = {});

/// One observation per line: "state action", or just "action" when the game
/// has a single state. Blank lines and lines starting with '#' are ignored.
std::vector<Observation> parse_script(const std::string& text, const GameInstance& g);

/// Player-1 policy file: one entry per reachable (s, m) with action and value.
std::string serialize_policy(const PlannerPolicy& p, const GameInstance& g, double gamma);
/// Rebuilds a PlannerPolicy over `composed`; every composed state must be covered.
PlannerPolicy deserialize_policy(const std::string& text, ComposedMdp composed, const GameInstance& g);

}  // namespace ism
