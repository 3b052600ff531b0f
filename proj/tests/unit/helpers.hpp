#pragma once

#include <random>
#include <vector>

#include "ism/game.hpp"
#include "ism/random.hpp"

namespace testutil {

/// Single-state game with n policies over k opponent actions; random
/// policy rows, random positive switch matrix, rewards in [-1, 1].
inline ism::GameInstance random_stateless_game(std::size_t n, std::size_t k, ism::Rng& rng) {
  std::vector<std::string> a2;
  for (std::size_t a = 0; a < k; ++a) a2.push_back("a" + std::to_string(a));
  ism::GameArena arena({"s"}, {"x", "y"}, a2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (ism::Index a1 = 0; a1 < 2; ++a1)
    for (ism::Index b = 0; b < k; ++b) {
      arena.next_mut(0, a1, b)[0] = 1.0;
      arena.set_reward(0, a1, b, u(rng));
    }
  ism::GameInstance g;
  g.arena = arena;
  for (std::size_t i = 0; i < n; ++i)
    g.policies.push_back({"p" + std::to_string(i), k, ism::sample_simplex(k, rng)});
  std::vector<double> t;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ism::sample_simplex(n, rng);
    for (double& x : row) x = 0.5 * x + 0.5 / n;
    t.insert(t.end(), row.begin(), row.end());
  }
  g.switching = ism::SwitchModel(n, t);
  return g;
}

inline std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace testutil
