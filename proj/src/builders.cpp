#include <cmath>
#include <string>

#include "ism/game.hpp"

namespace ism {

namespace {

// Rock-paper-scissors payoff for player 1, indexed [a1][a2] with order r, p, s.
constexpr double kRpsReward[3][3] = {
    {0.0, -1.0, 1.0},
    {1.0, 0.0, -1.0},
    {-1.0, 1.0, 0.0},
};

OpponentPolicy stateless(std::string name, std::size_t states, std::vector<double> dist) {
  OpponentPolicy p{std::move(name), dist.size(), {}};
  for (std::size_t s = 0; s < states; ++s) p.choice.insert(p.choice.end(), dist.begin(), dist.end());
  return p;
}

// Distribution over {r, p, s} with `hi` on action k and `lo` elsewhere.
std::vector<double> peaked(Index k, double hi, double lo) {
  std::vector<double> d(3, lo);
  d[k] = hi;
  return d;
}

// 0.1 on action k and 0.45 on the other two.
std::vector<double> avoiding(Index k) { return peaked(k, 0.1, 0.45); }

// The action that beats k: rock is beaten by paper, paper by scissors, scissors by rock.
Index beater(Index k) { return (k + 1) % 3; }

}  // namespace

GameInstance build_rps() {
  GameArena arena({"t"}, {"r1", "p1", "s1"}, {"r2", "p2", "s2"});
  for (Index a1 = 0; a1 < 3; ++a1)
    for (Index a2 = 0; a2 < 3; ++a2) {
      arena.next_mut(0, a1, a2)[0] = 1.0;
      arena.set_reward(0, a1, a2, kRpsReward[a1][a2]);
    }
  const double third = 1.0 / 3.0;
  std::vector<OpponentPolicy> pol{
      stateless("pi1", 1, {0.5, 0.5, 0.0}),
      stateless("pi2", 1, {0.0, 0.5, 0.5}),
      stateless("pi3", 1, {0.5, 0.0, 0.5}),
      stateless("pi4", 1, {third, third, third}),
  };
  return {std::move(arena), std::move(pol), rps_reference_switch()};
}

SwitchModel rps_reference_switch() {
  return SwitchModel(4, {0.55, 0.15, 0.15, 0.15,
                         0.15, 0.55, 0.15, 0.15,
                         0.12, 0.12, 0.64, 0.12,
                         0.12, 0.12, 0.12, 0.64});
}

GameInstance build_rps_mem(double stay) {
  const std::vector<std::string> a1n{"r1", "p1", "s1"}, a2n{"r2", "p2", "s2"};
  std::vector<std::string> states;
  for (const auto& a : a1n)
    for (const auto& b : a2n) states.push_back("(" + a + "," + b + ")");

  GameArena arena(states, a1n, a2n);
  for (Index s = 0; s < 9; ++s)
    for (Index a1 = 0; a1 < 3; ++a1)
      for (Index a2 = 0; a2 < 3; ++a2) {
        arena.next_mut(s, a1, a2)[a1 * 3 + a2] = 1.0;
        arena.set_reward(s, a1, a2, kRpsReward[a1][a2]);
      }

  std::vector<OpponentPolicy> pol{
      stateless("pi1", 9, {0.45, 0.45, 0.1}),
      stateless("pi2", 9, {0.45, 0.1, 0.45}),
      stateless("pi3", 9, {0.1, 0.45, 0.45}),
  };
  // Remaining six policies react to the previous joint move (a, b).
  auto reactive = [&](std::string name, auto rule) {
    OpponentPolicy p{std::move(name), 3, {}};
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) {
        auto d = rule(a, b);
        p.choice.insert(p.choice.end(), d.begin(), d.end());
      }
    pol.push_back(std::move(p));
  };
  reactive("pi4", [](Index a, Index) { return peaked(a, 0.8, 0.1); });
  reactive("pi5", [](Index a, Index) { return peaked(beater(a), 0.8, 0.1); });
  reactive("pi6", [](Index a, Index) { return avoiding(a); });
  reactive("pi7", [](Index, Index b) { return peaked(b, 0.8, 0.1); });
  reactive("pi8", [](Index, Index b) { return peaked(beater(b), 0.8, 0.1); });
  reactive("pi9", [](Index, Index b) { return avoiding(b); });

  return {std::move(arena), std::move(pol), build_switch(9, stay)};
}

int ring_distance(int i, int j, int cells) {
  const int d = std::abs(i - j);
  return std::min(d, cells - d);
}

GameInstance build_anticipate_avoid(int cells, double stay) {
  if (cells < 10) throw std::domain_error("anticipate-avoid needs at least 10 cells");
  const int N = cells;
  std::vector<std::string> states;
  states.reserve(static_cast<std::size_t>(N) * N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      states.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
  GameArena arena(states, {"L", "R"}, {"L", "R"});

  auto idx = [N](int i, int j) { return static_cast<Index>((i - 1) * N + (j - 1)); };
  auto right = [N](int i) { return i == N ? 1 : i + 1; };
  auto left = [N](int i) { return i == 1 ? N : i - 1; };
  auto move = [&](int i, Index a) { return a == 0 ? left(i) : right(i); };

  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      const Index s = idx(i, j);
      const int rho = ring_distance(i, j, N);
      double r = 1.0;
      if (i == j) r = -10.0;
      else if (rho <= N / 10.0) r = -5.0;
      else if (rho <= 3.0 * N / 10.0) r = 0.0;
      for (Index a1 = 0; a1 < 2; ++a1)
        for (Index a2 = 0; a2 < 2; ++a2) {
          arena.set_reward(s, a1, a2, r);
          auto row = arena.next_mut(s, a1, a2);
          for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj) {
              const int i2 = di ? move(i, a1) : i;
              const int j2 = dj ? move(j, a2) : j;
              row[idx(i2, j2)] += (di ? 0.8 : 0.2) * (dj ? 0.8 : 0.2);
            }
        }
    }

  std::vector<OpponentPolicy> pol;
  for (int q = 0; q < 4; ++q) {
    const int t = q == 0 ? 1 : static_cast<int>(std::ceil(q * N / 4.0));
    OpponentPolicy p{"target_" + std::to_string(t), 2, {}};
    for (int i = 1; i <= N; ++i)
      for (int j = 1; j <= N; ++j) {
        // Head along the shorter arc toward t; ties go left.
        const int leftward = j >= t ? j - t : j - t + N;
        const int rightward = j <= t ? t - j : t - j + N;
        double pl = 0.5;
        if (j != t) pl = leftward <= rightward ? 0.8 : 0.2;
        p.choice.push_back(pl);
        p.choice.push_back(1.0 - pl);
      }
    pol.push_back(std::move(p));
  }
  return {std::move(arena), std::move(pol), build_switch(4, stay)};
}

}  // namespace ism
