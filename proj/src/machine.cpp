#include "ism/machine.hpp"

#include <algorithm>
#include <stdexcept>

namespace ism {

InformationStateMachine::InformationStateMachine(std::vector<Observation> alphabet)
    : alphabet_(std::move(alphabet)) {
  if (!std::is_sorted(alphabet_.begin(), alphabet_.end()))
    throw std::invalid_argument("ISM alphabet must be in canonical order");
}

Index InformationStateMachine::add_state(Belief b) {
  beliefs_.push_back(std::move(b));
  next_.resize(beliefs_.size() * alphabet_.size(), kUndefined);
  return beliefs_.size() - 1;
}

void InformationStateMachine::set_edge(Index m, Index letter, Index dst) {
  if (m >= num_states() || dst >= num_states() || letter >= alphabet_.size())
    throw std::out_of_range("ISM edge out of range");
  next_[m * alphabet_.size() + letter] = dst;
}

void InformationStateMachine::set_edge(Index m, const Observation& o, Index dst) {
  auto l = letter(o);
  if (!l) throw std::out_of_range("observation outside the ISM alphabet");
  set_edge(m, *l, dst);
}

std::size_t InformationStateMachine::num_edges() const {
  return static_cast<std::size_t>(
      std::count_if(next_.begin(), next_.end(), [](Index d) { return d != kUndefined; }));
}

std::optional<Index> InformationStateMachine::letter(const Observation& o) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), o);
  if (it == alphabet_.end() || *it != o) return std::nullopt;
  return static_cast<Index>(it - alphabet_.begin());
}

std::optional<Index> advance(const Ism& ism, Index m, const Observation& o) {
  if (m >= ism.num_states()) throw std::out_of_range("advance: invalid ISM state");
  auto l = ism.letter(o);
  if (!l) return std::nullopt;
  const Index d = ism.successor(m, *l);
  if (d == Ism::kUndefined) return std::nullopt;
  return d;
}

RunResult run(const Ism& ism, std::span<const Observation> seq) {
  Index m = ism.initial();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    auto d = advance(ism, m, seq[k]);
    if (!d) return {std::nullopt, k};
    m = *d;
  }
  return {m, std::nullopt};
}

}  // namespace ism
