#pragma once

// Tabular Q-learning.

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "natrl/core/errors.hpp"

namespace natrl {

// argmax with ties broken by the lowest action id.
inline int greedy_action(std::span<const double> q) {
  if (q.empty()) throw ContractViolation("greedy_action: empty action set");
  int best = 0;
  for (std::size_t a = 1; a < q.size(); ++a) {
    if (q[a] > q[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
  }
  return best;
}

inline double max_value(std::span<const double> q) {
  if (q.empty()) throw ContractViolation("max_value: empty action set");
  return *std::max_element(q.begin(), q.end());
}

using StateId = std::uint64_t;

// Q(s, a) over sparse integer states; missing entries read as 0.
class QTable {
 public:
  QTable(int num_actions, double alpha, double gamma) : num_actions_(num_actions), alpha_(alpha), gamma_(gamma) {
    if (num_actions < 1) throw ContractViolation("QTable: need at least one action");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractViolation("QTable: alpha must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractViolation("QTable: gamma must lie in [0, 1)");
  }

  int num_actions() const { return num_actions_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  void set_alpha(double alpha) { alpha_ = alpha; }

  bool contains(StateId s) const { return table_.count(s) != 0; }
  std::size_t size() const { return table_.size(); }

  double value(StateId s, int a) const {
    auto it = table_.find(s);
    return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(a)];
  }

  std::vector<double> row(StateId s) const {
    auto it = table_.find(s);
    return it == table_.end() ? std::vector<double>(static_cast<std::size_t>(num_actions_), 0.0) : it->second;
  }

  std::vector<double>& mutable_row(StateId s) {
    auto [it, inserted] = table_.try_emplace(s);
    if (inserted) it->second.assign(static_cast<std::size_t>(num_actions_), 0.0);
    return it->second;
  }

  // Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') * (1 - terminal) - Q(s,a)).
  // Returns the TD error.
  double update(StateId s, int a, double reward, StateId next, bool terminal) {
    if (a < 0 || a >= num_actions_) throw ContractViolation("QTable::update: action out of range");
    const double bootstrap = terminal ? 0.0 : max_value(row(next));
    auto& q = mutable_row(s);
    const double delta = reward + gamma_ * bootstrap - q[static_cast<std::size_t>(a)];
    q[static_cast<std::size_t>(a)] += alpha_ * delta;
    return delta;
  }

  double state_value(StateId s) const { return max_value(row(s)); }
  int greedy(StateId s) const { return greedy_action(row(s)); }

  // State ids in ascending order (for stable serialization).
  std::vector<StateId> states() const {
    std::vector<StateId> ids;
    ids.reserve(table_.size());
    for (const auto& kv : table_) ids.push_back(kv.first);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

 private:
  int num_actions_;
  double alpha_;
  double gamma_;
  std::unordered_map<StateId, std::vector<double>> table_;
};

inline double q_update(QTable& table, StateId s, int a, double r, StateId s_next, bool terminal) {
  return table.update(s, a, r, s_next, terminal);
}

inline double v_from_q(const QTable& table, StateId s) { return table.state_value(s); }
inline int greedy_action(const QTable& table, StateId s) { return table.greedy(s); }

}  // namespace natrl
