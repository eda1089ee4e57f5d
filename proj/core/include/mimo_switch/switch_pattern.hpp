#pragma once

#include <string>
#include <vector>

#include "mimo_switch/types.hpp"

namespace mimo_switch {

// Unicast permutation: sender i is heard by receiver pi(i). Storage is 0-based.
class SwitchPattern {
 public:
  explicit SwitchPattern(std::vector<int> receiver_of);

  static SwitchPattern from_one_based(const std::vector<int>& perm);

  int size() const { return static_cast<int>(receiver_of_.size()); }
  int receiver_of(int sender) const { return receiver_of_[sender]; }
  int sender_to(int receiver) const { return sender_to_[receiver]; }
  const std::vector<int>& receivers() const { return receiver_of_; }

  bool is_derangement() const;
  // pi equals its own inverse, i.e. users exchange in pairs.
  bool is_symmetric() const;

  // Column i is e_{pi(i)}.
  Eigen::MatrixXd matrix() const;

  // Cycles of pi, each listed starting at its smallest member and following i -> pi(i).
  std::vector<std::vector<int>> cycles() const;

  // 1-based, e.g. "2-1-4-3".
  std::string id() const;

  bool operator==(const SwitchPattern& other) const { return receiver_of_ == other.receiver_of_; }

 private:
  std::vector<int> receiver_of_;
  std::vector<int> sender_to_;
};

}  // namespace mimo_switch
