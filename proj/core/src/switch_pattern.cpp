#include "mimo_switch/switch_pattern.hpp"

#include <algorithm>

namespace mimo_switch {

const char* to_string(Mode mode) { return mode == Mode::Pnc ? "pnc" : "non-pnc"; }

Mode parse_mode(const std::string& text) {
  if (text == "pnc") return Mode::Pnc;
  if (text == "non-pnc") return Mode::NonPnc;
  throw ContractViolation("unknown mode '" + text + "' (expected pnc or non-pnc)");
}

SwitchPattern::SwitchPattern(std::vector<int> receiver_of) : receiver_of_(std::move(receiver_of)) {
  const int k = size();
  if (k < 2) throw ContractViolation("switch pattern needs at least two users");
  sender_to_.assign(k, -1);
  for (int i = 0; i < k; ++i) {
    const int j = receiver_of_[i];
    if (j < 0 || j >= k || sender_to_[j] != -1)
      throw ContractViolation("switch pattern is not a permutation");
    sender_to_[j] = i;
  }
}

SwitchPattern SwitchPattern::from_one_based(const std::vector<int>& perm) {
  std::vector<int> zero(perm.size());
  std::transform(perm.begin(), perm.end(), zero.begin(), [](int v) { return v - 1; });
  return SwitchPattern(std::move(zero));
}

bool SwitchPattern::is_derangement() const {
  for (int i = 0; i < size(); ++i)
    if (receiver_of_[i] == i) return false;
  return true;
}

bool SwitchPattern::is_symmetric() const { return receiver_of_ == sender_to_; }

Eigen::MatrixXd SwitchPattern::matrix() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size(), size());
  for (int i = 0; i < size(); ++i) p(receiver_of_[i], i) = 1.0;
  return p;
}

std::vector<std::vector<int>> SwitchPattern::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(size(), false);
  for (int start = 0; start < size(); ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    for (int j = start; !seen[j]; j = receiver_of_[j]) {
      seen[j] = true;
      cycle.push_back(j);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::string SwitchPattern::id() const {
  std::string s;
  for (int i = 0; i < size(); ++i) {
    if (i) s += '-';
    s += std::to_string(receiver_of_[i] + 1);
  }
  return s;
}

}  // namespace mimo_switch
