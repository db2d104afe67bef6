#pragma once

#include <string>
#include <vector>

namespace fellgpd {

/// One verified property: its name, outcome, worst residual seen and, on
/// failure, the offending objects.
struct Check {
  std::string name;
  bool pass = true;
  double residual = 0.0;
  std::string witness;
};

using CheckList = std::vector<Check>;

inline bool all_pass(const CheckList& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

inline const Check* find_check(const CheckList& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

/// Tracks the worst residual of a family of comparisons and the first witness
/// that broke the tolerance.
class ResidualTracker {
 public:
  ResidualTracker(std::string name, double tol) : check_{std::move(name), true, 0.0, {}}, tol_(tol) {}

  void observe(double residual, const std::string& witness) {
    if (residual > check_.residual) check_.residual = residual;
    if (residual > tol_ && check_.pass) {
      check_.pass = false;
      check_.witness = witness;
    }
  }
  void fail(const std::string& witness) {
    if (check_.pass) {
      check_.pass = false;
      check_.witness = witness;
    }
  }
  bool pass() const noexcept { return check_.pass; }
  Check done() const { return check_; }

 private:
  Check check_;
  double tol_;
};

}  // namespace fellgpd
