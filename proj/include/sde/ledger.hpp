#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>

namespace sde {

namespace stage {
inline constexpr const char *norm_estimate = "norm_estimate";
inline constexpr const char *krylov = "krylov";
inline constexpr const char *rayleigh_ritz = "rayleigh_ritz";
inline constexpr const char *deflated_norm = "deflated_norm";
inline constexpr const char *moments = "moments";
inline constexpr const char *lanczos = "lanczos";
inline constexpr const char *residual_tests = "residual_tests";
} // namespace stage

/// Exact count of operator applications, broken down by stage label.
///
/// Charging is thread-safe; the total is always the sum of the per-stage
/// counts.
class BudgetLedger {
public:
  BudgetLedger() = default;
  BudgetLedger(const BudgetLedger &other);
  BudgetLedger &operator=(const BudgetLedger &other);

  void charge(const std::string &stage, std::uint64_t count = 1);

  /// Adds every stage count of `other` into this ledger.
  void merge(const BudgetLedger &other);

  std::uint64_t total() const;
  std::uint64_t count(const std::string &stage) const;
  std::map<std::string, std::uint64_t> counts() const;

private:
  mutable std::mutex mutex_;
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

} // namespace sde
