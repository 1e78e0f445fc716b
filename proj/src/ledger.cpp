#include "sde/ledger.hpp"

namespace sde {

BudgetLedger::BudgetLedger(const BudgetLedger &other) {
  std::lock_guard lock(other.mutex_);
  counts_ = other.counts_;
  total_ = other.total_;
}

BudgetLedger &BudgetLedger::operator=(const BudgetLedger &other) {
  if (this == &other)
    return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  counts_ = other.counts_;
  total_ = other.total_;
  return *this;
}

void BudgetLedger::charge(const std::string &stage, std::uint64_t count) {
  std::lock_guard lock(mutex_);
  counts_[stage] += count;
  total_ += count;
}

void BudgetLedger::merge(const BudgetLedger &other) {
  if (this == &other) {
    std::lock_guard lock(mutex_);
    for (auto &[stage, c] : counts_)
      c *= 2;
    total_ *= 2;
    return;
  }
  std::scoped_lock lock(mutex_, other.mutex_);
  for (const auto &[stage, c] : other.counts_)
    counts_[stage] += c;
  total_ += other.total_;
}

std::uint64_t BudgetLedger::total() const {
  std::lock_guard lock(mutex_);
  return total_;
}

std::uint64_t BudgetLedger::count(const std::string &stage) const {
  std::lock_guard lock(mutex_);
  auto it = counts_.find(stage);
  return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, std::uint64_t> BudgetLedger::counts() const {
  std::lock_guard lock(mutex_);
  return counts_;
}

} // namespace sde
