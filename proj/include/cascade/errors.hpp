#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Invalid or missing configuration. `key` names the offending entry so the
// CLI can point at it (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config error: key '" + key + "': " + what),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Exact enumeration exceeded its state-count or horizon guard.
class BudgetExceeded : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Slope fit has fewer usable checkpoints than the minimum.
class InsufficientData : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cascade
