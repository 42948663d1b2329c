#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rrnet {

/// Settings for one batch run: a subcommand plus flat string key/values.
/// Keys are checked against the subcommand's vocabulary on every set, so
/// a typo fails with the key named instead of being silently ignored.
class RunConfig {
 public:
  /// train, benchmark, influence, breakdown or cv.
  explicit RunConfig(std::string subcommand);

  const std::string& subcommand() const { return subcommand_; }
  static const std::vector<std::string>& subcommands();
  /// Keys accepted by `subcommand`, sorted.
  static std::vector<std::string> allowed_keys(const std::string& subcommand);

  void set(const std::string& key, const std::string& value);
  /// `key = value` lines; `#` starts a comment; blank lines ignored.
  /// Later values override earlier ones.
  void merge_text(const std::string& text, const std::string& source);
  void merge_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Explicitly set keys, in key order.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string subcommand_;
  std::map<std::string, std::string> values_;
};

/// Comma-separated list with surrounding blanks removed; empty items dropped.
std::vector<std::string> split_list(const std::string& text);

}  // namespace rrnet
