#include "rrnet/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"

namespace rrnet {

namespace {

const std::vector<std::string> kCommon = {"seed",  "out",       "jobs",  "epochs",          "batch_size",
                                          "lr",    "max_outer", "tol",   "gtol",            "max_sigma_iters",
                                          "sigma_solver", "sigma_floor", "model", "arch"};

const std::map<std::string, std::vector<std::string>>& specific() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"train", {"data", "response", "scale", "beta", "method"}},
      {"benchmark", {"phi", "delta", "reps", "methods", "betas", "n", "sigma"}},
      {"influence", {"preset", "beta", "i", "tgrid", "x", "m_values"}},
      {"breakdown", {"phi", "data", "response", "scale", "deltas", "magnitudes", "betas"}},
      {"cv", {"data", "response", "scale", "k", "methods", "betas", "trim"}},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& RunConfig::subcommands() {
  static const std::vector<std::string> s = {"train", "benchmark", "influence", "breakdown", "cv"};
  return s;
}

std::vector<std::string> RunConfig::allowed_keys(const std::string& sub) {
  const auto it = specific().find(sub);
  if (it == specific().end()) throw InvalidArgument("unknown subcommand '" + sub + "'");
  std::vector<std::string> keys = kCommon;
  keys.insert(keys.end(), it->second.begin(), it->second.end());
  std::sort(keys.begin(), keys.end());
  return keys;
}

RunConfig::RunConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {
  allowed_keys(subcommand_);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto keys = allowed_keys(subcommand_);
  if (!std::binary_search(keys.begin(), keys.end(), key))
    throw InvalidArgument("unknown key '" + key + "' for subcommand " + subcommand_);
  values_[key] = value;
}

void RunConfig::merge_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, row, 1, "expected 'key = value'");
    const std::string key{trim(body.substr(0, eq))};
    if (key.empty()) throw ParseError(source, row, 1, "empty key");
    try {
      set(key, std::string(trim(body.substr(eq + 1))));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, row, 1, e.what());
    }
  }
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  merge_text(ss.str(), path);
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto v = parse_double(it->second);
  if (!v) throw InvalidArgument(key + ": '" + it->second + "' is not a number");
  return *v;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto v = parse_int<std::uint64_t>(it->second);
  if (!v) throw InvalidArgument(key + ": '" + it->second + "' is not a non-negative integer");
  return *v;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

std::vector<double> RunConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) {
    const auto v = parse_double(item);
    if (!v) throw InvalidArgument(key + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> RunConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : split_list(it->second);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace rrnet
