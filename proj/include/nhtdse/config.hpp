#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhtdse/linalg.hpp"

namespace nhtdse {

/// Bad config file, bad override, or a value outside its allowed range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a TOML file into a JSON tree (tables become objects). Dates and
/// times are rejected.
nlohmann::json load_config(const std::filesystem::path& path);
nlohmann::json parse_config_text(std::string_view text, std::string_view source = "config");

/// `key.path=value`; the value is read as a TOML literal, or as a bare string
/// if it is not one. Numeric path parts index arrays.
void apply_override(nlohmann::json& config, std::string_view assignment);

/// FNV-1a over a canonical dump: sorted keys, numbers as doubles, the output
/// directory left out, the seed kept exact.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hash_hex(std::uint64_t h);

/// Typed access to one JSON object that remembers which keys were read.
/// Keys never read are reported by `unread_keys` on the root.
class ConfigNode {
 public:
  explicit ConfigNode(const nlohmann::json& root);

  bool has(std::string_view key) const;
  std::string path_of(std::string_view key) const;

  ConfigNode section(std::string_view key) const;
  std::optional<ConfigNode> optional_section(std::string_view key) const;
  std::vector<ConfigNode> table_array(std::string_view key) const;

  double number(std::string_view key) const;
  std::optional<double> optional_number(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  std::optional<std::int64_t> optional_integer(std::string_view key) const;
  std::string string(std::string_view key) const;
  std::optional<std::string> optional_string(std::string_view key) const;
  std::optional<bool> optional_boolean(std::string_view key) const;
  std::vector<std::string> string_list(std::string_view key) const;

  /// A complex number is a plain number or an [re, im] pair.
  cplx complex(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  /// A list of reals, or one real repeated `count` times.
  std::vector<double> reals_or_scalar(std::string_view key, std::size_t count) const;
  Vector complex_vector(std::string_view key) const;
  /// A list of complex numbers, or one repeated `count` times.
  Vector complex_vector_or_scalar(std::string_view key, std::size_t count) const;
  Matrix matrix(std::string_view key) const;

  /// A sub-table of plain numbers, e.g. free-form trace parameters.
  std::vector<std::pair<std::string, double>> number_table(std::string_view key) const;

  /// Dotted paths of keys in the whole tree that were never read.
  std::vector<std::string> unread_keys() const;

 private:
  ConfigNode(const nlohmann::json* node, const nlohmann::json* root, std::string path,
             std::shared_ptr<std::set<std::string>> used);
  const nlohmann::json& get(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, std::string_view what) const;

  const nlohmann::json* node_;
  std::string path_;
  std::shared_ptr<std::set<std::string>> used_;
  const nlohmann::json* root_;
};

}  // namespace nhtdse
