#include "nhtdse/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

namespace nhtdse {

using nlohmann::json;

namespace {

json from_toml(const toml::node& node, const std::string& where) {
  if (auto t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      out[key] = from_toml(v, where.empty() ? key : where + "." + key);
    }
    return out;
  }
  if (auto a = node.as_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < a->size(); ++i) out.push_back(from_toml((*a)[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  throw ConfigError(where + ": dates and times are not supported");
}

std::string describe(const toml::parse_error& e) {
  std::ostringstream os;
  os << e.source().begin << ": " << e.description();
  return os.str();
}

// Numbers as doubles so `1` and `1.0` hash alike.
json canonical(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = canonical(v);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(canonical(v));
    return out;
  }
  if (j.is_number()) return j.get<double>();
  return j;
}

bool parse_index(std::string_view part, std::size_t& index) {
  if (part.empty()) return false;
  const auto res = std::from_chars(part.data(), part.data() + part.size(), index);
  return res.ec == std::errc() && res.ptr == part.data() + part.size();
}

cplx complex_value(const json& j, bool& ok) {
  ok = true;
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  ok = false;
  return {};
}

}  // namespace

json parse_config_text(std::string_view text, std::string_view source) {
  toml::table table;
  try {
    table = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(describe(e));
  }
  return from_toml(table, "");
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void apply_override(json& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json value;
  try {
    const toml::table t = toml::parse("v = " + text);
    value = from_toml(*t.get("v"), key);
  } catch (const toml::parse_error&) {
    value = text;  // bare word
  }

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("empty component in override key " + key);
    const bool leaf = dot == std::string::npos;
    std::size_t index = 0;
    if (node->is_array() && parse_index(part, index)) {
      if (index >= node->size()) throw ConfigError("override index out of range in " + key);
      node = &(*node)[index];
    } else {
      if (!node->is_object()) throw ConfigError("override path " + key + " runs through a non-table value");
      if (leaf) {
        (*node)[part] = value;
        return;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
    }
    if (leaf) {
      *node = value;
      return;
    }
    start = dot + 1;
  }
}

std::uint64_t config_hash(const json& config) {
  json c = config;
  std::string seed = "none";
  if (c.is_object()) {
    if (c.contains("output") && c["output"].is_object()) c["output"].erase("dir");
    if (c.contains("seed")) {
      seed = c["seed"].dump();
      c.erase("seed");
    }
  }
  const std::string text = canonical(c).dump() + "|seed=" + seed;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConfigNode::ConfigNode(const json& root)
    : ConfigNode(&root, &root, "", std::make_shared<std::set<std::string>>()) {
  if (!root.is_object()) throw ConfigError("config root must be a table");
}

ConfigNode::ConfigNode(const json* node, const json* root, std::string path,
                       std::shared_ptr<std::set<std::string>> used)
    : node_(node), path_(std::move(path)), used_(std::move(used)), root_(root) {}

std::string ConfigNode::path_of(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

bool ConfigNode::has(std::string_view key) const { return node_->contains(std::string(key)); }

void ConfigNode::fail(std::string_view key, std::string_view what) const {
  throw ConfigError(path_of(key) + ": " + std::string(what));
}

const json& ConfigNode::get(std::string_view key) const {
  const std::string k(key);
  if (!node_->contains(k)) fail(key, "missing required key");
  used_->insert(path_of(key));
  return (*node_)[k];
}

ConfigNode ConfigNode::section(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_object()) fail(key, "must be a table");
  return ConfigNode(&j, root_, path_of(key), used_);
}

std::optional<ConfigNode> ConfigNode::optional_section(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return section(key);
}

std::vector<ConfigNode> ConfigNode::table_array(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_array() || j.empty()) fail(key, "must be a non-empty array of tables");
  std::vector<ConfigNode> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path_of(key) + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) throw ConfigError(p + ": must be a table");
    used_->insert(p);
    out.push_back(ConfigNode(&j[i], root_, p, used_));
  }
  return out;
}

double ConfigNode::number(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_number()) fail(key, "must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

std::optional<double> ConfigNode::optional_number(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::int64_t ConfigNode::integer(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_number_integer()) fail(key, "must be an integer");
  return j.get<std::int64_t>();
}

std::optional<std::int64_t> ConfigNode::optional_integer(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

std::string ConfigNode::string(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_string()) fail(key, "must be a string");
  return j.get<std::string>();
}

std::optional<std::string> ConfigNode::optional_string(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return string(key);
}

std::optional<bool> ConfigNode::optional_boolean(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  const json& j = get(key);
  if (!j.is_boolean()) fail(key, "must be true or false");
  return j.get<bool>();
}

std::vector<std::string> ConfigNode::string_list(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_array()) fail(key, "must be a list of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) fail(key, "must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

cplx ConfigNode::complex(std::string_view key) const {
  bool ok = false;
  const cplx z = complex_value(get(key), ok);
  if (!ok) fail(key, "must be a number or an [re, im] pair");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(key, "must be finite");
  return z;
}

std::vector<double> ConfigNode::reals(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_array() || j.empty()) fail(key, "must be a non-empty list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(key, "must be a non-empty list of numbers");
    out.push_back(v.get<double>());
    if (!std::isfinite(out.back())) fail(key, "entries must be finite");
  }
  return out;
}

std::vector<double> ConfigNode::reals_or_scalar(std::string_view key, std::size_t count) const {
  const json& j = get(key);
  if (j.is_number()) return std::vector<double>(count, number(key));
  std::vector<double> out = reals(key);
  if (out.size() != count) fail(key, "must have " + std::to_string(count) + " entries");
  return out;
}

Vector ConfigNode::complex_vector(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_array() || j.empty()) fail(key, "must be a non-empty list of numbers or [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    bool ok = false;
    v(static_cast<Eigen::Index>(i)) = complex_value(j[i], ok);
    if (!ok) fail(key, "entry " + std::to_string(i) + " must be a number or an [re, im] pair");
  }
  if (!v.allFinite()) fail(key, "entries must be finite");
  return v;
}

Vector ConfigNode::complex_vector_or_scalar(std::string_view key, std::size_t count) const {
  bool ok = false;
  const cplx z = complex_value(get(key), ok);
  if (ok && !get(key).is_array()) return Vector::Constant(static_cast<Eigen::Index>(count), z);
  Vector v = complex_vector(key);
  if (static_cast<std::size_t>(v.size()) != count) fail(key, "must have " + std::to_string(count) + " entries");
  return v;
}

Matrix ConfigNode::matrix(std::string_view key) const {
  const json& j = get(key);
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(key, "must be a list of rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(key, "rows must all have the same length");
    for (std::size_t c = 0; c < cols; ++c) {
      bool ok = false;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_value(j[r][c], ok);
      if (!ok) fail(key, "entries must be numbers or [re, im] pairs");
    }
  }
  if (!m.allFinite()) fail(key, "entries must be finite");
  return m;
}

std::vector<std::pair<std::string, double>> ConfigNode::number_table(std::string_view key) const {
  const ConfigNode t = section(key);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [k, v] : t.node_->items()) out.emplace_back(k, t.number(k));
  return out;
}

std::vector<std::string> ConfigNode::unread_keys() const {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const json& j, const std::string& path) -> void {
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) {
        const std::string p = path.empty() ? k : path + "." + k;
        if (!used_->count(p)) {
          out.push_back(p);
          continue;
        }
        self(self, v, p);
      }
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (j[i].is_object() && used_->count(p)) self(self, j[i], p);
      }
    }
  };
  walk(walk, *root_, "");
  return out;
}

}  // namespace nhtdse
