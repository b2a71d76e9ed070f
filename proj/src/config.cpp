#include "drr/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drr {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

ConfigNode parse_config_text(const std::string& text) {
  ConfigNode root;
  std::vector<ConfigNode*> stack{&root};
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line == "}") {
      if (stack.size() == 1)
        throw ConfigError("config line " + std::to_string(lineno) + ": unmatched '}'");
      stack.pop_back();
      continue;
    }
    if (line.size() >= 2 && line.back() == '{') {
      const std::string key = strip(line.substr(0, line.size() - 1));
      if (!valid_key(key))
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section name '" +
                          key + "'");
      ConfigNode& parent = *stack.back();
      if (parent.children.count(key) || parent.values.count(key))
        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                          key + "'");
      parent.lines[key] = lineno;
      stack.push_back(&parent.children[key]);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', 'key {' or '}'");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    if (value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" +
                        key + "'");
    ConfigNode& parent = *stack.back();
    if (parent.children.count(key) || parent.values.count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                        "'");
    parent.values[key] = value;
    parent.lines[key] = lineno;
  }
  if (stack.size() != 1) throw ConfigError("config: unclosed '{'");
  return root;
}

ConfigNode parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

const std::string* ConfigReader::find(const std::string& path) const {
  const ConfigNode* node = root_;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (dot == std::string::npos) {
      const auto it = node->values.find(part);
      return it == node->values.end() ? nullptr : &it->second;
    }
    const auto it = node->children.find(part);
    if (it == node->children.end()) return nullptr;
    node = &it->second;
    start = dot + 1;
  }
}

bool ConfigReader::has(const std::string& path) const { return find(path) != nullptr; }

std::optional<std::string> ConfigReader::raw(const std::string& path) {
  const std::string* v = find(path);
  if (!v) return std::nullopt;
  consumed_.insert(path);
  return *v;
}

std::string ConfigReader::get_string(const std::string& path, const std::string& fallback) {
  auto v = raw(path);
  return v ? *v : fallback;
}

std::string ConfigReader::require_string(const std::string& path) {
  auto v = raw(path);
  if (!v) throw ConfigError("config: missing required key '" + path + "'");
  return *v;
}

double ConfigReader::require_double(const std::string& path) {
  const std::string s = require_string(path);
  try {
    std::size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + path + "' is not a number: '" + s + "'");
  }
}

double ConfigReader::get_double(const std::string& path, double fallback) {
  return has(path) ? require_double(path) : fallback;
}

int ConfigReader::get_int(const std::string& path, int fallback) {
  if (!has(path)) return fallback;
  const double d = require_double(path);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("config: key '" + path + "' must be an integer");
  return i;
}

std::uint64_t ConfigReader::get_u64(const std::string& path, std::uint64_t fallback) {
  if (!has(path)) return fallback;
  const std::string s = require_string(path);
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + path + "' is not a nonnegative integer: '" + s + "'");
  }
}

bool ConfigReader::get_bool(const std::string& path, bool fallback) {
  if (!has(path)) return fallback;
  const std::string s = require_string(path);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: key '" + path + "' must be a boolean, got '" + s + "'");
}

std::vector<std::string> ConfigReader::get_list(const std::string& path) {
  std::vector<std::string> out;
  auto v = raw(path);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

namespace {

void collect(const ConfigNode& node, const std::string& prefix,
             const std::set<std::string>& consumed, std::vector<std::string>& out) {
  for (const auto& [k, v] : node.values) {
    const std::string path = prefix.empty() ? k : prefix + "." + k;
    if (!consumed.count(path)) out.push_back(path);
  }
  for (const auto& [k, child] : node.children)
    collect(child, prefix.empty() ? k : prefix + "." + k, consumed, out);
}

}  // namespace

std::vector<std::string> ConfigReader::unconsumed() const {
  std::vector<std::string> out;
  collect(*root_, "", consumed_, out);
  return out;
}

}  // namespace drr
