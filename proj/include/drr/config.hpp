#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace drr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plain nested key-value tree:
//   key = value
//   section {
//     key = value
//   }
// '#' starts a comment; keys are [A-Za-z_][A-Za-z0-9_]*.
struct ConfigNode {
  std::map<std::string, std::string> values;
  std::map<std::string, ConfigNode> children;
  std::map<std::string, int> lines;  // key -> source line (diagnostics)
};

ConfigNode parse_config_text(const std::string& text);
ConfigNode parse_config_file(const std::string& path);

// Typed reads with consumption tracking; after reading, unconsumed() names
// every key the schema never touched (strict unknown-key rejection).
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigNode& root) : root_(&root) {}

  bool has(const std::string& path) const;
  std::optional<std::string> raw(const std::string& path);

  std::string get_string(const std::string& path, const std::string& fallback);
  std::string require_string(const std::string& path);
  double get_double(const std::string& path, double fallback);
  double require_double(const std::string& path);
  int get_int(const std::string& path, int fallback);
  std::uint64_t get_u64(const std::string& path, std::uint64_t fallback);
  bool get_bool(const std::string& path, bool fallback);
  std::vector<std::string> get_list(const std::string& path);  // comma separated

  std::vector<std::string> unconsumed() const;  // dotted paths of untouched keys

 private:
  const ConfigNode* root_;
  std::set<std::string> consumed_;
  const std::string* find(const std::string& path) const;
};

}  // namespace drr
