#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace topoplasma {

inline constexpr const char* kVersion = "0.1.0";

// Flat key/value configuration. Keys are "section.name"; the text form groups them
// under [section] headers.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);
  std::string serialize() const;

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  void erase(const std::string& key);
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  bool operator==(const Config& o) const { return kv_ == o.kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

enum class OutputFormat { Csv, Json };

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
  OutputFormat format = OutputFormat::Csv;
  bool write = true;
};

struct RunResult {
  std::string run_id;
  std::filesystem::path dir;
  nlohmann::json summary;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

const std::vector<std::string>& commands();
// Defaults for every key a command reads.
Config default_config(const std::string& command);
// Defaults, then `file`, then `overrides`; expands profile presets into explicit keys.
Config effective_config(const std::string& command, const Config& file, const Config& overrides);
std::string run_id(const std::string& command, const Config& cfg);
RunResult run_command(const std::string& command, const Config& cfg, const RunOptions& opt);

}  // namespace topoplasma
