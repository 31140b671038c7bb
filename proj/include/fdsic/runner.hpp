#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdsic/experiments.hpp"

namespace fdsic {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plain-text key/value configuration with optional [section] prefixes;
// physical quantities carry their unit in the key name.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string canonical() const;  // sorted key=value lines, used for hashing

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a_hash(const std::string& text);

// Deterministic CSV emission: fixed-format floats, one metadata sidecar per
// file recording the seed, config hash and code version.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buffer_;
  std::size_t n_cols_ = 0;
  bool closed_ = false;
};

std::string fmt(double value, int precision = 4);
std::string fmt_int(long long value);

struct RunOptions {
  std::uint64_t seed = 1;
  int trials = 500;
  int workers = 0;  // 0: hardware concurrency
  std::string out_dir = ".";
  KeyValueConfig config;  // raw config for overrides and the meta sidecar
};

// Executes one named experiment (fig3 fig4 fig5a fig5b fig6 fig7a..c
// fig8a..c table1 residual_sweep dump_channel) and returns the files written.
std::vector<std::string> run_experiment(const std::string& name, const RunOptions& opts);

std::vector<std::string> known_experiments();

}  // namespace fdsic
