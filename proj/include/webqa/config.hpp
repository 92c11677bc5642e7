#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "webqa/control.hpp"
#include "webqa/remote.hpp"
#include "webqa/tree.hpp"

namespace webqa {

/// Settings shared by the CLI subcommands. Loaded from a JSON file; relative
/// paths in the file are resolved against the file's directory. Command-line
/// flags override file values, which override the defaults below.
struct app_config {
  // backend: exactly one of corpus / index / remote.endpoint
  std::optional<std::string> corpus;
  std::optional<std::string> index;
  remote_options remote;

  rewrite_config rewrites;
  std::size_t window = default_window;
  std::size_t limit = default_limit;
  std::optional<std::string> stoplist_path;
  std::optional<std::string> filters_path;
  tree_config tree;
  std::vector<int> thresholds = default_thresholds();
  preferences prefs;
  std::size_t probe_size = 2;
  std::uint64_t seed = 0;
  std::size_t jobs = 0; // 0: machine parallelism

  std::optional<std::string> conj_model;
  std::optional<std::string> phrasal_model;
  std::optional<std::string> ensemble_model;

  /// Throws config_error on an invalid combination (no or several
  /// backends, non-positive k/c, empty threshold set, ...).
  void validate() const;
  void require_backend() const;
};

/// Throws config_error for unknown keys, wrong types or unreadable files.
app_config parse_config(const nlohmann::json &j, const std::string &base_dir = ".");
app_config load_config(const std::string &path);

std::vector<int> parse_int_list(const std::string &csv);
std::vector<double> parse_double_list(const std::string &csv);

} // namespace webqa
