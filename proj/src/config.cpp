#include "webqa/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "webqa/error.hpp"

namespace webqa {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_keys(const json &obj, const std::string &where,
                const std::set<std::string> &allowed) {
  if (!obj.is_object())
    throw config_error(where + " must be an object");
  for (const auto &[key, _] : obj.items())
    if (!allowed.count(key))
      throw config_error("unknown key '" + key + "' in " + where);
}

template <class T> T get(const json &obj, const std::string &key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw config_error("bad value for '" + key + "': " + e.what());
  }
}

std::string resolve(const std::string &base, const std::string &p) {
  fs::path path(p);
  if (path.is_absolute() || base.empty())
    return p;
  return (fs::path(base) / path).lexically_normal().string();
}

} // namespace

void app_config::require_backend() const {
  int count = (corpus ? 1 : 0) + (index ? 1 : 0) + (remote.endpoint.empty() ? 0 : 1);
  if (count == 0)
    throw config_error("no search backend configured (corpus, index or endpoint)");
  if (count > 1)
    throw config_error("configure exactly one search backend");
}

void app_config::validate() const {
  prefs.validate();
  if (thresholds.empty())
    throw config_error("threshold set is empty");
  for (int t : thresholds)
    if (t < 1)
      throw config_error("thresholds must be positive");
  if (!(rewrites.phrasal_weight > 0) || !(rewrites.conjunctive_weight > 0))
    throw config_error("rewrite weights must be positive");
  if (limit == 0)
    throw config_error("limit must be positive");
  if (probe_size == 0)
    throw config_error("probe_size must be positive");
}

app_config parse_config(const json &j, const std::string &base_dir) {
  app_config c;
  check_keys(j, "config",
             {"backend", "rewrite", "search", "stoplist", "filters", "tree", "thresholds",
              "preferences", "probe_size", "seed", "jobs", "models"});
  if (j.contains("backend")) {
    const auto &b = j["backend"];
    check_keys(b, "backend",
               {"corpus", "index", "endpoint", "token", "query_param", "limit_param",
                "results_field", "summary_field", "attempts", "backoff_ms", "timeout_ms",
                "max_in_flight"});
    if (b.contains("corpus"))
      c.corpus = resolve(base_dir, get<std::string>(b, "corpus"));
    if (b.contains("index"))
      c.index = resolve(base_dir, get<std::string>(b, "index"));
    if (b.contains("endpoint"))
      c.remote.endpoint = get<std::string>(b, "endpoint");
    if (b.contains("token"))
      c.remote.bearer_token = get<std::string>(b, "token");
    if (b.contains("query_param"))
      c.remote.query_param = get<std::string>(b, "query_param");
    if (b.contains("limit_param"))
      c.remote.limit_param = get<std::string>(b, "limit_param");
    if (b.contains("results_field"))
      c.remote.results_field = get<std::string>(b, "results_field");
    if (b.contains("summary_field"))
      c.remote.summary_field = get<std::string>(b, "summary_field");
    if (b.contains("attempts"))
      c.remote.attempts = get<int>(b, "attempts");
    if (b.contains("backoff_ms"))
      c.remote.initial_backoff = std::chrono::milliseconds(get<long>(b, "backoff_ms"));
    if (b.contains("timeout_ms"))
      c.remote.timeout = std::chrono::milliseconds(get<long>(b, "timeout_ms"));
    if (b.contains("max_in_flight"))
      c.remote.max_in_flight = get<std::size_t>(b, "max_in_flight");
  }
  if (j.contains("rewrite")) {
    const auto &r = j["rewrite"];
    check_keys(r, "rewrite", {"phrasal_weight", "conjunctive_weight", "max_phrasal"});
    if (r.contains("phrasal_weight"))
      c.rewrites.phrasal_weight = get<double>(r, "phrasal_weight");
    if (r.contains("conjunctive_weight"))
      c.rewrites.conjunctive_weight = get<double>(r, "conjunctive_weight");
    if (r.contains("max_phrasal"))
      c.rewrites.max_phrasal = get<std::size_t>(r, "max_phrasal");
  }
  if (j.contains("search")) {
    const auto &s = j["search"];
    check_keys(s, "search", {"window", "limit"});
    if (s.contains("window"))
      c.window = get<std::size_t>(s, "window");
    if (s.contains("limit"))
      c.limit = get<std::size_t>(s, "limit");
  }
  if (j.contains("stoplist"))
    c.stoplist_path = resolve(base_dir, get<std::string>(j, "stoplist"));
  if (j.contains("filters"))
    c.filters_path = resolve(base_dir, get<std::string>(j, "filters"));
  if (j.contains("tree")) {
    const auto &t = j["tree"];
    check_keys(t, "tree", {"min_gain", "min_leaf", "max_depth"});
    if (t.contains("min_gain"))
      c.tree.min_gain = get<double>(t, "min_gain");
    if (t.contains("min_leaf"))
      c.tree.min_leaf = get<std::size_t>(t, "min_leaf");
    if (t.contains("max_depth"))
      c.tree.max_depth = get<std::size_t>(t, "max_depth");
  }
  if (j.contains("thresholds"))
    c.thresholds = get<std::vector<int>>(j, "thresholds");
  if (j.contains("preferences")) {
    const auto &p = j["preferences"];
    check_keys(p, "preferences", {"k", "c"});
    if (p.contains("k"))
      c.prefs.k = get<double>(p, "k");
    if (p.contains("c"))
      c.prefs.c = get<double>(p, "c");
  }
  if (j.contains("probe_size"))
    c.probe_size = get<std::size_t>(j, "probe_size");
  if (j.contains("seed"))
    c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("jobs"))
    c.jobs = get<std::size_t>(j, "jobs");
  if (j.contains("models")) {
    const auto &m = j["models"];
    check_keys(m, "models", {"conj", "phrasal", "ensemble"});
    if (m.contains("conj"))
      c.conj_model = resolve(base_dir, get<std::string>(m, "conj"));
    if (m.contains("phrasal"))
      c.phrasal_model = resolve(base_dir, get<std::string>(m, "phrasal"));
    if (m.contains("ensemble"))
      c.ensemble_model = resolve(base_dir, get<std::string>(m, "ensemble"));
  }
  c.validate();
  return c;
}

app_config load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw config_error(path + ": " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string());
}

std::vector<int> parse_int_list(const std::string &csv) {
  std::vector<int> out;
  for (double d : parse_double_list(csv)) {
    if (d != static_cast<int>(d))
      throw config_error("expected integers in '" + csv + "'");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string &csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception &) {
      throw config_error("bad number '" + item + "' in '" + csv + "'");
    }
  }
  if (out.empty())
    throw config_error("empty list");
  return out;
}

} // namespace webqa
