#include "webqa/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "webqa/error.hpp"

namespace webqa {

using json = nlohmann::json;

namespace {

double entropy(std::size_t pos, std::size_t n) {
  if (n == 0 || pos == 0 || pos == n)
    return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(n);
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double laplace(std::size_t pos, std::size_t n) {
  return (static_cast<double>(pos) + 1.0) / (static_cast<double>(n) + 2.0);
}

// Log-likelihood of a node's own cases under its smoothed estimate.
double node_log_likelihood(std::size_t pos, std::size_t n) {
  double p = laplace(pos, n);
  return static_cast<double>(pos) * std::log(p) +
         static_cast<double>(n - pos) * std::log(1.0 - p);
}

const char *kind_name(feature_kind k) {
  return k == feature_kind::numeric ? "numeric" : "categorical";
}

feature_kind kind_of(const feature_value &v) {
  return std::holds_alternative<double>(v) ? feature_kind::numeric
                                           : feature_kind::categorical;
}

struct split_choice {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::string category;
  std::size_t left_pos = 0, left_n = 0;
};

class builder {
public:
  builder(const std::vector<training_case> &cases, const feature_schema &schema,
          const tree_config &cfg)
      : cases_(cases), schema_(schema), cfg_(cfg) {}

  std::vector<tree_node> run() {
    std::vector<std::size_t> all(cases_.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = i;
    grow(all, 0);
    return std::move(nodes_);
  }

private:
  std::size_t grow(const std::vector<std::size_t> &idx, std::size_t depth) {
    std::size_t pos = 0;
    for (auto i : idx)
      pos += cases_[i].label ? 1 : 0;
    const std::size_t n = idx.size();

    std::size_t id = nodes_.size();
    nodes_.emplace_back();
    nodes_[id].support = n;
    nodes_[id].positives = pos;
    nodes_[id].probability = laplace(pos, n);

    if (n < cfg_.min_leaf || depth >= cfg_.max_depth || pos == 0 || pos == n)
      return id;

    auto best = best_split(idx, pos);
    if (!best.found || best.gain < cfg_.min_gain)
      return id;
    const std::size_t rpos = pos - best.left_pos, rn = n - best.left_n;
    if (node_log_likelihood(best.left_pos, best.left_n) +
            node_log_likelihood(rpos, rn) <
        node_log_likelihood(pos, n))
      return id;

    const auto &spec = schema_[best.feature];
    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      const auto &v = cases_[i].features.at(spec.name);
      bool go_left = spec.kind == feature_kind::numeric
                         ? std::get<double>(v) <= best.threshold
                         : std::get<std::string>(v) == best.category;
      (go_left ? left : right).push_back(i);
    }

    nodes_[id].leaf = false;
    nodes_[id].feature = spec.name;
    nodes_[id].kind = spec.kind;
    nodes_[id].threshold = best.threshold;
    nodes_[id].category = best.category;
    auto l = grow(left, depth + 1);
    auto r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  split_choice best_split(const std::vector<std::size_t> &idx,
                          std::size_t pos) const {
    const std::size_t n = idx.size();
    const double parent = entropy(pos, n);
    split_choice best;
    auto consider = [&](std::size_t f, std::size_t lpos, std::size_t ln,
                        double threshold, const std::string &category) {
      if (ln == 0 || ln == n)
        return;
      double wl = static_cast<double>(ln) / static_cast<double>(n);
      double gain = parent - wl * entropy(lpos, ln) -
                    (1.0 - wl) * entropy(pos - lpos, n - ln);
      if (!best.found || gain > best.gain) {
        best.found = true;
        best.gain = gain;
        best.feature = f;
        best.threshold = threshold;
        best.category = category;
        best.left_pos = lpos;
        best.left_n = ln;
      }
    };

    for (std::size_t f = 0; f < schema_.size(); ++f) {
      const auto &spec = schema_[f];
      if (spec.kind == feature_kind::numeric) {
        std::vector<std::pair<double, bool>> vals;
        vals.reserve(n);
        for (auto i : idx)
          vals.emplace_back(std::get<double>(cases_[i].features.at(spec.name)),
                            cases_[i].label);
        std::sort(vals.begin(), vals.end());
        std::size_t lpos = 0;
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
          lpos += vals[k].second ? 1 : 0;
          double a = vals[k].first, b = vals[k + 1].first;
          if (a == b)
            continue;
          double t = a + (b - a) / 2.0;
          if (!(t < b))
            t = a;
          consider(f, lpos, k + 1, t, {});
        }
      } else {
        std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
        for (auto i : idx) {
          auto &c = counts[std::get<std::string>(cases_[i].features.at(spec.name))];
          c.first += cases_[i].label ? 1 : 0;
          ++c.second;
        }
        for (const auto &[cat, c] : counts)
          consider(f, c.first, c.second, 0.0, cat);
      }
    }
    return best;
  }

  const std::vector<training_case> &cases_;
  const feature_schema &schema_;
  const tree_config &cfg_;
  std::vector<tree_node> nodes_;
};

} // namespace

feature_schema schema_of(const feature_vector &fv) {
  feature_schema s;
  for (const auto &[name, v] : fv)
    s.push_back(feature_spec{name, kind_of(v)});
  return s;
}

decision_tree::decision_tree(feature_schema schema, std::vector<tree_node> nodes)
    : schema_(std::move(schema)), nodes_(std::move(nodes)) {
  if (nodes_.empty())
    throw model_format_error("a tree needs at least one node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto &nd = nodes_[i];
    if (!nd.leaf && (nd.left <= i || nd.right <= i || nd.left >= nodes_.size() ||
                     nd.right >= nodes_.size()))
      throw model_format_error("tree node " + std::to_string(i) +
                               " has invalid children");
    if (nd.leaf && !(nd.probability > 0.0 && nd.probability < 1.0))
      throw model_format_error("leaf probability outside (0,1)");
  }
}

std::size_t decision_tree::leaf_index(const feature_vector &fv) const {
  std::size_t i = 0;
  while (!nodes_.at(i).leaf) {
    const auto &nd = nodes_[i];
    auto it = fv.find(nd.feature);
    if (it == fv.end())
      throw missing_feature("missing feature '" + nd.feature + "'");
    if (kind_of(it->second) != nd.kind)
      throw schema_mismatch("feature '" + nd.feature + "' should be " +
                            kind_name(nd.kind));
    bool go_left = nd.kind == feature_kind::numeric
                       ? std::get<double>(it->second) <= nd.threshold
                       : std::get<std::string>(it->second) == nd.category;
    i = go_left ? nd.left : nd.right;
  }
  return i;
}

double decision_tree::predict(const feature_vector &fv) const {
  return nodes_[leaf_index(fv)].probability;
}

std::size_t decision_tree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].leaf) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

std::size_t decision_tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const tree_node &n) { return n.leaf; }));
}

json decision_tree::to_json() const {
  json j;
  j["format"] = "webqa-tree";
  j["version"] = 1;
  auto &schema = j["schema"] = json::array();
  for (const auto &s : schema_)
    schema.push_back({{"name", s.name}, {"kind", kind_name(s.kind)}});
  auto &nodes = j["nodes"] = json::array();
  for (const auto &n : nodes_) {
    json o{{"support", n.support}, {"positives", n.positives}};
    if (n.leaf) {
      o["leaf"] = true;
      o["probability"] = n.probability;
    } else {
      o["leaf"] = false;
      o["feature"] = n.feature;
      o["kind"] = kind_name(n.kind);
      if (n.kind == feature_kind::numeric)
        o["threshold"] = n.threshold;
      else
        o["category"] = n.category;
      o["left"] = n.left;
      o["right"] = n.right;
      o["probability"] = n.probability;
    }
    nodes.push_back(std::move(o));
  }
  return j;
}

decision_tree decision_tree::from_json(const json &j) {
  try {
    if (j.at("format") != "webqa-tree")
      throw model_format_error("not a tree model");
    feature_schema schema;
    for (const auto &s : j.at("schema")) {
      auto kind = s.at("kind").get<std::string>();
      if (kind != "numeric" && kind != "categorical")
        throw model_format_error("unknown feature kind " + kind);
      schema.push_back({s.at("name").get<std::string>(),
                        kind == "numeric" ? feature_kind::numeric
                                          : feature_kind::categorical});
    }
    std::vector<tree_node> nodes;
    for (const auto &o : j.at("nodes")) {
      tree_node n;
      n.leaf = o.at("leaf").get<bool>();
      n.support = o.at("support").get<std::size_t>();
      n.positives = o.at("positives").get<std::size_t>();
      n.probability = o.at("probability").get<double>();
      if (!n.leaf) {
        n.feature = o.at("feature").get<std::string>();
        n.kind = o.at("kind") == "numeric" ? feature_kind::numeric
                                           : feature_kind::categorical;
        if (n.kind == feature_kind::numeric)
          n.threshold = o.at("threshold").get<double>();
        else
          n.category = o.at("category").get<std::string>();
        n.left = o.at("left").get<std::size_t>();
        n.right = o.at("right").get<std::size_t>();
      }
      nodes.push_back(std::move(n));
    }
    return decision_tree(std::move(schema), std::move(nodes));
  } catch (const json::exception &e) {
    throw model_format_error(std::string("malformed tree: ") + e.what());
  }
}

void decision_tree::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out)
    throw error("cannot write model: " + path);
  out << to_json().dump(2) << '\n';
}

decision_tree decision_tree::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw model_format_error("cannot open model: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw model_format_error("malformed model " + path + ": " + e.what());
  }
  return from_json(j);
}

void decision_tree::print(std::ostream &os) const {
  struct frame {
    std::size_t node;
    std::size_t indent;
    std::string label;
  };
  std::vector<frame> stack{{0, 0, ""}};
  while (!stack.empty()) {
    auto f = stack.back();
    stack.pop_back();
    const auto &n = nodes_[f.node];
    os << std::string(f.indent * 2, ' ') << f.label;
    if (n.leaf) {
      os << "p=" << n.probability << " (n=" << n.support << ")\n";
      continue;
    }
    os << n.feature << " (n=" << n.support << ")\n";
    std::string yes, no;
    if (n.kind == feature_kind::numeric) {
      yes = "<= " + std::to_string(n.threshold) + ": ";
      no = "> " + std::to_string(n.threshold) + ": ";
    } else {
      yes = "= " + n.category + ": ";
      no = "!= " + n.category + ": ";
    }
    stack.push_back({n.right, f.indent + 1, no});
    stack.push_back({n.left, f.indent + 1, yes});
  }
}

decision_tree train_tree(const std::vector<training_case> &cases,
                         const tree_config &cfg) {
  if (cases.empty())
    throw no_training_data("cannot train a tree without cases");
  auto schema = schema_of(cases.front().features);
  for (std::size_t i = 1; i < cases.size(); ++i)
    if (schema_of(cases[i].features) != schema)
      throw schema_mismatch("training case " + std::to_string(i) +
                            " has a different feature schema");
  auto nodes = builder(cases, schema, cfg).run();
  return decision_tree(std::move(schema), std::move(nodes));
}

double log_likelihood(const decision_tree &tree,
                      const std::vector<training_case> &cases) {
  double ll = 0.0;
  for (const auto &c : cases) {
    double p = tree.predict(c.features);
    ll += std::log(c.label ? p : 1.0 - p);
  }
  return ll;
}

json to_json(const feature_vector &fv) {
  json j = json::object();
  for (const auto &[name, v] : fv) {
    if (std::holds_alternative<double>(v))
      j[name] = std::get<double>(v);
    else
      j[name] = std::get<std::string>(v);
  }
  return j;
}

feature_vector feature_vector_from_json(const json &j) {
  if (!j.is_object())
    throw schema_mismatch("feature vector must be a JSON object");
  feature_vector fv;
  for (const auto &[name, v] : j.items()) {
    if (v.is_number())
      fv[name] = v.get<double>();
    else if (v.is_string())
      fv[name] = v.get<std::string>();
    else
      throw schema_mismatch("feature '" + name + "' must be a number or string");
  }
  return fv;
}

} // namespace webqa
