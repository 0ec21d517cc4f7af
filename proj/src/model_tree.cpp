#include "gradecast/model_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gradecast/error.hpp"

namespace gradecast {

namespace {

double row_sd(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<double> t;
  t.reserve(rows.size());
  for (auto r : rows) t.push_back(d.samples()[r].target);
  return standard_deviation(t);
}

// Preference between two qualifying candidates under the documented order.
bool preferred(const SplitCandidate& a, const SplitCandidate& b, double tolerance) {
  if (a.gain > b.gain + tolerance) return true;
  if (b.gain > a.gain + tolerance) return false;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.threshold < b.threshold;
}

std::optional<SplitCandidate> best_split_rows(const Dataset& d, std::span<const std::size_t> rows,
                                              int min_split) {
  const std::size_t n = rows.size();
  const auto min_child = static_cast<std::size_t>(std::max(min_split, 1));
  if (n < 2 * min_child) return std::nullopt;

  const double parent_sd = row_sd(d, rows);
  double mean = 0.0;
  for (auto r : rows) mean += d.samples()[r].target;
  mean /= static_cast<double>(n);
  const double tolerance = kGainTieTolerance * parent_sd;

  std::optional<SplitCandidate> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::vector<double> prefix(n + 1), prefix_sq(n + 1);

  for (std::size_t j = 0; j < d.feature_count(); ++j) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = d.value(a, j), vb = d.value(b, j);
      return va < vb || (va == vb && a < b);
    });
    // sums of mean-shifted targets limit cancellation in the variance
    for (std::size_t i = 0; i < n; ++i) {
      const double t = d.samples()[order[i]].target - mean;
      prefix[i + 1] = prefix[i] + t;
      prefix_sq[i + 1] = prefix_sq[i] + t * t;
    }
    for (std::size_t left_n = min_child; left_n + min_child <= n; ++left_n) {
      const double lo = d.value(order[left_n - 1], j);
      const double hi = d.value(order[left_n], j);
      if (!(lo < hi)) continue;
      const auto right_n = n - left_n;
      const double nl = static_cast<double>(left_n), nr = static_cast<double>(right_n);
      const double sl = prefix[left_n], ql = prefix_sq[left_n];
      const double sr = prefix[n] - sl, qr = prefix_sq[n] - ql;
      const double var_l = std::max(0.0, ql / nl - (sl / nl) * (sl / nl));
      const double var_r = std::max(0.0, qr / nr - (sr / nr) * (sr / nr));
      const double gain = parent_sd - (nl / static_cast<double>(n)) * std::sqrt(var_l) -
                          (nr / static_cast<double>(n)) * std::sqrt(var_r);
      if (!(gain > tolerance)) continue;
      SplitCandidate c{d.feature_names()[j], lo + (hi - lo) / 2.0, gain};
      if (!best || preferred(c, *best, tolerance)) best = std::move(c);
    }
  }
  return best;
}

struct Builder {
  const Dataset& d;
  const TreeParams& params;
  double stop_sd = 0.0;
  std::vector<std::size_t> all_columns;

  // Returns the node and the set of feature columns tested in its subtree.
  TreeNode grow(std::vector<std::size_t> rows, std::set<std::size_t>& tested) {
    TreeNode node;
    node.n = rows.size();
    const auto min_child = static_cast<std::size_t>(params.min_split);
    std::optional<SplitCandidate> split;
    if (rows.size() >= 2 * min_child && !(row_sd(d, rows) < stop_sd)) {
      split = best_split_rows(d, rows, params.min_split);
    }
    if (!split) {
      node.model = detail::fit_rows(d, rows, all_columns).first;
      return node;
    }

    const auto column = d.feature_index(split->feature);
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) (d.value(r, column) <= split->threshold ? left_rows : right_rows).push_back(r);

    node.feature = split->feature;
    node.threshold = split->threshold;
    std::set<std::size_t> sub;
    sub.insert(column);
    node.children.push_back(grow(std::move(left_rows), sub));
    node.children.push_back(grow(std::move(right_rows), sub));
    const std::vector<std::size_t> node_columns(sub.begin(), sub.end());
    node.model = detail::fit_rows(d, rows, node_columns).first;
    tested.insert(sub.begin(), sub.end());
    return node;
  }
};

double estimated_error(const LinearModel& model, std::span<const std::size_t> columns, const Dataset& d,
                       std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  const double n = static_cast<double>(rows.size());
  const double v = static_cast<double>(model.parameter_count());
  double abs_sum = 0.0;
  if (n > v) {
    for (auto r : rows) abs_sum += std::abs(d.samples()[r].target - predict_row(model, columns, d.samples()[r]));
    return abs_sum / n * (n + v) / (n - v);
  }
  // the model can interpolate every row, so its training error says nothing;
  // penalise the error of the constant fit instead
  double mean = 0.0;
  for (auto r : rows) mean += d.samples()[r].target;
  mean /= n;
  for (auto r : rows) abs_sum += std::abs(d.samples()[r].target - mean);
  return abs_sum / n * kPruningPenalty;
}

double prune_node(TreeNode& node, const Dataset& d, std::span<const std::size_t> rows) {
  const auto columns = bind_columns(node.model, d);
  const double node_error = estimated_error(node.model, columns, d, rows);
  if (node.is_leaf()) return node_error;

  const auto split_column = d.feature_index(node.feature);
  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows) (d.value(r, split_column) <= node.threshold ? left_rows : right_rows).push_back(r);
  const double left_error = prune_node(node.children[0], d, left_rows);
  const double right_error = prune_node(node.children[1], d, right_rows);
  const double total = static_cast<double>(rows.size());
  const double subtree_error =
      total > 0.0 ? (static_cast<double>(left_rows.size()) * left_error +
                     static_cast<double>(right_rows.size()) * right_error) / total
                  : 0.0;
  if (node_error <= subtree_error) {
    node.children.clear();
    node.feature.clear();
    node.threshold = 0.0;
    return node_error;
  }
  return subtree_error;
}

nlohmann::ordered_json node_to_json(const TreeNode& node) {
  nlohmann::ordered_json doc;
  if (node.is_leaf()) {
    doc["leaf"] = true;
    doc["model"] = node.model.to_json();
    doc["n"] = node.n;
    return doc;
  }
  doc["split"] = {{"feature", node.feature}, {"threshold", node.threshold}};
  doc["model"] = node.model.to_json();
  doc["n"] = node.n;
  doc["left"] = node_to_json(node.left());
  doc["right"] = node_to_json(node.right());
  return doc;
}

TreeNode node_from_json(const nlohmann::ordered_json& doc) {
  TreeNode node;
  node.model = LinearModel::from_json(doc.at("model"));
  node.n = doc.at("n").get<std::size_t>();
  if (doc.contains("split")) {
    node.feature = doc.at("split").at("feature").get<std::string>();
    node.threshold = doc.at("split").at("threshold").get<double>();
    node.children.push_back(node_from_json(doc.at("left")));
    node.children.push_back(node_from_json(doc.at("right")));
    if (node.n != node.children[0].n + node.children[1].n) {
      throw Error(ErrorKind::ParseError, "tree node count does not equal the sum of its children");
    }
  } else if (!doc.value("leaf", false)) {
    throw Error(ErrorKind::ParseError, "tree node is neither a split nor a leaf");
  }
  if (node.n < 1) throw Error(ErrorKind::ParseError, "tree node with zero samples");
  return node;
}

void collect_leaves(const TreeNode& node, std::vector<const LinearModel*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node.model);
    return;
  }
  collect_leaves(node.left(), out);
  collect_leaves(node.right(), out);
}

std::size_t count_leaves(const TreeNode& node) {
  return node.is_leaf() ? 1 : count_leaves(node.left()) + count_leaves(node.right());
}

std::size_t node_depth(const TreeNode& node) {
  return node.is_leaf() ? 0 : 1 + std::max(node_depth(node.left()), node_depth(node.right()));
}

void collect_split_features(const TreeNode& node, std::set<std::string>& out) {
  if (node.is_leaf()) return;
  out.insert(node.feature);
  collect_split_features(node.left(), out);
  collect_split_features(node.right(), out);
}

double feature_value(const FeatureMap& x, const std::string& name) {
  auto it = x.find(name);
  if (it == x.end()) throw Error(ErrorKind::MissingFeature, "missing feature: " + name);
  return it->second;
}

}  // namespace

void TreeParams::validate() const {
  if (min_split < 2) throw Error(ErrorKind::InvalidArgument, "min_split must be at least 2");
  if (!std::isfinite(sd_threshold_fraction) || sd_threshold_fraction < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "sd_threshold_fraction must be a finite non-negative number");
  }
  if (!std::isfinite(smoothing_k) || smoothing_k < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "smoothing_k must be a finite non-negative number");
  }
}

nlohmann::ordered_json TreeParams::to_json() const {
  nlohmann::ordered_json doc;
  doc["min_split"] = min_split;
  doc["sd_threshold_fraction"] = sd_threshold_fraction;
  doc["smoothing_k"] = smoothing_k;
  doc["prune"] = prune;
  doc["smooth"] = smooth;
  return doc;
}

TreeParams TreeParams::from_json(const nlohmann::ordered_json& doc) {
  TreeParams p;
  p.min_split = doc.value("min_split", p.min_split);
  p.sd_threshold_fraction = doc.value("sd_threshold_fraction", p.sd_threshold_fraction);
  p.smoothing_k = doc.value("smoothing_k", p.smoothing_k);
  p.prune = doc.value("prune", p.prune);
  p.smooth = doc.value("smooth", p.smooth);
  p.validate();
  return p;
}

std::size_t ModelTree::leaf_count() const { return count_leaves(root); }

std::size_t ModelTree::depth() const { return node_depth(root); }

std::vector<const LinearModel*> ModelTree::leaf_models() const {
  std::vector<const LinearModel*> out;
  collect_leaves(root, out);
  return out;
}

std::vector<std::string> ModelTree::split_features() const {
  std::set<std::string> used;
  collect_split_features(root, used);
  std::vector<std::string> out;
  for (const auto& f : features) {
    if (used.contains(f)) out.push_back(f);
  }
  return out;
}

nlohmann::ordered_json ModelTree::to_json() const {
  nlohmann::ordered_json doc;
  doc["kind"] = "m5p";
  doc["params"] = params.to_json();
  doc["smoothed"] = smoothed;
  doc["features"] = features;
  doc["root"] = node_to_json(root);
  return doc;
}

ModelTree ModelTree::from_json(const nlohmann::ordered_json& doc) {
  try {
    ModelTree t;
    t.params = TreeParams::from_json(doc.at("params"));
    t.smoothed = doc.at("smoothed").get<bool>();
    t.features = doc.at("features").get<std::vector<std::string>>();
    t.root = node_from_json(doc.at("root"));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed model tree: ") + e.what());
  }
}

double standard_deviation(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "standard deviation of an empty list");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

double sdr(std::span<const double> targets, std::span<const double> left, std::span<const double> right) {
  if (left.empty() || right.empty() || left.size() + right.size() != targets.size()) {
    throw Error(ErrorKind::InvalidPartition, "split children must be non-empty and cover the parent");
  }
  std::vector<double> whole(targets.begin(), targets.end());
  std::vector<double> parts(left.begin(), left.end());
  parts.insert(parts.end(), right.begin(), right.end());
  std::sort(whole.begin(), whole.end());
  std::sort(parts.begin(), parts.end());
  if (whole != parts) throw Error(ErrorKind::InvalidPartition, "split children are not a partition of the parent");

  const double n = static_cast<double>(targets.size());
  return standard_deviation(targets) - static_cast<double>(left.size()) / n * standard_deviation(left) -
         static_cast<double>(right.size()) / n * standard_deviation(right);
}

std::optional<SplitCandidate> best_split(const Dataset& d, int min_split) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return best_split_rows(d, rows, min_split);
}

ModelTree build_tree(const Dataset& d, const TreeParams& params) {
  params.validate();
  if (d.empty()) throw Error(ErrorKind::EmptyDataset, "cannot grow a tree on an empty dataset");

  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Builder builder{d, params, 0.0, {}};
  builder.stop_sd = params.sd_threshold_fraction * row_sd(d, rows);
  builder.all_columns.resize(d.feature_count());
  std::iota(builder.all_columns.begin(), builder.all_columns.end(), std::size_t{0});

  ModelTree tree;
  tree.params = params;
  tree.smoothed = params.smooth;
  tree.features = d.feature_names();
  std::set<std::size_t> tested;
  tree.root = builder.grow(rows, tested);
  if (params.prune) tree = prune(tree, d);
  return tree;
}

ModelTree prune(const ModelTree& t, const Dataset& d) {
  ModelTree out = t;
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  prune_node(out.root, d, rows);
  return out;
}

double predict_tree(const ModelTree& t, const FeatureMap& x) {
  std::vector<const TreeNode*> path{&t.root};
  while (!path.back()->is_leaf()) {
    const auto* node = path.back();
    path.push_back(feature_value(x, node->feature) <= node->threshold ? &node->left() : &node->right());
  }
  double p = predict_linear(path.back()->model, x);
  if (!t.smoothed) return p;
  const double k = t.params.smoothing_k;
  for (std::size_t i = path.size() - 1; i > 0; --i) {
    const double n = static_cast<double>(path[i]->n);
    p = (n * p + k * predict_linear(path[i - 1]->model, x)) / (n + k);
  }
  return p;
}

}  // namespace gradecast
