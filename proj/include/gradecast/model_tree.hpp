#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradecast/dataset.hpp"
#include "gradecast/linear.hpp"

namespace gradecast {

struct TreeParams {
  int min_split = 4;                    // minimum samples per child
  double sd_threshold_fraction = 0.05;  // stop when node sd < fraction * root sd
  double smoothing_k = 15.0;
  bool prune = true;
  bool smooth = true;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TreeParams from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct SplitCandidate {
  std::string feature;
  double threshold = 0.0;  // value <= threshold routes left
  double gain = 0.0;       // standard deviation reduction
};

// Two gains closer than this fraction of the parent sd count as equal and
// fall through to the name/threshold tie-break.
inline constexpr double kGainTieTolerance = 1e-12;

// When a model has at least as many parameters as samples its estimated error
// is this factor times the mean absolute deviation of the node's targets.
inline constexpr double kPruningPenalty = 10.0;

struct TreeNode {
  // split rule; meaningful only when children is non-empty
  std::string feature;
  double threshold = 0.0;
  // leaf model, or the node-level model used for smoothing and pruning
  LinearModel model;
  std::size_t n = 0;
  std::vector<TreeNode> children;  // empty (leaf) or {left, right}

  bool is_leaf() const noexcept { return children.empty(); }
  const TreeNode& left() const { return children.at(0); }
  const TreeNode& right() const { return children.at(1); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct ModelTree {
  TreeNode root;
  TreeParams params;
  bool smoothed = true;
  std::vector<std::string> features;  // training feature order

  std::size_t leaf_count() const;
  std::size_t depth() const;
  // Leaf models left to right.
  std::vector<const LinearModel*> leaf_models() const;
  // Feature names that appear in split rules, in training feature order.
  std::vector<std::string> split_features() const;

  nlohmann::ordered_json to_json() const;
  static ModelTree from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const ModelTree&, const ModelTree&) = default;
};

// Population standard deviation (divisor n). Throws EmptyInput.
double standard_deviation(std::span<const double> values);

// sd(T) - sum_i |T_i|/|T| * sd(T_i). Throws InvalidPartition unless left and
// right are non-empty and together equal targets as a multiset.
double sdr(std::span<const double> targets, std::span<const double> left, std::span<const double> right);

// Exhaustive search over midpoints between consecutive distinct values of
// every feature. A candidate qualifies when both children hold at least
// min_split samples and its gain exceeds the tie tolerance. Preference order: higher gain,
// then lexicographically smaller feature name, then lower threshold.
std::optional<SplitCandidate> best_split(const Dataset& d, int min_split = TreeParams{}.min_split);

// Grows the tree, then prunes it against d when params.prune is set.
// Internal nodes carry a least-squares model over the features tested in
// their subtree; leaves regress on every feature.
ModelTree build_tree(const Dataset& d, const TreeParams& params = {});

// Bottom-up collapse of subtrees whose node model has an estimated error no
// worse than the subtree's. Estimated error is training MAE times
// (n + v) / (n - v); see kPruningPenalty for n <= v.
ModelTree prune(const ModelTree& t, const Dataset& d);

double predict_tree(const ModelTree& t, const FeatureMap& x);

}  // namespace gradecast
