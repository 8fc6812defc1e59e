#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

#include "geocoherence/ensemble.hpp"
#include "geocoherence/error.hpp"
#include "tree_builder.hpp"

namespace geocoherence {

namespace {

// Weighted class counts of a node and the sum of their squares.
struct NodeCounts {
  std::vector<double> counts;
  double total = 0.0;
  double sum_squares = 0.0;
};

// Gini impurity decrease of a cut whose left child holds `left` (weighted) and
// right child the rest. Equivalent to parent gini minus the weighted child
// ginis, written in terms of sums of squared counts.
double gini_gain(double left_sq, double left_total, double right_sq, double right_total,
                 const NodeCounts& node) {
  const double children = left_sq / left_total + right_sq / right_total;
  return (children - node.sum_squares / node.total) / node.total;
}

struct Candidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

bool better(const Candidate& a, const std::optional<Candidate>& best) {
  if (!best) return true;
  if (a.gain != best->gain) return a.gain > best->gain;
  if (a.feature != best->feature) return a.feature < best->feature;
  return a.threshold < best->threshold;
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

// Threshold drawn uniformly inside (lo, hi); lo < hi required.
double draw_threshold(double lo, double hi, Rng& rng) {
  double t = lo + uniform_open_unit(rng) * (hi - lo);
  if (!(t > lo && t < hi)) t = midpoint(lo, hi);
  return t;
}

// Sweeps rows in ascending value order and returns the best midpoint cut.
// `at(k)` yields {value, label, weight} of the k-th sorted row.
template <typename Access>
std::optional<Candidate> scan_sorted(std::size_t feature, std::size_t count, Access at,
                                     const NodeCounts& node, std::vector<double>& left) {
  std::fill(left.begin(), left.end(), 0.0);
  double left_sq = 0.0;
  double right_sq = node.sum_squares;
  double left_total = 0.0;
  std::optional<Candidate> best;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const auto [value, label, weight] = at(k);
    const double l = left[label];
    const double r = node.counts[label] - l;
    left_sq += (l + weight) * (l + weight) - l * l;
    right_sq += (r - weight) * (r - weight) - r * r;
    left[label] = l + weight;
    left_total += weight;
    const double next = std::get<0>(at(k + 1));
    if (!(value < next)) continue;
    const double gain = gini_gain(left_sq, left_total, right_sq, node.total - left_total, node);
    if (!best || gain > best->gain) best = Candidate{feature, midpoint(value, next), gain};
  }
  return best;
}

// Gain of the cut `value <= threshold` over rows in ascending value order.
template <typename Access>
Candidate score_cut(std::size_t feature, double threshold, std::size_t count, Access at,
                    const NodeCounts& node, std::vector<double>& left) {
  std::fill(left.begin(), left.end(), 0.0);
  double left_total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto [value, label, weight] = at(k);
    if (value > threshold) break;
    left[label] += weight;
    left_total += weight;
  }
  double left_sq = 0.0;
  double right_sq = 0.0;
  for (std::size_t c = 0; c < left.size(); ++c) {
    left_sq += left[c] * left[c];
    const double r = node.counts[c] - left[c];
    right_sq += r * r;
  }
  return Candidate{feature, threshold,
                   gini_gain(left_sq, left_total, right_sq, node.total - left_total, node)};
}

NodeCounts unit_counts(std::span<const int> labels, std::size_t n_classes) {
  NodeCounts node;
  node.counts.assign(n_classes, 0.0);
  for (const int y : labels) node.counts[static_cast<std::size_t>(y)] += 1.0;
  node.total = static_cast<double>(labels.size());
  for (const double c : node.counts) node.sum_squares += c * c;
  return node;
}

void check_inputs(const MatrixView& rows, std::span<const int> labels, std::size_t n_classes) {
  if (labels.size() != rows.rows) throw TrainingError("labels do not match the row count");
  for (const int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      throw TrainingError("label " + std::to_string(y) + " outside [0, n_classes)");
    }
  }
}

std::vector<std::size_t> rows_sorted_by(const MatrixView& rows, std::size_t feature) {
  std::vector<std::size_t> order(rows.rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows.at(a, feature) < rows.at(b, feature);
  });
  return order;
}

}  // namespace

std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
  std::vector<std::size_t> draws(n);
  for (auto& d : draws) d = static_cast<std::size_t>(uniform_index(rng, n));
  return draws;
}

std::optional<Split> find_optimal_split(const MatrixView& rows, std::span<const int> labels,
                                        std::size_t n_classes,
                                        std::span<const std::size_t> candidate_features) {
  check_inputs(rows, labels, n_classes);
  if (rows.rows < 2) return std::nullopt;
  const NodeCounts node = unit_counts(labels, n_classes);
  std::vector<double> left(n_classes);
  std::optional<Candidate> best;
  for (const auto f : candidate_features) {
    const auto order = rows_sorted_by(rows, f);
    auto at = [&](std::size_t k) {
      return std::tuple<double, std::size_t, double>{rows.at(order[k], f),
                                                     static_cast<std::size_t>(labels[order[k]]), 1.0};
    };
    const auto cand = scan_sorted(f, order.size(), at, node, left);
    if (cand && cand->gain > kMinSplitGain && better(*cand, best)) best = cand;
  }
  if (!best) return std::nullopt;
  return Split{best->feature, best->threshold, best->gain};
}

std::optional<Split> find_random_split(const MatrixView& rows, std::span<const int> labels,
                                       std::size_t n_classes,
                                       std::span<const std::size_t> candidate_features, Rng& rng) {
  check_inputs(rows, labels, n_classes);
  if (rows.rows < 2) return std::nullopt;
  const NodeCounts node = unit_counts(labels, n_classes);
  std::vector<double> left(n_classes);
  std::optional<Candidate> best;
  for (const auto f : candidate_features) {
    const auto order = rows_sorted_by(rows, f);
    const double lo = rows.at(order.front(), f);
    const double hi = rows.at(order.back(), f);
    if (!(lo < hi)) continue;
    const double threshold = draw_threshold(lo, hi, rng);
    auto at = [&](std::size_t k) {
      return std::tuple<double, std::size_t, double>{rows.at(order[k], f),
                                                     static_cast<std::size_t>(labels[order[k]]), 1.0};
    };
    const auto cand = score_cut(f, threshold, order.size(), at, node, left);
    if (cand.gain > kMinSplitGain && better(cand, best)) best = cand;
  }
  if (!best) return std::nullopt;
  return Split{best->feature, best->threshold, best->gain};
}

DecisionTree::DecisionTree(std::size_t n_classes, std::size_t n_features, std::vector<Node> nodes,
                           std::vector<double> leaf_values)
    : n_classes_(n_classes),
      n_features_(n_features),
      nodes_(std::move(nodes)),
      leaf_values_(std::move(leaf_values)) {}

DecisionTree DecisionTree::train(const MatrixView& rows, std::span<const int> labels,
                                 std::size_t n_classes, const TreeParams& params, Rng& rng) {
  if (rows.rows == 0) throw TrainingError("cannot train on an empty table");
  check_inputs(rows, labels, n_classes);
  const detail::ColumnStore store(rows);
  return detail::grow_tree(store, labels, n_classes, params, rng);
}

std::span<const double> DecisionTree::predict_proba(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                         : n.right);
  }
  return {leaf_values_.data() + static_cast<std::size_t>(nodes_[i].leaf) * n_classes_, n_classes_};
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children always come after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

namespace detail {

ColumnStore::ColumnStore(const MatrixView& rows)
    : n_rows(rows.rows), n_cols(rows.cols), columns(rows.rows * rows.cols), order(rows.rows * rows.cols) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) columns[c * n_rows + r] = rows.at(r, c);
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    auto* begin = order.data() + c * n_rows;
    std::iota(begin, begin + n_rows, 0u);
    const double* col = columns.data() + c * n_rows;
    std::stable_sort(begin, begin + n_rows,
                     [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }
}

DecisionTree grow_tree(const ColumnStore& store, std::span<const int> labels, std::size_t n_classes,
                       const TreeParams& params, Rng& rng) {
  const std::size_t n = store.n_rows;
  const std::size_t n_features = store.n_cols;

  std::vector<std::uint32_t> weights(n, params.bootstrap ? 0 : 1);
  if (params.bootstrap) {
    for (const auto d : bootstrap_sample(n, rng)) ++weights[d];
  }
  std::size_t m = 0;
  for (const auto w : weights) m += w > 0 ? 1 : 0;

  // Per feature, the in-bag rows in ascending value order. A node owns the
  // same [begin, end) range in every feature's list.
  std::vector<std::uint32_t> order(n_features * m);
  for (std::size_t f = 0; f < n_features; ++f) {
    std::size_t k = 0;
    for (const auto r : store.sorted(f)) {
      if (weights[r] > 0) order[f * m + k++] = r;
    }
  }

  const std::size_t mtry =
      params.max_features == 0 ? n_features : std::min(params.max_features, n_features);
  std::vector<std::size_t> features(n_features);
  std::iota(features.begin(), features.end(), 0);

  std::vector<DecisionTree::Node> nodes(1);
  std::vector<double> leaf_values;
  struct Pending {
    std::size_t begin, end, node, depth;
  };
  std::vector<Pending> stack{{0, m, 0, 0}};

  NodeCounts node;
  std::vector<double> left(n_classes);
  std::vector<std::uint32_t> buffer(m);
  std::vector<std::uint8_t> goes_left(n, 0);

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();

    node.counts.assign(n_classes, 0.0);
    node.total = 0.0;
    for (std::size_t k = p.begin; k < p.end; ++k) {
      const auto r = order[k];
      node.counts[static_cast<std::size_t>(labels[r])] += weights[r];
      node.total += weights[r];
    }
    node.sum_squares = 0.0;
    std::size_t present = 0;
    for (const double c : node.counts) {
      node.sum_squares += c * c;
      present += c > 0.0 ? 1 : 0;
    }

    std::optional<Candidate> best;
    const bool splittable = p.end - p.begin >= params.min_samples_split && present > 1 &&
                            (!params.max_depth || p.depth < *params.max_depth);
    if (splittable) {
      std::size_t visited = 0;
      for (std::size_t k = 0; k < n_features; ++k) {
        // Keep drawing past mtry until a usable split turns up.
        if (visited >= mtry && best) break;
        const auto j = k + static_cast<std::size_t>(uniform_index(rng, n_features - k));
        std::swap(features[k], features[j]);
        const std::size_t f = features[k];
        const std::uint32_t* seg = order.data() + f * m;
        const double lo = store.value(f, seg[p.begin]);
        const double hi = store.value(f, seg[p.end - 1]);
        if (!(lo < hi)) continue;  // constant in this node
        ++visited;
        auto at = [&](std::size_t i) {
          const auto r = seg[p.begin + i];
          return std::tuple<double, std::size_t, double>{
              store.value(f, r), static_cast<std::size_t>(labels[r]), static_cast<double>(weights[r])};
        };
        std::optional<Candidate> cand;
        if (params.rule == SplitRule::kOptimal) {
          cand = scan_sorted(f, p.end - p.begin, at, node, left);
        } else {
          cand = score_cut(f, draw_threshold(lo, hi, rng), p.end - p.begin, at, node, left);
        }
        if (cand && cand->gain > kMinSplitGain && better(*cand, best)) best = cand;
      }
    }

    if (!best) {
      nodes[p.node].leaf = static_cast<int>(leaf_values.size() / std::max<std::size_t>(n_classes, 1));
      for (const double c : node.counts) leaf_values.push_back(c / node.total);
      continue;
    }

    const std::uint32_t* split_seg = order.data() + best->feature * m;
    std::size_t n_left = 0;
    for (std::size_t k = p.begin; k < p.end; ++k) {
      const auto r = split_seg[k];
      const bool l = store.value(best->feature, r) <= best->threshold;
      goes_left[r] = l ? 1 : 0;
      n_left += l ? 1 : 0;
    }
    for (std::size_t g = 0; g < n_features; ++g) {
      std::uint32_t* seg = order.data() + g * m;
      std::size_t li = p.begin;
      std::size_t ri = 0;
      for (std::size_t k = p.begin; k < p.end; ++k) {
        const auto r = seg[k];
        if (goes_left[r]) {
          seg[li++] = r;
        } else {
          buffer[ri++] = r;
        }
      }
      std::copy_n(buffer.begin(), ri, seg + li);
    }

    const auto left_id = nodes.size();
    nodes.emplace_back();
    nodes.emplace_back();
    auto& parent = nodes[p.node];
    parent.feature = static_cast<int>(best->feature);
    parent.threshold = best->threshold;
    parent.left = static_cast<int>(left_id);
    parent.right = static_cast<int>(left_id + 1);
    stack.push_back({p.begin + n_left, p.end, left_id + 1, p.depth + 1});
    stack.push_back({p.begin, p.begin + n_left, left_id, p.depth + 1});
  }
  return DecisionTree(n_classes, n_features, std::move(nodes), std::move(leaf_values));
}

}  // namespace detail

}  // namespace geocoherence
