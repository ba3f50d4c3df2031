// Copyright 2026 The scade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scade/isolation_forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scade/error.h"
#include "scade/parallel.h"

namespace scade {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// H(m) = 1 + 1/2 + ... + 1/m.
double Harmonic(std::uint64_t m) {
  if (m < 64) {
    double sum = 0.0;
    for (std::uint64_t i = m; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  const double x = static_cast<double>(m);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

std::size_t CeilLog2(std::size_t n) {
  std::size_t depth = 0;
  while ((std::size_t{1} << depth) < n) ++depth;
  return depth;
}

}  // namespace

void FeatureMatrix::AddRow(std::span<const double> row) {
  if (row.size() != dims_) throw InternalError("feature row has wrong width");
  values_.insert(values_.end(), row.begin(), row.end());
}

double AveragePathLength(std::uint64_t n) {
  if (n <= 1) return 0.0;
  const double m = static_cast<double>(n - 1);
  return 2.0 * Harmonic(n - 1) - 2.0 * m / static_cast<double>(n);
}

IsolationTree IsolationTree::Build(const FeatureMatrix& data,
                                   std::span<const std::size_t> sample,
                                   Rng& rng, std::size_t depth_limit) {
  IsolationTree tree;
  std::vector<std::size_t> idx(sample.begin(), sample.end());
  tree.nodes_.reserve(2 * idx.size());
  tree.Grow(data, idx, 0, idx.size(), 0, depth_limit, rng);
  return tree;
}

std::uint32_t IsolationTree::Grow(const FeatureMatrix& data,
                                  std::vector<std::size_t>& idx,
                                  std::size_t begin, std::size_t end,
                                  std::size_t depth, std::size_t depth_limit,
                                  Rng& rng) {
  const auto self = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{});
  depth_ = std::max(depth_, depth);
  const std::size_t n = end - begin;

  auto make_leaf = [&] {
    nodes_[self].feature = -1;
    nodes_[self].size = static_cast<std::uint32_t>(n);
    return self;
  };
  if (n <= 1 || depth >= depth_limit) return make_leaf();

  // Ranges of every feature within the node.
  const std::size_t dims = data.dims();
  std::vector<double> lo(dims), hi(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    lo[d] = hi[d] = data.row(idx[begin])[d];
  }
  for (std::size_t i = begin + 1; i < end; ++i) {
    const auto row = data.row(idx[i]);
    for (std::size_t d = 0; d < dims; ++d) {
      lo[d] = std::min(lo[d], row[d]);
      hi[d] = std::max(hi[d], row[d]);
    }
  }
  std::vector<std::size_t> candidates;
  for (std::size_t d = 0; d < dims; ++d) {
    if (hi[d] > lo[d]) candidates.push_back(d);
  }
  if (candidates.empty()) return make_leaf();

  const std::size_t feature = candidates[rng.Below(candidates.size())];
  double split = rng.Uniform(lo[feature], hi[feature]);
  if (split <= lo[feature]) split = std::nextafter(lo[feature], hi[feature]);

  const auto mid = std::partition(
      idx.begin() + static_cast<std::ptrdiff_t>(begin),
      idx.begin() + static_cast<std::ptrdiff_t>(end),
      [&](std::size_t r) { return data.row(r)[feature] < split; });
  const auto cut = static_cast<std::size_t>(mid - idx.begin());

  nodes_[self].feature = static_cast<int>(feature);
  nodes_[self].split = split;
  const std::uint32_t left = Grow(data, idx, begin, cut, depth + 1, depth_limit, rng);
  const std::uint32_t right = Grow(data, idx, cut, end, depth + 1, depth_limit, rng);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

double IsolationTree::PathLength(std::span<const double> x) const {
  std::uint32_t node = 0;
  double depth = 0.0;
  while (nodes_[node].feature >= 0) {
    const Node& n = nodes_[node];
    node = x[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
    depth += 1.0;
  }
  return depth + AveragePathLength(nodes_[node].size);
}

void IsolationForestParams::Validate() const {
  if (n_trees == 0) throw ConfigError("isolation forest needs at least one tree");
  if (subsample < 2) throw ConfigError("isolation forest subsample must be >= 2");
  if (!(contamination > 0.0 && contamination < 0.5)) {
    throw ConfigError("contamination must lie in (0, 0.5)");
  }
}

std::optional<IsolationForest> IsolationForest::Fit(
    const FeatureMatrix& rows, const IsolationForestParams& params,
    std::size_t threads) {
  params.Validate();
  const std::size_t n = rows.rows();
  if (n < kMinRows) return std::nullopt;

  // Canonical row order: lexicographic by feature values.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = rows.row(a);
    const auto rb = rows.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  FeatureMatrix canonical(rows.dims());
  for (const std::size_t r : order) canonical.AddRow(rows.row(r));

  IsolationForest forest;
  forest.params_ = params;
  forest.subsample_ = std::min(params.subsample, n);
  forest.depth_limit_ = params.depth_limit.value_or(CeilLog2(forest.subsample_));
  forest.trees_.resize(params.n_trees);
  ParallelFor(params.n_trees, threads, [&](std::size_t t) {
    Rng rng(DeriveSeed(params.seed, t));
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    rng.Shuffle(indices);
    indices.resize(forest.subsample_);
    forest.trees_[t] =
        IsolationTree::Build(canonical, indices, rng, forest.depth_limit_);
  });

  forest.training_scores_.resize(n);
  ParallelFor(n, threads, [&](std::size_t i) {
    forest.training_scores_[i] = forest.Score(rows.row(i));
  });
  forest.cutoff_ = UpperQuantileCutoff(forest.training_scores_, params.contamination);
  return forest;
}

double IsolationForest::PathLength(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& tree : trees_) total += tree.PathLength(x);
  return total / static_cast<double>(trees_.size());
}

double IsolationForest::Score(std::span<const double> x) const {
  const double c = AveragePathLength(subsample_);
  return std::exp2(-PathLength(x) / c);
}

std::size_t IsolationForest::max_tree_depth() const {
  std::size_t depth = 0;
  for (const auto& tree : trees_) depth = std::max(depth, tree.depth());
  return depth;
}

double UpperQuantileCutoff(std::span<const double> scores, double fraction) {
  if (scores.empty()) throw InternalError("quantile of an empty score set");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double raw = fraction * static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

}  // namespace scade
