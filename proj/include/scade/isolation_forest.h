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

#ifndef SCADE_ISOLATION_FOREST_H_
#define SCADE_ISOLATION_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scade/random.h"

namespace scade {

// Dense row-major matrix of feature vectors.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(std::size_t dims) : dims_(dims) {}

  void AddRow(std::span<const double> row);
  std::size_t dims() const { return dims_; }
  std::size_t rows() const { return dims_ == 0 ? 0 : values_.size() / dims_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dims_, dims_};
  }

 private:
  std::size_t dims_;
  std::vector<double> values_;
};

// Average path length of an unsuccessful binary-search-tree lookup among n
// points: c(n) = 2 H(n-1) - 2 (n-1) / n, with c(0) = c(1) = 0.
double AveragePathLength(std::uint64_t n);

class IsolationTree {
 public:
  // Grows a tree over the rows named by `sample`. At each node a feature
  // is drawn uniformly among those not constant in the node, and the split
  // uniformly within that feature's range. Growth stops at `depth_limit`,
  // at single points, or when every feature is constant.
  static IsolationTree Build(const FeatureMatrix& data,
                             std::span<const std::size_t> sample, Rng& rng,
                             std::size_t depth_limit);

  // Depth reached by x plus c(size) for the leaf it lands in.
  double PathLength(std::span<const double> x) const;
  std::size_t depth() const { return depth_; }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t size = 0;  // training points in a leaf
  };

  std::uint32_t Grow(const FeatureMatrix& data, std::vector<std::size_t>& idx,
                     std::size_t begin, std::size_t end, std::size_t depth,
                     std::size_t depth_limit, Rng& rng);

  std::vector<Node> nodes_;
  std::size_t depth_ = 0;
};

struct IsolationForestParams {
  std::size_t n_trees = 100;
  std::size_t subsample = 256;  // capped at the row count
  std::uint64_t seed = 42;
  double contamination = 0.10;
  // Defaults to ceil(log2(subsample)).
  std::optional<std::size_t> depth_limit;

  // Throws a config error for out-of-range values.
  void Validate() const;
};

class IsolationForest {
 public:
  static constexpr std::size_t kMinRows = 8;

  // Returns nullopt when there are fewer than kMinRows rows. Rows are put
  // in lexicographic order before sampling, so the model does not depend
  // on input order. Tree t uses a stream seeded from (seed, t); trees are
  // grown in parallel.
  static std::optional<IsolationForest> Fit(const FeatureMatrix& rows,
                                            const IsolationForestParams& params,
                                            std::size_t threads = 1);

  // Mean path length over trees, E[h(x)].
  double PathLength(std::span<const double> x) const;
  // 2^(-E[h(x)] / c(subsample)), in (0, 1).
  double Score(std::span<const double> x) const;

  // Training-row scores, in the caller's row order.
  const std::vector<double>& training_scores() const { return training_scores_; }
  // The ceil(contamination * n)-th highest training score.
  double cutoff() const { return cutoff_; }
  bool IsAnomalous(double score) const { return score >= cutoff_; }

  std::size_t subsample_size() const { return subsample_; }
  std::size_t depth_limit() const { return depth_limit_; }
  std::size_t max_tree_depth() const;
  std::size_t tree_count() const { return trees_.size(); }
  const IsolationForestParams& params() const { return params_; }

 private:
  IsolationForestParams params_;
  std::size_t subsample_ = 0;
  std::size_t depth_limit_ = 0;
  std::vector<IsolationTree> trees_;
  std::vector<double> training_scores_;
  double cutoff_ = 1.0;
};

// The ceil(fraction * n)-th highest value (at least the maximum).
double UpperQuantileCutoff(std::span<const double> scores, double fraction);

}  // namespace scade

#endif  // SCADE_ISOLATION_FOREST_H_
