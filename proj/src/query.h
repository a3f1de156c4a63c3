#pragma once

#include <span>
#include <string>
#include <vector>

#include "model.h"

namespace defembed {

struct Neighbor {
  std::string word;
  double score = 0.0;
};

// Scores non-increasing; ties broken by ascending vocabulary id.
struct NeighborList {
  std::string query;
  std::vector<Neighbor> entries;
};

// Exhaustive scan over the vocabulary ranking candidates by -d(q, .)^2 in
// the model geometry. `exclude_id` drops one entity (usually the query word
// itself) from the candidates; pass -1 to keep everything.
NeighborList nearest_neighbors_point(const Model& m,
                                     std::span<const double> point, int k,
                                     const std::string& query_label = "point",
                                     int exclude_id = -1);

NeighborList nearest_neighbors(const Model& m, const std::string& word, int k,
                               bool include_self = true);

// Ranks candidate objects o by the bias-free score of (word, role, o),
// exposing the geometric action of the role transformation.
NeighborList relation_adjusted_neighbors(const Model& m,
                                         const std::string& word,
                                         const std::string& role, int k,
                                         bool include_self = true);

struct TraversalPoint {
  double t = 0.0;
  Vec point;
  NeighborList neighbors;
};

// Samples n_points parameters uniformly on [0, 1] along the path from w1 to
// w2 (geodesic in the hyperbolic model, straight line in the euclidean one)
// and reports the k nearest neighbors of each sample.
std::vector<TraversalPoint> traverse(const Model& m, const std::string& w1,
                                     const std::string& w2, int n_points,
                                     int k);

}  // namespace defembed
