#include "query.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "error.h"
#include "geometry.h"

namespace defembed {

namespace {

// Top-k by (score desc, id asc); a full sort keeps it simple and the scan
// already dominates.
NeighborList top_k(const Model& m, std::vector<std::pair<double, int>> scored,
                   int k, const std::string& query_label) {
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  if (static_cast<int>(scored.size()) > k) scored.resize(k);
  NeighborList list;
  list.query = query_label;
  list.entries.reserve(scored.size());
  for (const auto& [score, id] : scored) {
    list.entries.push_back({m.vocab.word(id), score});
  }
  return list;
}

int require_word(const Model& m, const std::string& word) {
  const int id = m.vocab.id(word);
  if (id < 0) throw UsageError("unknown word: " + word);
  return id;
}

double neg_sq_dist(const Model& m, std::span<const double> a,
                   std::span<const double> b) {
  if (m.geometry == ModelGeometry::kHyperbolic) {
    const double d = geo::poincare_distance(a, b, m.curvature);
    return -d * d;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return -sq;
}

}  // namespace

NeighborList nearest_neighbors_point(const Model& m,
                                     std::span<const double> point, int k,
                                     const std::string& query_label,
                                     int exclude_id) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (static_cast<int>(point.size()) != m.dim) {
    throw UsageError("query point dimension mismatch");
  }
  std::vector<std::pair<double, int>> scored;
  scored.reserve(m.vocab.size());
  for (int id = 0; id < m.vocab.size(); ++id) {
    if (id == exclude_id) continue;
    scored.emplace_back(neg_sq_dist(m, point, m.entity(id)), id);
  }
  return top_k(m, std::move(scored), k, query_label);
}

NeighborList nearest_neighbors(const Model& m, const std::string& word, int k,
                               bool include_self) {
  const int id = require_word(m, word);
  return nearest_neighbors_point(m, m.entity(id), k, word,
                                 include_self ? -1 : id);
}

NeighborList relation_adjusted_neighbors(const Model& m,
                                         const std::string& word,
                                         const std::string& role, int k,
                                         bool include_self) {
  if (k < 1) throw UsageError("k must be >= 1");
  const int s = require_word(m, word);
  const int r = RoleSet::id(role);
  if (r < 0) throw UsageError("unknown role: " + role);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(m.vocab.size());
  for (int o = 0; o < m.vocab.size(); ++o) {
    if (!include_self && o == s) continue;
    scored.emplace_back(relation_adjusted_score(m, s, r, o), o);
  }
  return top_k(m, std::move(scored), k, word + " @" + role);
}

std::vector<TraversalPoint> traverse(const Model& m, const std::string& w1,
                                     const std::string& w2, int n_points,
                                     int k) {
  if (n_points < 2) throw UsageError("traverse: n_points must be >= 2");
  if (k < 1) throw UsageError("k must be >= 1");
  const int id1 = require_word(m, w1);
  const int id2 = require_word(m, w2);
  const auto start = m.entity(id1);
  const auto stop = m.entity(id2);

  std::vector<TraversalPoint> path;
  path.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t =
        static_cast<double>(i) / static_cast<double>(n_points - 1);
    TraversalPoint tp;
    tp.t = t;
    if (m.geometry == ModelGeometry::kHyperbolic) {
      tp.point = geo::geodesic_point(start, stop, t, m.curvature);
    } else {
      tp.point.resize(m.dim);
      for (int j = 0; j < m.dim; ++j) {
        tp.point[j] = (1.0 - t) * start[j] + t * stop[j];
      }
    }
    char label[32];
    std::snprintf(label, sizeof(label), "t=%.4f", t);
    tp.neighbors = nearest_neighbors_point(m, tp.point, k, label);
    path.push_back(std::move(tp));
  }
  return path;
}

}  // namespace defembed
