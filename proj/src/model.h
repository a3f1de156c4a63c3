#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geometry.h"
#include "vocab.h"

namespace defembed {

enum class ModelGeometry { kEuclidean, kHyperbolic };

std::string geometry_name(ModelGeometry g);
ModelGeometry geometry_from_name(std::string_view name);

// Per-role parameters: a translation vector and the diagonal of the relation
// matrix. Both live in flat parameter space; in the hyperbolic model the
// translation is a ball point and receives Riemannian updates.
struct RelationParams {
  Vec translation;  // r
  Vec scale;        // diag(R)
};

// Full parameter state of a multi-relational embedding model. Subjects and
// objects share a single entity table; biases are per-entity scalars.
struct Model {
  ModelGeometry geometry = ModelGeometry::kHyperbolic;
  double curvature = 1.0;
  int dim = 0;
  Vocabulary vocab;
  std::vector<double> entities;  // vocab.size() x dim, row-major
  std::vector<double> subject_bias;
  std::vector<double> object_bias;
  std::vector<RelationParams> relations;  // RoleSet::kCount entries

  std::span<double> entity(int id) {
    return std::span<double>(entities).subspan(
        static_cast<std::size_t>(id) * dim, dim);
  }
  std::span<const double> entity(int id) const {
    return std::span<const double>(entities).subspan(
        static_cast<std::size_t>(id) * dim, dim);
  }
  double entity_norm(int id) const { return geo::norm(entity(id)); }

  void check_entity(int id) const;
  void check_role(int id) const;
};

// Fresh model: entities uniform in [-1e-3, 1e-3]^d, biases and translations
// zero, scale diagonals all-ones. Deterministic in the seed.
Model init_model(Vocabulary vocab, int dim, ModelGeometry geometry,
                 double curvature, std::uint64_t seed);

// Translational score phi(s, r, o) for the model's geometry:
//   euclidean:  -|R.e_s - (e_o + r)|^2 + b_s + b_o
//   hyperbolic: -d_B(R (x) h_s, h_o (+) r)^2 + b_s + b_o
double score(const Model& m, int s, int r, int o);

// The geometry-appropriate score with both bias terms omitted.
double relation_adjusted_score(const Model& m, int s, int r, int o);

// Euclidean (ambient) gradients of score(s, r, o) with respect to every
// touched parameter. Spans must have length dim; values are accumulated.
struct ScoreGrad {
  std::span<double> subject;      // d(score)/d(e_s)
  std::span<double> object;       // d(score)/d(e_o)
  std::span<double> translation;  // d(score)/d(r)
  std::span<double> scale;        // d(score)/d(diag R)
  double* subject_bias = nullptr;
  double* object_bias = nullptr;
};

// Accumulates upstream * d(score)/d(param) into `out` for each parameter.
void score_backward(const Model& m, int s, int r, int o, double upstream,
                    const ScoreGrad& out);

}  // namespace defembed
