#include "model.h"

#include <cmath>
#include <cstddef>

#include "error.h"
#include "rng.h"

namespace defembed {

std::string geometry_name(ModelGeometry g) {
  return g == ModelGeometry::kEuclidean ? "euclidean" : "hyperbolic";
}

ModelGeometry geometry_from_name(std::string_view name) {
  if (name == "euclidean") return ModelGeometry::kEuclidean;
  if (name == "hyperbolic") return ModelGeometry::kHyperbolic;
  throw UsageError("unknown geometry '" + std::string(name) +
                   "' (expected euclidean or hyperbolic)");
}

void Model::check_entity(int id) const {
  if (id < 0 || id >= vocab.size()) {
    throw UsageError("entity id out of range: " + std::to_string(id));
  }
}

void Model::check_role(int id) const {
  if (id < 0 || id >= RoleSet::kCount) {
    throw UsageError("role id out of range: " + std::to_string(id));
  }
}

Model init_model(Vocabulary vocab, int dim, ModelGeometry geometry,
                 double curvature, std::uint64_t seed) {
  if (dim <= 0) throw UsageError("dim must be positive");
  if (curvature <= 0.0) throw UsageError("curvature must be positive");
  Model m;
  m.geometry = geometry;
  m.curvature = curvature;
  m.dim = dim;
  m.vocab = std::move(vocab);
  const std::size_t v = static_cast<std::size_t>(m.vocab.size());
  Rng rng(seed);
  m.entities.resize(v * dim);
  for (double& e : m.entities) e = rng.uniform(-1e-3, 1e-3);
  m.subject_bias.assign(v, 0.0);
  m.object_bias.assign(v, 0.0);
  m.relations.resize(RoleSet::kCount);
  for (auto& rel : m.relations) {
    rel.translation.assign(dim, 0.0);
    rel.scale.assign(dim, 1.0);
  }
  return m;
}

namespace {

// Transformed pair (R.e_s or R (x) h_s, e_o + r or h_o (+) r).
struct TransformedPair {
  Vec subject;
  Vec object;
};

TransformedPair transform(const Model& m, int s, int r, int o) {
  const auto& rel = m.relations[r];
  TransformedPair out;
  if (m.geometry == ModelGeometry::kEuclidean) {
    out.subject.resize(m.dim);
    out.object.resize(m.dim);
    const auto es = m.entity(s);
    const auto eo = m.entity(o);
    for (int i = 0; i < m.dim; ++i) {
      out.subject[i] = rel.scale[i] * es[i];
      out.object[i] = eo[i] + rel.translation[i];
    }
  } else {
    out.subject = geo::mobius_matvec(rel.scale, m.entity(s), m.curvature);
    out.object = geo::mobius_add(m.entity(o), rel.translation, m.curvature);
  }
  return out;
}

double neg_sq_distance(const Model& m, const TransformedPair& p) {
  if (m.geometry == ModelGeometry::kEuclidean) {
    double sq = 0.0;
    for (int i = 0; i < m.dim; ++i) {
      const double diff = p.subject[i] - p.object[i];
      sq += diff * diff;
    }
    return -sq;
  }
  const double d = geo::poincare_distance(p.subject, p.object, m.curvature);
  return -d * d;
}

}  // namespace

double score(const Model& m, int s, int r, int o) {
  m.check_entity(s);
  m.check_role(r);
  m.check_entity(o);
  return neg_sq_distance(m, transform(m, s, r, o)) + m.subject_bias[s] +
         m.object_bias[o];
}

double relation_adjusted_score(const Model& m, int s, int r, int o) {
  m.check_entity(s);
  m.check_role(r);
  m.check_entity(o);
  return neg_sq_distance(m, transform(m, s, r, o));
}

void score_backward(const Model& m, int s, int r, int o, double upstream,
                    const ScoreGrad& out) {
  m.check_entity(s);
  m.check_role(r);
  m.check_entity(o);
  const auto& rel = m.relations[r];
  const auto es = m.entity(s);
  const auto eo = m.entity(o);

  if (out.subject_bias) *out.subject_bias += upstream;
  if (out.object_bias) *out.object_bias += upstream;

  if (m.geometry == ModelGeometry::kEuclidean) {
    // score = -|u|^2 + biases with u = R.e_s - e_o - r
    for (int i = 0; i < m.dim; ++i) {
      const double u = rel.scale[i] * es[i] - eo[i] - rel.translation[i];
      const double g = -2.0 * upstream * u;
      out.subject[i] += g * rel.scale[i];
      out.object[i] -= g;
      out.translation[i] -= g;
      out.scale[i] += g * es[i];
    }
    return;
  }

  // Hyperbolic: score = -d_B(a, b)^2 + biases with
  //   a = exp0(R . log0(h_s)),  b = h_o (+) r.
  const double c = m.curvature;
  const Vec tangent = geo::log0(es, c);
  Vec scaled(m.dim);
  for (int i = 0; i < m.dim; ++i) scaled[i] = rel.scale[i] * tangent[i];
  const Vec a = geo::exp0(scaled, c);
  const Vec b = geo::mobius_add(eo, rel.translation, c);

  Vec grad_a(m.dim), grad_b(m.dim);
  geo::distance_sq_grad(a, b, c, grad_a, grad_b);
  const double w = -upstream;  // d(score)/d(d^2) = -1
  for (int i = 0; i < m.dim; ++i) {
    grad_a[i] *= w;
    grad_b[i] *= w;
  }

  // Subject chain: grad_a -> scaled tangent -> tangent -> h_s, plus diag R.
  Vec grad_scaled(m.dim, 0.0);
  geo::exp0_vjp(scaled, c, grad_a, grad_scaled);
  Vec grad_tangent(m.dim);
  for (int i = 0; i < m.dim; ++i) {
    grad_tangent[i] = grad_scaled[i] * rel.scale[i];
    out.scale[i] += grad_scaled[i] * tangent[i];
  }
  geo::log0_vjp(es, c, grad_tangent, out.subject);

  // Object chain: grad_b splits across the Mobius sum.
  geo::mobius_add_vjp(eo, rel.translation, c, grad_b, out.object,
                      out.translation);
}

}  // namespace defembed
