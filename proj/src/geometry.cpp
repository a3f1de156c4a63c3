#include "geometry.h"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "error.h"

namespace defembed {
namespace geo {

namespace {

void check_same_dim(std::span<const double> a, std::span<const double> b,
                    const char* op) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(op) + ": dimension mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

double clamped_atanh(double v) { return std::atanh(std::min(v, kAtanhArgMax)); }

// Raw Mobius sum without the ball projection; also used by the VJPs.
Vec mobius_add_raw(std::span<const double> x, std::span<const double> y,
                   double c) {
  const double xy = dot(x, y);
  const double x2 = dot(x, x);
  const double y2 = dot(y, y);
  const double alpha = 1.0 + 2.0 * c * xy + c * y2;
  const double beta = 1.0 - c * x2;
  const double denom = 1.0 + 2.0 * c * xy + c * c * x2 * y2;
  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = (alpha * x[i] + beta * y[i]) / denom;
  }
  return z;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void project_to_ball(std::span<double> x, double c) {
  const double max_norm = (1.0 - kBallEps) / std::sqrt(c);
  const double n = norm(x);
  if (n > max_norm) {
    const double scale = max_norm / n;
    for (double& v : x) v *= scale;
  }
}

Vec mobius_add(std::span<const double> x, std::span<const double> y, double c) {
  check_same_dim(x, y, "mobius_add");
  Vec z = mobius_add_raw(x, y, c);
  project_to_ball(z, c);
  return z;
}

double poincare_distance(std::span<const double> x, std::span<const double> y,
                         double c) {
  check_same_dim(x, y, "poincare_distance");
  Vec neg_x(x.begin(), x.end());
  for (double& v : neg_x) v = -v;
  const Vec w = mobius_add_raw(neg_x, y, c);
  const double rc = std::sqrt(c);
  return (2.0 / rc) * clamped_atanh(rc * norm(w));
}

Vec exp0(std::span<const double> v, double c) {
  const double n = norm(v);
  Vec out(v.begin(), v.end());
  if (n < kTinyNorm) return out;
  const double rc = std::sqrt(c);
  const double s = std::tanh(rc * n) / (rc * n);
  for (double& e : out) e *= s;
  project_to_ball(out, c);
  return out;
}

Vec log0(std::span<const double> x, double c) {
  const double n = norm(x);
  Vec out(x.begin(), x.end());
  if (n < kTinyNorm) return out;
  const double rc = std::sqrt(c);
  const double s = clamped_atanh(rc * n) / (rc * n);
  for (double& e : out) e *= s;
  return out;
}

Vec mobius_matvec(std::span<const double> rdiag, std::span<const double> x,
                  double c) {
  check_same_dim(rdiag, x, "mobius_matvec");
  Vec t = log0(x, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= rdiag[i];
  return exp0(t, c);
}

Vec mobius_scalar_mul(double t, std::span<const double> x, double c) {
  Vec v = log0(x, c);
  for (double& e : v) e *= t;
  return exp0(v, c);
}

Vec geodesic_point(std::span<const double> x, std::span<const double> y,
                   double t, double c) {
  check_same_dim(x, y, "geodesic_point");
  Vec neg_x(x.begin(), x.end());
  for (double& v : neg_x) v = -v;
  const Vec dir = mobius_add(neg_x, y, c);
  const Vec step = mobius_scalar_mul(t, dir, c);
  return mobius_add(x, step, c);
}

Vec riemannian_rescale(std::span<const double> g, std::span<const double> x,
                       double c) {
  check_same_dim(g, x, "riemannian_rescale");
  const double factor = 1.0 - c * dot(x, x);
  const double scale = factor * factor / 4.0;
  Vec out(g.begin(), g.end());
  for (double& v : out) v *= scale;
  return out;
}

void mobius_add_vjp(std::span<const double> x, std::span<const double> y,
                    double c, std::span<const double> grad,
                    std::span<double> grad_x_out,
                    std::span<double> grad_y_out) {
  const double xy = dot(x, y);
  const double x2 = dot(x, x);
  const double y2 = dot(y, y);
  const double alpha = 1.0 + 2.0 * c * xy + c * y2;
  const double beta = 1.0 - c * x2;
  const double denom = 1.0 + 2.0 * c * xy + c * c * x2 * y2;

  const Vec z = mobius_add_raw(x, y, c);
  const double gx = dot(grad, x);
  const double gy = dot(grad, y);
  const double gz = dot(grad, std::span<const double>(z));

  for (std::size_t j = 0; j < x.size(); ++j) {
    // d(denom)/dx_j = 2c*y_j + 2c^2*|y|^2*x_j, d(denom)/dy_j symmetric in x.
    const double ddenom_dx = 2.0 * c * y[j] + 2.0 * c * c * y2 * x[j];
    const double ddenom_dy = 2.0 * c * x[j] + 2.0 * c * c * x2 * y[j];
    grad_x_out[j] +=
        (alpha * grad[j] + 2.0 * c * gx * y[j] - 2.0 * c * gy * x[j] -
         gz * ddenom_dx) /
        denom;
    grad_y_out[j] +=
        (beta * grad[j] + 2.0 * c * gx * (x[j] + y[j]) - gz * ddenom_dy) /
        denom;
  }
}

void exp0_vjp(std::span<const double> v, double c, std::span<const double> grad,
              std::span<double> grad_v_out) {
  const double n = norm(v);
  if (n < kTinyNorm) {
    for (std::size_t j = 0; j < v.size(); ++j) grad_v_out[j] += grad[j];
    return;
  }
  const double rc = std::sqrt(c);
  const double th = std::tanh(rc * n);
  const double s = th / (rc * n);
  // ds/dn = (rc*n*sech^2(rc*n) - tanh(rc*n)) / (rc*n^2)
  const double sech2 = 1.0 - th * th;
  const double ds_dn = (rc * n * sech2 - th) / (rc * n * n);
  const double gv = dot(grad, v);
  const double radial = gv * ds_dn / n;
  for (std::size_t j = 0; j < v.size(); ++j) {
    grad_v_out[j] += s * grad[j] + radial * v[j];
  }
}

void log0_vjp(std::span<const double> x, double c, std::span<const double> grad,
              std::span<double> grad_x_out) {
  const double n = norm(x);
  if (n < kTinyNorm) {
    for (std::size_t j = 0; j < x.size(); ++j) grad_x_out[j] += grad[j];
    return;
  }
  const double rc = std::sqrt(c);
  const double at = clamped_atanh(rc * n);
  const double s = at / (rc * n);
  // ds/dn = (rc*n/(1 - c*n^2) - atanh(rc*n)) / (rc*n^2)
  const double ds_dn = (rc * n / (1.0 - c * n * n) - at) / (rc * n * n);
  const double gx = dot(grad, x);
  const double radial = gx * ds_dn / n;
  for (std::size_t j = 0; j < x.size(); ++j) {
    grad_x_out[j] += s * grad[j] + radial * x[j];
  }
}

void distance_sq_grad(std::span<const double> x, std::span<const double> y,
                      double c, std::span<double> grad_x_out,
                      std::span<double> grad_y_out) {
  check_same_dim(x, y, "distance_sq_grad");
  Vec neg_x(x.begin(), x.end());
  for (double& v : neg_x) v = -v;
  const Vec w = mobius_add_raw(neg_x, y, c);
  const double nw = norm(w);
  std::fill(grad_x_out.begin(), grad_x_out.end(), 0.0);
  std::fill(grad_y_out.begin(), grad_y_out.end(), 0.0);
  if (nw < kTinyNorm) return;  // gradient of d^2 vanishes at x = y

  const double rc = std::sqrt(c);
  const double dist = (2.0 / rc) * clamped_atanh(rc * nw);
  // d(d^2)/dw = 2*dist * 2*w / (nw * (1 - c*nw^2))
  const double one_minus = std::max(1.0 - c * nw * nw, 1e-15);
  const double scale = 4.0 * dist / (nw * one_minus);
  Vec grad_w(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = scale * w[j];

  Vec grad_negx(x.size(), 0.0);
  mobius_add_vjp(neg_x, y, c, grad_w, grad_negx, grad_y_out);
  for (std::size_t j = 0; j < x.size(); ++j) grad_x_out[j] = -grad_negx[j];
}

}  // namespace geo
}  // namespace defembed
