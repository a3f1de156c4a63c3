#pragma once

#include <span>
#include <vector>

// Poincare-ball primitives. All points live in the open ball of radius
// 1/sqrt(c); every operation that returns a ball point projects its result
// back to the safety margin so downstream atanh/log calls stay finite.

namespace defembed {

using Vec = std::vector<double>;

namespace geo {

// Margin of the ball projection: results satisfy sqrt(c)*|x| <= 1 - kBallEps.
inline constexpr double kBallEps = 1e-5;
// atanh arguments are clamped below this before evaluation.
inline constexpr double kAtanhArgMax = 1.0 - 1e-15;
// Below this norm exp0/log0 act as the identity (removable singularity).
inline constexpr double kTinyNorm = 1e-15;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// Pulls x inside radius (1 - kBallEps)/sqrt(c). No-op if already inside.
void project_to_ball(std::span<double> x, double c);

// x (+) y, the gyrovector addition of the ball. Non-commutative.
Vec mobius_add(std::span<const double> x, std::span<const double> y, double c);

// Geodesic distance (2/sqrt(c)) * atanh(sqrt(c) * |(-x) (+) y|).
double poincare_distance(std::span<const double> x, std::span<const double> y,
                         double c);

// Exponential / logarithmic maps at the origin. Exact inverses of each other.
Vec exp0(std::span<const double> v, double c);
Vec log0(std::span<const double> x, double c);

// Diagonal matrix action exp0(rdiag . log0(x)).
Vec mobius_matvec(std::span<const double> rdiag, std::span<const double> x,
                  double c);

// t (x) x = exp0(t * log0(x)). t=0 gives the origin, t=1 gives x.
Vec mobius_scalar_mul(double t, std::span<const double> x, double c);

// Point at parameter t on the geodesic from x (t=0) to y (t=1).
Vec geodesic_point(std::span<const double> x, std::span<const double> y,
                   double t, double c);

// Converts a Euclidean gradient at x into the Riemannian one:
// g * ((1 - c|x|^2)^2 / 4), the inverse conformal factor squared.
Vec riemannian_rescale(std::span<const double> g, std::span<const double> x,
                       double c);

// Vector-Jacobian products used by the trainer to backpropagate through the
// ball operations. Each accumulates grad^T * d(out)/d(arg) into the out span.

// z = x (+) y; adds the pullbacks of grad through x and y.
void mobius_add_vjp(std::span<const double> x, std::span<const double> y,
                    double c, std::span<const double> grad,
                    std::span<double> grad_x_out, std::span<double> grad_y_out);

// y = exp0(v); adds the pullback of grad into grad_v_out.
void exp0_vjp(std::span<const double> v, double c, std::span<const double> grad,
              std::span<double> grad_v_out);

// v = log0(x); adds the pullback of grad into grad_x_out.
void log0_vjp(std::span<const double> x, double c, std::span<const double> grad,
              std::span<double> grad_x_out);

// Euclidean gradient of f(x, y) = poincare_distance(x, y)^2 with respect to
// both arguments. Smooth at x = y where the gradient vanishes.
void distance_sq_grad(std::span<const double> x, std::span<const double> y,
                      double c, std::span<double> grad_x_out,
                      std::span<double> grad_y_out);

}  // namespace geo
}  // namespace defembed
