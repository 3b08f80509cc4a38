#pragma once

#include <Eigen/Core>

namespace fastumap {

/// Low-dimensional connection kernel parameters for the two vertex roles.
/// (a_x, b_x) applies when the updated head acts as an ordinary data point,
/// (a_y, b_y) when it acts as a landmark representative.
struct KernelParams {
    double a_x = 1.0;
    double b_x = 1.0;
    double a_y = 1.0;
    double b_y = 1.0;

    bool homogeneous() const { return a_x == a_y && b_x == b_y; }
};

/// phi(d) = 1 / (1 + a d^{2b}); phi(0) = 1.
double phi(double d, double a, double b);

/// Least-squares fit of phi to the target curve that is 1 up to min_dist and
/// exp(-(d - min_dist) / spread) beyond it, over a fixed 300-point grid on
/// (0, 3 spread]. Deterministic; throws on non-convergence.
std::pair<double, double> fit_kernel_params(double min_dist, double spread);

/// Displacement applied to the head of a positive edge (the negated gradient
/// of -log phi(||zu - zv||) with respect to zu). Zero when zu == zv.
Eigen::Vector2d attractive_gradient(const Eigen::Vector2d& zu, const Eigen::Vector2d& zv,
                                    double a, double b);

/// Displacement applied to the head against one negative sample (the negated
/// gradient of -log(1 - phi(||zu - zneg||))), with eps guarding the
/// denominator near coincident points.
Eigen::Vector2d repulsive_gradient(const Eigen::Vector2d& zu, const Eigen::Vector2d& zneg,
                                   double a, double b, double eps);

/// Per-coordinate clamp to [-clip, clip].
inline Eigen::Vector2d clip_coords(const Eigen::Vector2d& g, double clip) {
    return g.cwiseMax(-clip).cwiseMin(clip);
}

}  // namespace fastumap
