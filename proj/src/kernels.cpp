#include "fastumap/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace fastumap {

double phi(double d, double a, double b) {
    if (d <= 0.0) return 1.0;
    return 1.0 / (1.0 + a * std::pow(d, 2.0 * b));
}

std::pair<double, double> fit_kernel_params(double min_dist, double spread) {
    if (!(min_dist > 0.0) || !(spread > 0.0) || !(min_dist < 10.0 * spread))
        throw std::invalid_argument("fit_kernel_params: require 0 < min_dist < 10 * spread");

    constexpr int kGridSize = 300;
    Eigen::VectorXd d(kGridSize), y(kGridSize);
    for (int i = 0; i < kGridSize; ++i) {
        d(i) = 3.0 * spread * static_cast<double>(i + 1) / kGridSize;
        y(i) = d(i) <= min_dist ? 1.0 : std::exp(-(d(i) - min_dist) / spread);
    }

    // Levenberg-Marquardt in (log a, log b) to keep both parameters positive.
    double la = 0.0, lb = 0.0;
    double lambda = 1e-3;
    auto residuals = [&](double la_, double lb_, Eigen::VectorXd& r) {
        const double a = std::exp(la_), b = std::exp(lb_);
        double cost = 0.0;
        for (int i = 0; i < kGridSize; ++i) {
            r(i) = 1.0 / (1.0 + a * std::pow(d(i), 2.0 * b)) - y(i);
            cost += r(i) * r(i);
        }
        return cost;
    };

    Eigen::VectorXd r(kGridSize), r_trial(kGridSize);
    Eigen::MatrixXd J(kGridSize, 2);
    double cost = residuals(la, lb, r);
    for (int iter = 0; iter < 500; ++iter) {
        const double a = std::exp(la), b = std::exp(lb);
        for (int i = 0; i < kGridSize; ++i) {
            const double p = std::pow(d(i), 2.0 * b);
            const double denom = 1.0 + a * p;
            const double dphida = -p / (denom * denom);
            const double dphidb = -a * p * 2.0 * std::log(d(i)) / (denom * denom);
            J(i, 0) = dphida * a;  // chain rule through log a
            J(i, 1) = dphidb * b;
        }
        const Eigen::Matrix2d H = J.transpose() * J;
        const Eigen::Vector2d g = J.transpose() * r;
        bool stepped = false;
        for (int attempt = 0; attempt < 50; ++attempt) {
            Eigen::Matrix2d Hd = H;
            Hd(0, 0) += lambda;
            Hd(1, 1) += lambda;
            const Eigen::Vector2d step = Hd.ldlt().solve(-g);
            const double trial_cost = residuals(la + step(0), lb + step(1), r_trial);
            if (trial_cost < cost) {
                la += step(0);
                lb += step(1);
                r = r_trial;
                lambda = std::max(lambda * 0.5, 1e-12);
                if (cost - trial_cost < 1e-15 && step.norm() < 1e-12) {
                    return {std::exp(la), std::exp(lb)};
                }
                cost = trial_cost;
                stepped = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped) return {std::exp(la), std::exp(lb)};  // stalled at a minimum
    }
    const double gnorm = (J.transpose() * r).norm();
    if (gnorm > 1e-6)
        throw std::runtime_error("fit_kernel_params: least-squares fit did not converge");
    return {std::exp(la), std::exp(lb)};
}

Eigen::Vector2d attractive_gradient(const Eigen::Vector2d& zu, const Eigen::Vector2d& zv,
                                    double a, double b) {
    const Eigen::Vector2d delta = zu - zv;
    const double d2 = delta.squaredNorm();
    if (d2 <= 0.0) return Eigen::Vector2d::Zero();
    const double pw = std::pow(d2, b - 1.0);  // ||delta||^{2b-2}
    const double coef = -2.0 * a * b * pw / (1.0 + a * pw * d2);
    return coef * delta;
}

Eigen::Vector2d repulsive_gradient(const Eigen::Vector2d& zu, const Eigen::Vector2d& zneg,
                                   double a, double b, double eps) {
    const Eigen::Vector2d delta = zu - zneg;
    const double d2 = delta.squaredNorm();
    if (d2 <= 0.0) return Eigen::Vector2d::Zero();
    const double coef = 2.0 * b / ((eps + d2) * (1.0 + a * std::pow(d2, b)));
    return coef * delta;
}

}  // namespace fastumap
