#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <functional>

#include "fastumap/kernels.hpp"
#include "fastumap/random.hpp"

using namespace fastumap;

namespace {

// central finite differences of a scalar field over R^2
Eigen::Vector2d central_diff(const std::function<double(const Eigen::Vector2d&)>& f,
                             const Eigen::Vector2d& z, double h) {
    Eigen::Vector2d g;
    for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d hi = z, lo = z;
        hi(c) += h;
        lo(c) -= h;
        g(c) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("phi point values") {
    CHECK(phi(0.0, 1.577, 0.895) == 1.0);
    CHECK(phi(1.0, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(phi(3.0, 1.0, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("fit_kernel_params reproduces frozen least-squares goldens") {
    // frozen from an independent nonlinear least-squares solve on the same
    // 300-point grid over (0, 3 spread]
    const auto [a1, b1] = fit_kernel_params(0.1, 1.0);
    CHECK(a1 == doctest::Approx(1.576942).epsilon(1e-3));
    CHECK(b1 == doctest::Approx(0.895062).epsilon(1e-3));

    const auto [a2, b2] = fit_kernel_params(0.2, 1.0);
    CHECK(a2 == doctest::Approx(1.262054).epsilon(1e-3));
    CHECK(b2 == doctest::Approx(1.003011).epsilon(1e-3));
}

TEST_CASE("fitted kernel is 1 at zero and strictly decreasing") {
    const auto [a, b] = fit_kernel_params(0.1, 1.0);
    CHECK(phi(0.0, a, b) == 1.0);
    double prev = phi(1e-9, a, b);
    for (int i = 1; i <= 300; ++i) {
        const double d = 3.0 * i / 300.0;
        const double v = phi(d, a, b);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(fit_kernel_params(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_kernel_params(11.0, 1.0), std::invalid_argument);
}

TEST_CASE("attractive_gradient direct evaluations") {
    const Eigen::Vector2d zu(1.0, 0.0), zv(0.0, 0.0);
    const Eigen::Vector2d g = attractive_gradient(zu, zv, 1.0, 1.0);
    CHECK(g(0) == doctest::Approx(-1.0));  // -(2 / (1 + 1)) * delta
    CHECK(g(1) == doctest::Approx(0.0));

    CHECK(attractive_gradient(zu, zu, 1.0, 1.0).norm() == 0.0);

    // b = 1 closed form: -2 a delta / (1 + a |delta|^2), finite everywhere
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::Vector2d d(rng.next_gaussian() * 3, rng.next_gaussian() * 3);
        const double a = 0.5 + rng.next_double();
        const Eigen::Vector2d expect = -2.0 * a * d / (1.0 + a * d.squaredNorm());
        CHECK((attractive_gradient(d, Eigen::Vector2d::Zero(), a, 1.0) - expect).norm() <=
              1e-12 * (1.0 + expect.norm()));
    }
}

TEST_CASE("repulsive_gradient direct evaluations") {
    const Eigen::Vector2d zu(1.0, 0.0), zn(0.0, 0.0);
    const Eigen::Vector2d g = repulsive_gradient(zu, zn, 1.0, 1.0, 0.0);
    CHECK(g(0) == doctest::Approx(1.0));  // (2 / (1 * 2)) * delta
    CHECK(g(1) == doctest::Approx(0.0));

    CHECK(repulsive_gradient(zu, zu, 1.0, 1.0, 1e-3).norm() == 0.0);

    // the eps guard only shrinks the magnitude
    const Eigen::Vector2d close(0.05, 0.0);
    const double bare = repulsive_gradient(close, zn, 1.0, 1.0, 0.0).norm();
    const double guarded = repulsive_gradient(close, zn, 1.0, 1.0, 1e-3).norm();
    CHECK(guarded < bare);
}

TEST_CASE("gradients match central finite differences of the loss terms") {
    // attractive g = -grad(-log phi); repulsive g = -grad(-log(1 - phi));
    // randomized (a, b) in [0.5, 2]^2 and |delta| in [0.1, 10]
    Rng rng(12345);
    int checked = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double a = 0.5 + 1.5 * rng.next_double();
        const double b = 0.5 + 1.5 * rng.next_double();
        const double radius = 0.1 + 9.9 * rng.next_double();
        const double angle = 6.283185307179586 * rng.next_double();
        const Eigen::Vector2d zu(radius * std::cos(angle), radius * std::sin(angle));
        const Eigen::Vector2d zv = Eigen::Vector2d::Zero();

        const double h = 1e-6 * std::max(1.0, radius);

        const auto attr_loss = [&](const Eigen::Vector2d& z) {
            return -std::log(phi((z - zv).norm(), a, b));
        };
        const Eigen::Vector2d g_attr = attractive_gradient(zu, zv, a, b);
        const Eigen::Vector2d fd_attr = -central_diff(attr_loss, zu, h);
        CHECK((g_attr - fd_attr).norm() <= 1e-4 * std::max(1e-8, fd_attr.norm()));

        const auto rep_loss = [&](const Eigen::Vector2d& z) {
            return -std::log(1.0 - phi((z - zv).norm(), a, b));
        };
        const Eigen::Vector2d g_rep = repulsive_gradient(zu, zv, a, b, 0.0);
        const Eigen::Vector2d fd_rep = -central_diff(rep_loss, zu, h);
        CHECK((g_rep - fd_rep).norm() <= 1e-4 * std::max(1e-8, fd_rep.norm()));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("clip_coords clamps per coordinate") {
    const Eigen::Vector2d g(7.0, -9.0);
    const Eigen::Vector2d c = clip_coords(g, 4.0);
    CHECK(c(0) == 4.0);
    CHECK(c(1) == -4.0);
    CHECK(clip_coords(Eigen::Vector2d(0.5, -0.5), 4.0) == Eigen::Vector2d(0.5, -0.5));
}
