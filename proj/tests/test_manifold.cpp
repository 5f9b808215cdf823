#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <memory>
#include <random>

#include "qb/gaussian_manifold.hpp"
#include "qb/manifold.hpp"
#include "test_util.hpp"

using namespace qb;
using qbtest::random_spd;
using qbtest::random_vector;

TEST_CASE("euclidean distance and identity") {
    const EuclideanManifold plane(2);
    CHECK(plane.dist(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)) == doctest::Approx(5.0));

    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const Point p = random_vector(rng, 2, 5.0);
        CHECK(plane.dist(p, p) == 0.0);
    }
}

TEST_CASE("euclidean exp and log closed forms") {
    const EuclideanManifold plane(2);
    const Point p = Eigen::Vector2d(1, 1);
    const TangentVector v{Eigen::Vector2d(2, -1), p};
    CHECK((plane.exp(p, v) - Eigen::Vector2d(3, 0)).norm() == 0.0);
    CHECK((plane.exp(p, TangentVector{Eigen::Vector2d::Zero(), p}) - p).norm() == 0.0);

    CHECK((plane.log(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)).components -
           Eigen::Vector2d(3, 4))
              .norm() == 0.0);
    CHECK(plane.log(p, p).components.norm() == 0.0);
}

TEST_CASE("exp rejects tangents based elsewhere") {
    const EuclideanManifold plane(2);
    const TangentVector v{Eigen::Vector2d(1, 0), Eigen::Vector2d(9, 9)};
    CHECK_THROWS_AS(plane.exp(Eigen::Vector2d(0, 0), v), ContractError);
    CHECK_THROWS_AS(plane.dist(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)), ContractError);
}

TEST_CASE("exp/log roundtrip on random pairs") {
    const EuclideanManifold space(4);
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Point p = random_vector(rng, 4, 10.0);
        const Point q = random_vector(rng, 4, 10.0);
        const Point back = space.exp(p, space.log(p, q));
        worst = std::max(worst, (back - q).norm() / std::max(1.0, q.norm()));
    }
    CHECK(worst < tol().roundtrip);
}

TEST_CASE("log norm equals distance") {
    const EuclideanManifold space(3);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const Point p = random_vector(rng, 3, 5.0);
        const Point q = random_vector(rng, 3, 5.0);
        CHECK(std::abs(space.tangent_norm(space.log(p, q)) - space.dist(p, q)) < 1e-10);
    }
}

TEST_CASE("metric axioms sampled") {
    const EuclideanManifold space(3);
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 1000; ++rep) {
        const Point a = random_vector(rng, 3, 5.0);
        const Point b = random_vector(rng, 3, 5.0);
        const Point c = random_vector(rng, 3, 5.0);
        CHECK(space.dist(a, b) == space.dist(b, a));
        CHECK(space.dist(a, c) <= space.dist(a, b) + space.dist(b, c) + 1e-12);
    }
}

TEST_CASE("product metric composes factor distances") {
    const auto line = std::make_shared<EuclideanManifold>(1);
    const ProductManifold pair(line, 2);

    const ProductPoint p{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 5.0)};
    const ProductPoint q{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 7.0)};
    CHECK(pair.dist(pair.join(p), pair.join(q)) == doctest::Approx(std::sqrt(5.0)));
    CHECK(product_dist(*line, p, q) == std::sqrt(product_dist_sq(*line, p, q)));

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        const Point a = random_vector(rng, 2 * 3, 4.0);
        const Point b = random_vector(rng, 2 * 3, 4.0);
        const auto tri = std::make_shared<EuclideanManifold>(3);
        const ProductManifold two(tri, 2);
        double sq = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double d = tri->dist(a.segment(3 * i, 3), b.segment(3 * i, 3));
            sq += d * d;
        }
        CHECK(two.dist(a, b) == std::sqrt(sq));
    }
}

TEST_CASE("product exp equals per-factor exp") {
    const auto plane = std::make_shared<EuclideanManifold>(2);
    const ProductManifold triple(plane, 3);
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 200; ++rep) {
        const Point p = random_vector(rng, 6, 3.0);
        const Point dir = random_vector(rng, 6, 1.0);
        const Point moved = triple.exp(p, TangentVector{dir, p});
        for (int i = 0; i < 3; ++i) {
            const Point base = p.segment(2 * i, 2);
            const Point factor_moved =
                plane->exp(base, TangentVector{dir.segment(2 * i, 2), base});
            CHECK((moved.segment(2 * i, 2) - factor_moved).norm() == 0.0);
        }
    }
}

TEST_CASE("configuration validation catches coincident factors") {
    const EuclideanManifold line(1);
    const ProductPoint good{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
    CHECK_NOTHROW(validate_configuration(line, good));
    const ProductPoint bad{Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 2.0)};
    CHECK_THROWS_AS(validate_configuration(line, bad), ContractError);
}

TEST_CASE("gaussian manifold matches the component metric") {
    const GaussianManifold gm(3);
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = make_gaussian(random_vector(rng, 3), random_spd(rng, 3));
        const auto b = make_gaussian(random_vector(rng, 3), random_spd(rng, 3));
        const double d = gm.dist(gm.to_point(a), gm.to_point(b));
        CHECK(d == std::sqrt(gaussian_w2_sq(a, b)));
    }
}

TEST_CASE("gaussian manifold exp/log roundtrip") {
    const GaussianManifold gm(3);
    std::mt19937_64 rng(8);
    double worst = 0.0;
    double worst_norm = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
        const Point p = gm.to_point(make_gaussian(random_vector(rng, 3), random_spd(rng, 3)));
        const Point q = gm.to_point(make_gaussian(random_vector(rng, 3), random_spd(rng, 3)));
        const TangentVector v = gm.log(p, q);
        const Point back = gm.exp(p, v);
        worst = std::max(worst, (back - q).norm() / q.norm());
        worst_norm = std::max(worst_norm, std::abs(gm.tangent_norm(v) - gm.dist(p, q)));
    }
    CHECK(worst < tol().spd_roundtrip);
    CHECK(worst_norm < tol().spd_roundtrip);
}

TEST_CASE("gaussian manifold component conversion roundtrips") {
    const GaussianManifold gm(2);
    std::mt19937_64 rng(9);
    const auto c = make_gaussian(random_vector(rng, 2), random_spd(rng, 2));
    const auto back = gm.to_component(gm.to_point(c));
    CHECK((back.mean - c.mean).norm() == 0.0);
    CHECK((back.covariance - c.covariance).norm() == 0.0);
    validate_gaussian(back);
}
