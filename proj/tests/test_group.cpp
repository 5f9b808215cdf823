#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qb/group.hpp"
#include "qb/samplers.hpp"
#include "test_util.hpp"

using namespace qb;
using qbtest::random_vector;

namespace {

ProductPoint random_tuple(std::mt19937_64& rng, int k, int d, double scale = 3.0) {
    ProductPoint p(static_cast<std::size_t>(k));
    for (auto& f : p) f = random_vector(rng, d, scale);
    return p;
}

ProductPoint tuple_1d(std::initializer_list<double> values) {
    ProductPoint p;
    for (const double v : values) p.push_back(Eigen::VectorXd::Constant(1, v));
    return p;
}

} // namespace

TEST_CASE("group orders") {
    CHECK(GroupSpec{GroupKind::Symmetric, 5}.order() == 120);
    CHECK(GroupSpec{GroupKind::Cyclic, 5}.order() == 5);
    CHECK(GroupSpec{GroupKind::Trivial, 5}.order() == 1);
    CHECK(GroupSpec{GroupKind::Symmetric, 7}.order() == 5040);
}

TEST_CASE("apply and composition") {
    std::mt19937_64 rng(31);
    const GroupSpec sym{GroupKind::Symmetric, 4};
    const ProductPoint p = random_tuple(rng, 4, 2);

    CHECK(qb::apply(GroupElement::identity(4), p) == p);

    for (int rep = 0; rep < 100; ++rep) {
        const GroupElement g = random_element(sym, rng);
        const GroupElement h = random_element(sym, rng);
        const ProductPoint lhs = qb::apply(g, qb::apply(h, p));
        const ProductPoint rhs = qb::apply(compose(g, h), p);
        CHECK(lhs == rhs);
        CHECK(qb::apply(g.inverse(), qb::apply(g, p)) == p);
    }
}

TEST_CASE("group action is an isometry") {
    std::mt19937_64 rng(32);
    const EuclideanManifold plane(2);
    for (const GroupKind kind : {GroupKind::Symmetric, GroupKind::Cyclic}) {
        const GroupSpec G{kind, 5};
        for (int rep = 0; rep < 200; ++rep) {
            const ProductPoint p = random_tuple(rng, 5, 2);
            const ProductPoint q = random_tuple(rng, 5, 2);
            const GroupElement g = random_element(G, rng);
            CHECK(std::abs(product_dist(plane, qb::apply(g, p), qb::apply(g, q)) -
                           product_dist(plane, p, q)) < 1e-12);
        }
    }
}

TEST_CASE("orbit enumeration") {
    const ProductPoint ab = tuple_1d({1.0, 2.0});
    const auto s2 = orbit(ab, GroupSpec{GroupKind::Symmetric, 2});
    REQUIRE(s2.size() == 2);
    CHECK(s2[0] == ab);
    CHECK(s2[1] == tuple_1d({2.0, 1.0}));

    const ProductPoint abc = tuple_1d({1.0, 2.0, 3.0});
    const auto c3 = orbit(abc, GroupSpec{GroupKind::Cyclic, 3});
    REQUIRE(c3.size() == 3);
    CHECK(c3[1] == tuple_1d({2.0, 3.0, 1.0}));
    CHECK(c3[2] == tuple_1d({3.0, 1.0, 2.0}));

    const auto s3 = orbit(abc, GroupSpec{GroupKind::Symmetric, 3});
    REQUIRE(s3.size() == 6);
    for (std::size_t i = 0; i < s3.size(); ++i) {
        for (std::size_t j = i + 1; j < s3.size(); ++j) CHECK(!(s3[i] == s3[j]));
    }
}

TEST_CASE("orbit refuses groups too large to enumerate") {
    const ProductPoint p = tuple_1d({1, 2, 3, 4, 5, 6, 7, 8});
    CHECK_THROWS_AS(orbit(p, GroupSpec{GroupKind::Symmetric, 8}), EnumerationError);
}

TEST_CASE("solve_lap frozen instances") {
    Eigen::MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    const auto r1 = solve_lap(swap);
    CHECK(r1.element.is_identity());
    CHECK(r1.cost == 0.0);

    Eigen::MatrixXd m(3, 3);
    m << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto r2 = solve_lap(m);
    CHECK(r2.cost == 5.0);
    CHECK(r2.element.mapping() == std::vector<int>{1, 0, 2});

    Eigen::MatrixXd ties(2, 2);
    ties << 1, 1, 1, 1;
    const auto r3 = solve_lap(ties);
    CHECK(r3.element.is_identity());
    CHECK(r3.cost == 2.0);
}

TEST_CASE("solve_lap rejects bad input") {
    Eigen::MatrixXd nan(2, 2);
    nan << 0, 1, std::numeric_limits<double>::quiet_NaN(), 0;
    CHECK_THROWS_AS(solve_lap(nan), ContractError);
    CHECK_THROWS_AS(solve_lap(Eigen::MatrixXd::Zero(2, 3)), ContractError);
}

TEST_CASE("solve_lap matches exhaustive search") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unit(0.0, 10.0);
    for (int rep = 0; rep < 500; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd cost(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) cost(i, j) = unit(rng);
        }
        const auto fast = solve_lap(cost);

        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : group_elements(GroupSpec{GroupKind::Symmetric, k})) {
            double c = 0.0;
            for (int i = 0; i < k; ++i) c += cost(i, g(i));
            best = std::min(best, c);
        }
        CHECK(fast.cost == best);
    }
}

TEST_CASE("align_symmetric frozen instances") {
    const EuclideanManifold line(1);
    const auto r1 = align_symmetric(line, tuple_1d({1, 2, 3}), tuple_1d({3, 1, 2}));
    CHECK(r1.cost == 0.0);

    const EuclideanManifold plane(2);
    ProductPoint p{Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0)};
    ProductPoint q{Eigen::Vector2d(2.1, 0), Eigen::Vector2d(0.1, 0)};
    const auto r2 = align_symmetric(plane, p, q);
    CHECK(r2.cost == doctest::Approx(0.02));
    CHECK(r2.element.mapping() == std::vector<int>{1, 0});
}

TEST_CASE("alignment agrees with the exhaustive oracle") {
    std::mt19937_64 rng(34);
    const EuclideanManifold plane(2);
    for (int rep = 0; rep < 500; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 5);
        const ProductPoint p = random_tuple(rng, k, 2);
        const ProductPoint q = random_tuple(rng, k, 2);

        const auto fast = align_symmetric(plane, p, q);
        const auto oracle = brute_force_align(plane, p, q, GroupSpec{GroupKind::Symmetric, k});
        CHECK(fast.cost == oracle.cost);

        const auto cyc = align_cyclic(plane, p, q);
        const auto cyc_oracle = brute_force_align(plane, p, q, GroupSpec{GroupKind::Cyclic, k});
        CHECK(cyc.cost == cyc_oracle.cost);
        CHECK(cyc.element == cyc_oracle.element);
    }
}

TEST_CASE("brute_force_align on orbit members") {
    std::mt19937_64 rng(35);
    const EuclideanManifold plane(2);
    const GroupSpec sym{GroupKind::Symmetric, 4};
    const ProductPoint p = random_tuple(rng, 4, 2);

    const auto self = brute_force_align(plane, p, p, sym);
    CHECK(self.element.is_identity());
    CHECK(self.cost == 0.0);

    for (int rep = 0; rep < 50; ++rep) {
        const ProductPoint q = qb::apply(random_element(sym, rng), p);
        CHECK(brute_force_align(plane, p, q, sym).cost == 0.0);
    }
}

TEST_CASE("align_cyclic shifts and ties") {
    const EuclideanManifold line(1);
    const ProductPoint p = tuple_1d({0, 1, 2});

    const ProductPoint q = qb::apply(GroupElement::cyclic_shift(3, 1), p);
    const auto back = align_cyclic(line, p, q);
    CHECK(back.cost == 0.0);
    CHECK(qb::apply(back.element, q) == p);

    // A transposition is not cyclic: every shift pays something; ties break
    // toward the smallest shift.
    const auto r = align_cyclic(line, p, tuple_1d({0, 2, 1}));
    CHECK(r.cost == 2.0);
    CHECK(r.element.is_identity());
}

TEST_CASE("quotient distance frozen values and invariances") {
    const EuclideanManifold line(1);
    const GroupSpec s2{GroupKind::Symmetric, 2};

    CHECK(quotient_distance(line, tuple_1d({1, 2}), tuple_1d({1, 2}), s2) == 0.0);
    CHECK(quotient_distance(line, tuple_1d({1, 2}), tuple_1d({2, 1}), s2) == 0.0);
    CHECK(quotient_distance(line, tuple_1d({0, 5}), tuple_1d({6, 1}), s2) ==
          doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("quotient distance is bi-invariant and dominated") {
    std::mt19937_64 rng(36);
    const EuclideanManifold plane(2);
    for (const GroupKind kind : {GroupKind::Symmetric, GroupKind::Cyclic}) {
        const GroupSpec G{kind, 4};
        for (int rep = 0; rep < 250; ++rep) {
            const ProductPoint p = random_tuple(rng, 4, 2);
            const ProductPoint q = random_tuple(rng, 4, 2);
            const double base = quotient_distance(plane, p, q, G);
            const GroupElement g = random_element(G, rng);
            const GroupElement h = random_element(G, rng);
            CHECK(std::abs(quotient_distance(plane, qb::apply(g, p), qb::apply(h, q), G) -
                           base) < 1e-12);
            CHECK(base <= product_dist(plane, p, q) + 1e-15);
        }
    }
}

TEST_CASE("sort_align_1d recovers the order of p") {
    const ProductPoint p = tuple_1d({1, 2, 3, 4});
    const ProductPoint q = tuple_1d({0.4, 0.2, 0.3, 0.1});
    const auto r = sort_align_1d(p, q);
    const ProductPoint aligned = qb::apply(r.element, q);
    CHECK(aligned == tuple_1d({0.1, 0.2, 0.3, 0.4}));

    CHECK(sort_align_1d(p, p).element.is_identity());

    const ProductPoint bad{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    CHECK_THROWS_AS(sort_align_1d(bad, bad), ContractError);
}

TEST_CASE("sort_align_1d cost equals align_symmetric cost") {
    std::mt19937_64 rng(37);
    const EuclideanManifold line(1);
    for (int rep = 0; rep < 1000; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 7);
        const ProductPoint p = random_tuple(rng, k, 1, 5.0);
        const ProductPoint q = random_tuple(rng, k, 1, 5.0);
        CHECK(sort_align_1d(p, q).cost == align_symmetric(line, p, q).cost);
    }
}
