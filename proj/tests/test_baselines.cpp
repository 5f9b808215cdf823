#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qb/baselines.hpp"
#include "qb/samplers.hpp"
#include "test_util.hpp"

using namespace qb;
using qbtest::random_vector;

namespace {

std::vector<ProductPoint> orbit_samples(const ProductPoint& x, const GroupSpec& G, int count,
                                        std::mt19937_64& rng) {
    std::vector<ProductPoint> out;
    for (int i = 0; i < count; ++i) out.push_back(qb::apply(random_element(G, rng), x));
    return out;
}

} // namespace

TEST_CASE("pivot_select policies") {
    PivotChoice map_choice;
    map_choice.kind = PivotKind::MapSample;
    map_choice.log_density = std::vector<double>{-3.0, -1.0, -2.0};
    CHECK(pivot_select(3, map_choice) == 1);

    map_choice.log_density = std::vector<double>{-1.0, -1.0};
    CHECK(pivot_select(2, map_choice) == 0);

    PivotChoice index_choice;
    index_choice.kind = PivotKind::Index;
    index_choice.index = 4;
    CHECK(pivot_select(10, index_choice) == 4);

    PivotChoice missing;
    missing.kind = PivotKind::MapSample;
    CHECK_THROWS_AS(pivot_select(3, missing), ConfigError);

    index_choice.index = 10;
    CHECK_THROWS_AS(pivot_select(10, index_choice), ConfigError);
}

TEST_CASE("pivot_relabel on identical samples is a no-op") {
    const EuclideanManifold plane(2);
    const GroupSpec sym{GroupKind::Symmetric, 3};
    std::mt19937_64 rng(51);
    ProductPoint x;
    for (int i = 0; i < 3; ++i) x.push_back(random_vector(rng, 2, 2.0));

    const std::vector<ProductPoint> samples(5, x);
    const auto result = pivot_relabel(plane, samples, 0, sym);
    for (const auto& s : result.relabeled) CHECK(s == x);
    CHECK(result.mean == x);
}

TEST_CASE("pivot_relabel collapses an orbit onto the pivot representative") {
    const EuclideanManifold plane(2);
    const GroupSpec sym{GroupKind::Symmetric, 4};
    std::mt19937_64 rng(52);
    ProductPoint x;
    for (int i = 0; i < 4; ++i) x.push_back(random_vector(rng, 2, 3.0));

    const auto samples = orbit_samples(x, sym, 20, rng);
    const auto result = pivot_relabel(plane, samples, 3, sym);
    for (const auto& s : result.relabeled) CHECK(s == samples[3]);
    CHECK(quotient_distance(plane, result.mean, x, sym) < 1e-12);
}

TEST_CASE("relabeling preserves orbits exactly") {
    const EuclideanManifold plane(2);
    const GroupSpec sym{GroupKind::Symmetric, 4};
    std::mt19937_64 rng(53);
    std::vector<ProductPoint> samples;
    for (int n = 0; n < 30; ++n) {
        ProductPoint t;
        for (int i = 0; i < 4; ++i) t.push_back(random_vector(rng, 2, 3.0));
        samples.push_back(t);
    }
    const auto result = pivot_relabel(plane, samples, 0, sym);
    for (std::size_t n = 0; n < samples.size(); ++n) {
        CHECK(quotient_distance(plane, samples[n], result.relabeled[n], sym) == 0.0);
    }
}

TEST_CASE("pivot relabeling is idempotent") {
    const EuclideanManifold plane(2);
    const GroupSpec sym{GroupKind::Symmetric, 4};
    std::mt19937_64 rng(54);
    std::vector<ProductPoint> samples;
    for (int n = 0; n < 25; ++n) {
        ProductPoint t;
        for (int i = 0; i < 4; ++i) t.push_back(random_vector(rng, 2, 3.0));
        samples.push_back(t);
    }
    const auto once = pivot_relabel(plane, samples, 2, sym);
    const auto twice = pivot_relabel(plane, once.relabeled, 2, sym);
    for (std::size_t n = 0; n < samples.size(); ++n) {
        CHECK(twice.relabeled[n] == once.relabeled[n]);
    }
    CHECK(twice.mean == once.mean);
}

TEST_CASE("gaussian pivot mean averages covariances entrywise") {
    const GroupSpec sym{GroupKind::Symmetric, 2};
    std::mt19937_64 rng(55);
    std::vector<GaussianTuple> samples;
    for (int n = 0; n < 10; ++n) {
        GaussianTuple t;
        t.push_back(make_gaussian(Eigen::Vector2d(-3 + 0.01 * n, 0), qbtest::random_spd(rng, 2)));
        t.push_back(make_gaussian(Eigen::Vector2d(3 - 0.01 * n, 0), qbtest::random_spd(rng, 2)));
        samples.push_back(t);
    }
    const auto result = pivot_relabel(samples, 0, sym);

    Eigen::MatrixXd cov_mean = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd mean_mean = Eigen::VectorXd::Zero(2);
    for (const auto& s : result.relabeled) {
        cov_mean += s[0].covariance;
        mean_mean += s[0].mean;
    }
    cov_mean /= 10.0;
    mean_mean /= 10.0;
    CHECK((result.mean[0].covariance - symmetrized(cov_mean)).norm() < 1e-14);
    CHECK((result.mean[0].mean - mean_mean).norm() < 1e-14);
}

TEST_CASE("most degenerate sample is the one with nearly equal factors") {
    const EuclideanManifold line(1);
    auto tuple = [](double a, double b, double c) {
        return ProductPoint{Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b),
                            Eigen::VectorXd::Constant(1, c)};
    };
    const std::vector<ProductPoint> samples{tuple(0, 1, 2), tuple(0, 0.01, 2), tuple(0, 1.5, 3)};
    CHECK(most_degenerate_sample_index(line, samples) == 1);
}

TEST_CASE("different pivots give visibly different estimates on the ellipse set") {
    const GmmScenario scenario = ellipse_scenario(11);
    GmmStream stream(scenario);
    std::vector<GaussianTuple> samples;
    for (int n = 0; n < 150; ++n) samples.push_back(*stream.next());

    const std::size_t degenerate = most_degenerate_sample_index(samples);
    const std::size_t other = degenerate == 0 ? 1 : 0;
    const auto bad = pivot_relabel(samples, degenerate, scenario.group);
    const auto good = pivot_relabel(samples, other, scenario.group);

    const GaussianManifold gm(2);
    const double gap = quotient_distance(gm, to_product_point(gm, bad.mean),
                                         to_product_point(gm, good.mean), scenario.group);
    CHECK(gap > 0.05);
}
