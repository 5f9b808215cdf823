#include "qb/baselines.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qb/errors.hpp"

namespace qb {

std::size_t pivot_select(std::size_t sample_count, const PivotChoice& choice) {
    if (sample_count == 0) throw ContractError("pivot_select: empty sample list");
    switch (choice.kind) {
        case PivotKind::Index: {
            if (!choice.index.has_value()) {
                throw ConfigError("pivot_select: Index choice requires an index");
            }
            if (*choice.index >= sample_count) {
                std::ostringstream os;
                os << "pivot_select: index " << *choice.index << " out of range for "
                   << sample_count << " samples";
                throw ConfigError(os.str());
            }
            return *choice.index;
        }
        case PivotKind::MapSample: {
            if (!choice.log_density.has_value()) {
                throw ConfigError(
                    "pivot_select: MapSample requires per-sample log densities");
            }
            const auto& densities = *choice.log_density;
            if (densities.size() != sample_count) {
                throw ConfigError("pivot_select: log density count does not match samples");
            }
            std::size_t best = 0;
            for (std::size_t i = 1; i < densities.size(); ++i) {
                if (densities[i] > densities[best]) best = i;
            }
            return best;
        }
    }
    throw ContractError("pivot_select: unknown choice kind");
}

PivotRelabelResult<ProductPoint> pivot_relabel(const Manifold& factor,
                                               const std::vector<ProductPoint>& samples,
                                               std::size_t pivot_index, const GroupSpec& G) {
    if (samples.empty()) throw ContractError("pivot_relabel: empty sample list");
    if (pivot_index >= samples.size()) throw ContractError("pivot_relabel: pivot index out of range");
    const ProductPoint& pivot = samples[pivot_index];

    PivotRelabelResult<ProductPoint> result;
    result.relabeled.reserve(samples.size());
    for (const auto& s : samples) {
        result.relabeled.push_back(qb::apply(align(factor, pivot, s, G).element, s));
    }

    const std::size_t k = pivot.size();
    result.mean.assign(k, Point());
    for (std::size_t i = 0; i < k; ++i) {
        Point acc = Point::Zero(pivot[i].size());
        for (const auto& s : result.relabeled) acc += s[i];
        result.mean[i] = acc / static_cast<double>(samples.size());
    }
    return result;
}

PivotRelabelResult<GaussianTuple> pivot_relabel(const std::vector<GaussianTuple>& samples,
                                                std::size_t pivot_index, const GroupSpec& G) {
    if (samples.empty()) throw ContractError("pivot_relabel: empty sample list");
    if (pivot_index >= samples.size()) throw ContractError("pivot_relabel: pivot index out of range");

    const GaussianManifold gm(samples.front().front().dim());
    std::vector<ProductPoint> embedded;
    embedded.reserve(samples.size());
    for (const auto& s : samples) embedded.push_back(to_product_point(gm, s));

    const ProductPoint& pivot = embedded[pivot_index];
    PivotRelabelResult<GaussianTuple> result;
    result.relabeled.reserve(samples.size());

    const std::size_t k = samples.front().size();
    std::vector<Eigen::VectorXd> mean_acc(k);
    std::vector<Eigen::MatrixXd> cov_acc(k);
    const Eigen::Index d = samples.front().front().dim();
    for (std::size_t i = 0; i < k; ++i) {
        mean_acc[i] = Eigen::VectorXd::Zero(d);
        cov_acc[i] = Eigen::MatrixXd::Zero(d, d);
    }

    for (std::size_t n = 0; n < samples.size(); ++n) {
        const GroupElement g = align(gm, pivot, embedded[n], G).element;
        GaussianTuple relabeled(k);
        for (int i = 0; i < g.degree(); ++i) {
            relabeled[static_cast<std::size_t>(i)] =
                samples[n][static_cast<std::size_t>(g(i))];
        }
        for (std::size_t i = 0; i < k; ++i) {
            mean_acc[i] += relabeled[i].mean;
            cov_acc[i] += relabeled[i].covariance;
        }
        result.relabeled.push_back(std::move(relabeled));
    }

    result.mean.reserve(k);
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < k; ++i) {
        result.mean.push_back(make_gaussian(mean_acc[i] / n, symmetrized(cov_acc[i] / n)));
    }
    return result;
}

namespace {

template <class DistFn>
std::size_t argmin_min_pairwise(std::size_t count, std::size_t tuple_size, DistFn&& dist) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < count; ++n) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tuple_size; ++i) {
            for (std::size_t j = i + 1; j < tuple_size; ++j) {
                gap = std::min(gap, dist(n, i, j));
            }
        }
        if (gap < best_gap) {
            best_gap = gap;
            best = n;
        }
    }
    return best;
}

} // namespace

std::size_t most_degenerate_sample_index(const Manifold& factor,
                                         const std::vector<ProductPoint>& samples) {
    if (samples.empty()) throw ContractError("most_degenerate_sample_index: empty sample list");
    return argmin_min_pairwise(samples.size(), samples.front().size(),
                               [&](std::size_t n, std::size_t i, std::size_t j) {
                                   return factor.dist(samples[n][i], samples[n][j]);
                               });
}

std::size_t most_degenerate_sample_index(const std::vector<GaussianTuple>& samples) {
    if (samples.empty()) throw ContractError("most_degenerate_sample_index: empty sample list");
    return argmin_min_pairwise(samples.size(), samples.front().size(),
                               [&](std::size_t n, std::size_t i, std::size_t j) {
                                   return std::sqrt(gaussian_w2_sq(samples[n][i], samples[n][j]));
                               });
}

} // namespace qb
