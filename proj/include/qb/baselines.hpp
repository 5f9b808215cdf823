#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qb/gaussian_manifold.hpp"
#include "qb/group.hpp"
#include "qb/manifold.hpp"

namespace qb {

enum class PivotKind {
    MapSample, ///< pick the sample maximizing a supplied log density
    Index      ///< pick an explicit sample index
};

struct PivotChoice {
    PivotKind kind = PivotKind::MapSample;
    std::optional<std::size_t> index;
    std::optional<std::vector<double>> log_density;
};

/// Resolve the pivot sample index. MapSample takes the argmax of the log
/// densities (ties break toward the lowest index); Index is used verbatim.
std::size_t pivot_select(std::size_t sample_count, const PivotChoice& choice);

template <class T>
std::size_t pivot_select(const std::vector<T>& samples, const PivotChoice& choice) {
    return pivot_select(samples.size(), choice);
}

template <class TupleT>
struct PivotRelabelResult {
    std::vector<TupleT> relabeled;
    TupleT mean;
};

/// The pivotal reordering baseline: align every sample to the pivot by
/// optimal assignment, then average the relabeled samples coordinate-wise.
/// The averaging is deliberately the naive Monte Carlo mean.
PivotRelabelResult<ProductPoint> pivot_relabel(const Manifold& factor,
                                               const std::vector<ProductPoint>& samples,
                                               std::size_t pivot_index, const GroupSpec& G);

/// Mixture-draw variant: alignment costs use the Gaussian 2-Wasserstein
/// distance; the mean averages means and covariance entries separately.
PivotRelabelResult<GaussianTuple> pivot_relabel(const std::vector<GaussianTuple>& samples,
                                                std::size_t pivot_index, const GroupSpec& G);

/// Index of the sample closest to the boundary of configuration space: the
/// one whose two most similar factors are closest. The worst possible pivot.
std::size_t most_degenerate_sample_index(const Manifold& factor,
                                         const std::vector<ProductPoint>& samples);
std::size_t most_degenerate_sample_index(const std::vector<GaussianTuple>& samples);

} // namespace qb
