#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qb/gaussian_manifold.hpp"
#include "qb/group.hpp"
#include "qb/manifold.hpp"
#include "qb/stream.hpp"

namespace qb {

enum class ScheduleKind { Harmonic, ShiftedHarmonic };

/// Step size eta_t = scale / (t + offset), t starting at 1. The default is
/// the plain 1/t schedule.
struct StepSchedule {
    ScheduleKind kind = ScheduleKind::Harmonic;
    double scale = 1.0;
    long offset = 0;

    double at(long t) const;
    void validate() const;
};

struct SgdConfig {
    long iterations = 1000;
    std::uint64_t seed = 0;
    StepSchedule schedule{};
    long trace_every = 100;
    /// Held-out draws consumed once, before the run, to give the objective
    /// trace a stable target. Zero disables tracing.
    int eval_set_size = 256;
    /// Average the final half of the iterates instead of returning the last
    /// one. Off by default.
    bool tail_average = false;
    /// Diagnostics: reject draws with coinciding factors.
    bool check_configuration = false;
    /// How often a failed step is retried with a halved step size.
    int max_step_retries = 30;

    void validate() const;
};

template <class EstimateT>
struct SgdReport {
    EstimateT estimate;
    std::vector<std::pair<long, double>> objective_trace;
    double wall_time_s = 0.0;
    SgdConfig config;
    GroupSpec group;
};

/// Monte Carlo estimate of the barycenter objective: the mean squared
/// quotient distance from the candidate to the samples.
double estimate_objective(const Manifold& factor, const ProductPoint& candidate,
                          const std::vector<ProductPoint>& samples, const GroupSpec& G);

/// Riemannian stochastic gradient descent for the mean of a distribution of
/// points: initialize from the first draw, then step toward each new draw
/// along the logarithm map with step eta_t.
SgdReport<Point> sgd_mean(SampleStream<Point>& sampler, const Manifold& manifold,
                          const SgdConfig& cfg, const std::optional<Point>& init = std::nullopt);

/// The quotient-space variant: each draw is first aligned to the current
/// estimate over the group G, then every factor takes a step toward its
/// aligned counterpart. The result is one representative of the orbit mean.
SgdReport<ProductPoint> sgd_quotient(SampleStream<ProductPoint>& sampler, const Manifold& factor,
                                     const GroupSpec& G, const SgdConfig& cfg,
                                     const std::optional<ProductPoint>& init = std::nullopt);

/// Specialization for Gaussian mixture draws: means take Euclidean steps,
/// covariance factors follow L <- L - eta (I - T) L with T the transport map
/// from the current component covariance to the aligned draw's covariance.
SgdReport<GaussianTuple> sgd_gaussian_mixture(SampleStream<GaussianTuple>& sampler,
                                              const GroupSpec& G, const SgdConfig& cfg,
                                              const std::optional<GaussianTuple>& init = std::nullopt);

} // namespace qb
