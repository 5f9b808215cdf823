#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qb/barycenter.hpp"
#include "qb/gaussian_manifold.hpp"
#include "qb/group.hpp"
#include "qb/stream.hpp"

namespace qb {

/// Synthetic label-switched mixture posterior: a ground-truth mixture,
/// per-draw jitter, and an independent uniformly random group element
/// applied to each draw. Stands in for an MCMC chain with a controlled,
/// seed-reproducible distribution.
struct GmmScenario {
    std::vector<GaussianComponent> true_components;
    double jitter_mean_std = 0.05;
    /// Covariance jitter acts on the log of the eigenvalues, so draws stay
    /// SPD by construction.
    double jitter_cov_log_std = 0.05;
    GroupSpec group{GroupKind::Symmetric, 1};
    std::uint64_t seed = 0;

    void validate() const;
};

class GmmStream final : public SampleStream<GaussianTuple> {
public:
    /// apply_action=false suppresses the group action but consumes the same
    /// randomness, so the two variants differ by a permutation only.
    explicit GmmStream(GmmScenario scenario, bool apply_action = true);

    std::optional<GaussianTuple> next() override;

private:
    struct ComponentBasis {
        GaussianComponent component;
        Eigen::MatrixXd eigenvectors;
        Eigen::VectorXd eigenvalues;
    };

    GmmScenario scenario_;
    bool apply_action_;
    std::vector<ComponentBasis> basis_;
    std::mt19937_64 rng_;
};

inline GmmStream gmm_sampler(const GmmScenario& scenario) { return GmmStream(scenario); }

/// Five zero-mean planar Gaussians whose covariances are diag(1, 0.1)
/// rotated by angles -pi/12, -pi/24, 0, pi/24, pi/12. The scenario in which
/// pivoting picks uninformative pivots.
GmmScenario ellipse_scenario(std::uint64_t seed = 7);

/// Five Gaussians over R^5 with means 0.5*e_i and covariances 0.4*I.
GmmScenario gmm5_scenario(std::uint64_t seed = 7, double jitter = 0.05);

/// Mean-only tuples: a fixed tuple of Euclidean factors plus Gaussian mean
/// jitter and a random group element per draw.
struct MeanTupleScenario {
    ProductPoint true_tuple;
    double jitter_std = 0.5;
    GroupSpec group{GroupKind::Symmetric, 1};
    std::uint64_t seed = 0;

    void validate() const;
};

class MeanTupleStream final : public SampleStream<ProductPoint> {
public:
    explicit MeanTupleStream(MeanTupleScenario scenario, bool apply_action = true);

    std::optional<ProductPoint> next() override;

private:
    MeanTupleScenario scenario_;
    bool apply_action_;
    std::mt19937_64 rng_;
};

/// K=5 scalar means at -2,-1,0,1,2 under the full symmetric group.
MeanTupleScenario means1d_scenario(std::uint64_t seed = 7, double jitter = 0.5);

/// Draw a uniformly random element of G.
GroupElement random_element(const GroupSpec& G, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Multi-reference alignment: recover a template from noisy cyclic shifts.

struct MraScenario {
    Eigen::VectorXd signal;
    double noise_std = 0.1;
    int num_observations = 200;
    std::uint64_t seed = 0;

    /// sigma = 0 is allowed for generation only; the Gibbs chain needs > 0.
    void validate() const;
};

struct MraObservations {
    std::vector<Eigen::VectorXd> observations;
    std::vector<int> shifts; ///< generating shift per observation
};

MraObservations mra_generate_with_shifts(const MraScenario& scenario);
std::vector<Eigen::VectorXd> mra_generate(const MraScenario& scenario);

/// One conditional draw of the per-observation shifts given the signal:
/// categorical with weights proportional to exp(-|y - g.x|^2 / (2 sigma^2)).
std::vector<int> gibbs_sample_shifts(const std::vector<Eigen::VectorXd>& observations,
                                     const Eigen::VectorXd& signal, double sigma,
                                     std::mt19937_64& rng);

/// One conditional draw of the signal given the shifts: Gaussian around the
/// mean of the shift-aligned observations with variance sigma^2 / M (flat
/// prior).
Eigen::VectorXd gibbs_sample_signal(const std::vector<Eigen::VectorXd>& observations,
                                    const std::vector<int>& shifts, double sigma,
                                    std::mt19937_64& rng);

/// Gibbs chain over (shifts, signal); emits the signal draw of each sweep
/// and exhausts after `iters` sweeps.
class GibbsStream final : public SampleStream<Eigen::VectorXd> {
public:
    GibbsStream(std::vector<Eigen::VectorXd> observations, double sigma, long iters,
                std::uint64_t seed);

    std::optional<Eigen::VectorXd> next() override;

private:
    std::vector<Eigen::VectorXd> observations_;
    double sigma_;
    long remaining_;
    Eigen::VectorXd signal_;
    std::mt19937_64 rng_;
};

inline GibbsStream mra_gibbs(std::vector<Eigen::VectorXd> observations, double sigma, long iters,
                             std::uint64_t seed) {
    return GibbsStream(std::move(observations), sigma, iters, seed);
}

/// Template reconstruction: find a cyclic-quotient barycenter of the draws
/// as a reference, align every draw to it, and average the aligned draws.
Eigen::VectorXd mra_reconstruct(SampleStream<Eigen::VectorXd>& signal_draws, const SgdConfig& cfg);

/// Signal-to-noise ratio |x|^2 / (K sigma^2).
double snr(const Eigen::VectorXd& x, double sigma);

/// Alignment-invariant relative error: min over g in G of
/// |estimate - g.truth| / |truth|.
double relative_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                      const GroupSpec& G);

/// Seeded generic template with |x| = sqrt(K), so sigma = 1/sqrt(SNR).
Eigen::VectorXd default_mra_template(int length, std::uint64_t seed);

} // namespace qb
