#include "qb/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qb/errors.hpp"

namespace qb {

GroupElement random_element(const GroupSpec& G, std::mt19937_64& rng) {
    switch (G.kind) {
        case GroupKind::Trivial:
            return GroupElement::identity(G.degree);
        case GroupKind::Cyclic: {
            std::uniform_int_distribution<int> shift(0, G.degree - 1);
            return GroupElement::cyclic_shift(G.degree, shift(rng));
        }
        case GroupKind::Symmetric: {
            // Fisher-Yates.
            std::vector<int> m(static_cast<std::size_t>(G.degree));
            std::iota(m.begin(), m.end(), 0);
            for (int i = G.degree - 1; i > 0; --i) {
                std::uniform_int_distribution<int> pick(0, i);
                std::swap(m[static_cast<std::size_t>(i)],
                          m[static_cast<std::size_t>(pick(rng))]);
            }
            return GroupElement(std::move(m));
        }
    }
    throw ContractError("random_element: unknown group kind");
}

void GmmScenario::validate() const {
    if (true_components.empty()) throw ContractError("GmmScenario: no components");
    if (jitter_mean_std < 0 || jitter_cov_log_std < 0) {
        throw ContractError("GmmScenario: jitters must be nonnegative");
    }
    if (group.degree != static_cast<int>(true_components.size())) {
        throw ContractError("GmmScenario: group degree must match component count");
    }
    for (std::size_t i = 0; i < true_components.size(); ++i) {
        validate_gaussian(true_components[i]);
        for (std::size_t j = i + 1; j < true_components.size(); ++j) {
            if (gaussian_w2_sq(true_components[i], true_components[j]) <= 0.0) {
                throw ContractError("GmmScenario: components must be pairwise distinct");
            }
        }
    }
}

GmmStream::GmmStream(GmmScenario scenario, bool apply_action)
    : scenario_(std::move(scenario)), apply_action_(apply_action), rng_(scenario_.seed) {
    scenario_.validate();
    basis_.reserve(scenario_.true_components.size());
    for (const auto& c : scenario_.true_components) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(c.covariance);
        basis_.push_back(ComponentBasis{c, eigs.eigenvectors(), eigs.eigenvalues()});
    }
}

std::optional<GaussianTuple> GmmStream::next() {
    std::normal_distribution<double> normal(0.0, 1.0);
    GaussianTuple tuple;
    tuple.reserve(basis_.size());
    for (const auto& b : basis_) {
        const Eigen::Index d = b.component.dim();
        // The normals are consumed even at zero jitter so the draw sequence
        // does not depend on the jitter settings.
        Eigen::VectorXd mean = b.component.mean;
        for (Eigen::Index i = 0; i < d; ++i) {
            mean(i) += scenario_.jitter_mean_std * normal(rng_);
        }
        Eigen::VectorXd eigenvalues = b.eigenvalues;
        for (Eigen::Index i = 0; i < d; ++i) {
            eigenvalues(i) *= std::exp(scenario_.jitter_cov_log_std * normal(rng_));
        }
        if (scenario_.jitter_cov_log_std == 0.0) {
            // Zero jitter reproduces the component bit for bit.
            tuple.push_back(GaussianComponent{std::move(mean), b.component.covariance,
                                              b.component.factor});
        } else {
            const Eigen::MatrixXd cov = symmetrized(
                b.eigenvectors * eigenvalues.asDiagonal() * b.eigenvectors.transpose());
            tuple.push_back(make_gaussian(std::move(mean), cov));
        }
    }
    // Drawn unconditionally so the suppressed variant sees identical jitter.
    const GroupElement g = random_element(scenario_.group, rng_);
    if (!apply_action_) return tuple;
    GaussianTuple acted(tuple.size());
    for (int i = 0; i < g.degree(); ++i) {
        acted[static_cast<std::size_t>(i)] = tuple[static_cast<std::size_t>(g(i))];
    }
    return acted;
}

GmmScenario ellipse_scenario(std::uint64_t seed) {
    const double angles[] = {-M_PI / 12, -M_PI / 24, 0.0, M_PI / 24, M_PI / 12};
    const Eigen::Matrix2d base = Eigen::Vector2d(1.0, 0.1).asDiagonal();
    GmmScenario scenario;
    for (const double theta : angles) {
        Eigen::Matrix2d rot;
        rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        scenario.true_components.push_back(
            make_gaussian(Eigen::Vector2d::Zero(), symmetrized(rot * base * rot.transpose())));
    }
    scenario.jitter_mean_std = 0.05;
    scenario.jitter_cov_log_std = 0.15;
    scenario.group = GroupSpec{GroupKind::Symmetric, 5};
    scenario.seed = seed;
    return scenario;
}

GmmScenario gmm5_scenario(std::uint64_t seed, double jitter) {
    GmmScenario scenario;
    const Eigen::MatrixXd cov = 0.4 * Eigen::MatrixXd::Identity(5, 5);
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
        mean(i) = 0.5;
        scenario.true_components.push_back(make_gaussian(std::move(mean), cov));
    }
    scenario.jitter_mean_std = jitter;
    scenario.jitter_cov_log_std = jitter;
    scenario.group = GroupSpec{GroupKind::Symmetric, 5};
    scenario.seed = seed;
    return scenario;
}

void MeanTupleScenario::validate() const {
    if (true_tuple.empty()) throw ContractError("MeanTupleScenario: empty tuple");
    if (jitter_std < 0) throw ContractError("MeanTupleScenario: jitter must be nonnegative");
    if (group.degree != static_cast<int>(true_tuple.size())) {
        throw ContractError("MeanTupleScenario: group degree must match tuple length");
    }
    const Eigen::Index d = true_tuple.front().size();
    for (const auto& f : true_tuple) {
        if (f.size() != d) throw ContractError("MeanTupleScenario: ragged tuple");
    }
}

MeanTupleStream::MeanTupleStream(MeanTupleScenario scenario, bool apply_action)
    : scenario_(std::move(scenario)), apply_action_(apply_action), rng_(scenario_.seed) {
    scenario_.validate();
}

std::optional<ProductPoint> MeanTupleStream::next() {
    std::normal_distribution<double> normal(0.0, 1.0);
    ProductPoint tuple = scenario_.true_tuple;
    for (auto& f : tuple) {
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            f(i) += scenario_.jitter_std * normal(rng_);
        }
    }
    const GroupElement g = random_element(scenario_.group, rng_);
    if (!apply_action_) return tuple;
    return qb::apply(g, tuple);
}

MeanTupleScenario means1d_scenario(std::uint64_t seed, double jitter) {
    MeanTupleScenario scenario;
    for (const double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        scenario.true_tuple.push_back(Eigen::VectorXd::Constant(1, m));
    }
    scenario.jitter_std = jitter;
    scenario.group = GroupSpec{GroupKind::Symmetric, 5};
    scenario.seed = seed;
    return scenario;
}

void MraScenario::validate() const {
    if (signal.size() < 2) throw ContractError("MraScenario: signal length must be >= 2");
    if (noise_std < 0) throw ContractError("MraScenario: noise std must be nonnegative");
    if (num_observations < 1) throw ContractError("MraScenario: need at least one observation");
}

MraObservations mra_generate_with_shifts(const MraScenario& scenario) {
    scenario.validate();
    const int k = static_cast<int>(scenario.signal.size());
    std::mt19937_64 rng(scenario.seed);
    std::uniform_int_distribution<int> shift_dist(0, k - 1);
    std::normal_distribution<double> normal(0.0, 1.0);

    MraObservations out;
    out.observations.reserve(static_cast<std::size_t>(scenario.num_observations));
    out.shifts.reserve(static_cast<std::size_t>(scenario.num_observations));
    for (int m = 0; m < scenario.num_observations; ++m) {
        const int s = shift_dist(rng);
        Eigen::VectorXd y = apply(GroupElement::cyclic_shift(k, s), scenario.signal);
        for (int i = 0; i < k; ++i) y(i) += scenario.noise_std * normal(rng);
        out.observations.push_back(std::move(y));
        out.shifts.push_back(s);
    }
    return out;
}

std::vector<Eigen::VectorXd> mra_generate(const MraScenario& scenario) {
    return mra_generate_with_shifts(scenario).observations;
}

std::vector<int> gibbs_sample_shifts(const std::vector<Eigen::VectorXd>& observations,
                                     const Eigen::VectorXd& signal, double sigma,
                                     std::mt19937_64& rng) {
    if (observations.empty()) throw ContractError("gibbs_sample_shifts: no observations");
    if (sigma <= 0) throw ContractError("gibbs_sample_shifts: sigma must be positive");
    const int k = static_cast<int>(signal.size());

    std::vector<Eigen::VectorXd> shifted;
    shifted.reserve(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s) {
        shifted.push_back(apply(GroupElement::cyclic_shift(k, s), signal));
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> shifts(observations.size(), 0);
    Eigen::VectorXd sq_dist(k);
    for (std::size_t j = 0; j < observations.size(); ++j) {
        for (int s = 0; s < k; ++s) {
            sq_dist(s) = (observations[j] - shifted[static_cast<std::size_t>(s)]).squaredNorm();
        }
        // Stabilize: subtract the minimum before exponentiating.
        const double base = sq_dist.minCoeff();
        Eigen::VectorXd weights(k);
        for (int s = 0; s < k; ++s) {
            weights(s) = std::exp(-(sq_dist(s) - base) / (2.0 * sigma * sigma));
        }
        const double total = weights.sum();
        double u = unit(rng) * total;
        int chosen = k - 1;
        for (int s = 0; s < k; ++s) {
            u -= weights(s);
            if (u <= 0) {
                chosen = s;
                break;
            }
        }
        shifts[j] = chosen;
    }
    return shifts;
}

Eigen::VectorXd gibbs_sample_signal(const std::vector<Eigen::VectorXd>& observations,
                                    const std::vector<int>& shifts, double sigma,
                                    std::mt19937_64& rng) {
    if (observations.empty()) throw ContractError("gibbs_sample_signal: no observations");
    if (shifts.size() != observations.size()) {
        throw ContractError("gibbs_sample_signal: shifts do not match observations");
    }
    const int k = static_cast<int>(observations.front().size());
    Eigen::VectorXd aligned_mean = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < observations.size(); ++j) {
        const GroupElement inv = GroupElement::cyclic_shift(k, shifts[j]).inverse();
        aligned_mean += apply(inv, observations[j]);
    }
    aligned_mean /= static_cast<double>(observations.size());

    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = sigma / std::sqrt(static_cast<double>(observations.size()));
    Eigen::VectorXd draw(k);
    for (int i = 0; i < k; ++i) draw(i) = aligned_mean(i) + scale * normal(rng);
    return draw;
}

GibbsStream::GibbsStream(std::vector<Eigen::VectorXd> observations, double sigma, long iters,
                         std::uint64_t seed)
    : observations_(std::move(observations)), sigma_(sigma), remaining_(iters), rng_(seed) {
    if (observations_.empty()) throw ContractError("mra_gibbs: no observations");
    if (sigma <= 0) throw ContractError("mra_gibbs: sigma must be positive");
    if (iters < 1) throw ContractError("mra_gibbs: need at least one sweep");
    signal_ = observations_.front();
}

std::optional<Eigen::VectorXd> GibbsStream::next() {
    if (remaining_ <= 0) return std::nullopt;
    --remaining_;
    const std::vector<int> shifts = gibbs_sample_shifts(observations_, signal_, sigma_, rng_);
    signal_ = gibbs_sample_signal(observations_, shifts, sigma_, rng_);
    return signal_;
}

Eigen::VectorXd mra_reconstruct(SampleStream<Eigen::VectorXd>& signal_draws,
                                const SgdConfig& cfg) {
    std::vector<Eigen::VectorXd> draws;
    while (auto d = signal_draws.next()) draws.push_back(std::move(*d));
    if (draws.empty()) throw ContractError("mra_reconstruct: no draws");
    const int k = static_cast<int>(draws.front().size());
    for (const auto& d : draws) {
        if (d.size() != k) throw ContractError("mra_reconstruct: draws of unequal length");
    }

    std::vector<ProductPoint> tuples;
    tuples.reserve(draws.size());
    for (const auto& d : draws) {
        ProductPoint t(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) t[static_cast<std::size_t>(i)] = d.segment(i, 1);
        tuples.push_back(std::move(t));
    }

    const EuclideanManifold line(1);
    const GroupSpec cyclic{GroupKind::Cyclic, k};
    VectorStream<ProductPoint> stream(tuples, /*cycle=*/true);
    const auto report = sgd_quotient(stream, line, cyclic, cfg);

    Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < draws.size(); ++j) {
        const auto alignment = align_cyclic(line, report.estimate, tuples[j]);
        total += apply(alignment.element, draws[j]);
    }
    return total / static_cast<double>(draws.size());
}

double snr(const Eigen::VectorXd& x, double sigma) {
    if (sigma <= 0) throw ContractError("snr: sigma must be positive");
    const double energy = x.squaredNorm();
    if (energy == 0) throw ContractError("snr: signal must be nonzero");
    return energy / (static_cast<double>(x.size()) * sigma * sigma);
}

double relative_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                      const GroupSpec& G) {
    if (estimate.size() != truth.size()) throw ContractError("relative_error: length mismatch");
    if (G.degree != truth.size()) {
        throw ContractError("relative_error: group degree must match signal length");
    }
    const double norm = truth.norm();
    if (norm == 0) throw ContractError("relative_error: truth must be nonzero");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : group_elements(G)) {
        best = std::min(best, (estimate - apply(g, truth)).norm() / norm);
    }
    return best;
}

Eigen::VectorXd default_mra_template(int length, std::uint64_t seed) {
    if (length < 2) throw ContractError("default_mra_template: length must be >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(length);
    for (int i = 0; i < length; ++i) x(i) = normal(rng);
    const double norm = x.norm();
    if (norm < 1e-9) throw ContractError("default_mra_template: degenerate draw");
    return x * (std::sqrt(static_cast<double>(length)) / norm);
}

} // namespace qb
