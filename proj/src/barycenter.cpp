#include "qb/barycenter.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "qb/errors.hpp"
#include "qb/log.hpp"

namespace qb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
T draw_or_throw(SampleStream<T>& sampler, long consumed, const char* what) {
    auto value = sampler.next();
    if (!value.has_value()) {
        std::ostringstream os;
        os << what << ": sampler exhausted after " << consumed << " draws";
        throw ContractError(os.str());
    }
    return std::move(*value);
}

template <class T>
std::vector<T> draw_eval_set(SampleStream<T>& sampler, int count, const char* what) {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(draw_or_throw(sampler, i, what));
    return out;
}

bool should_trace(long t, const SgdConfig& cfg) {
    return cfg.eval_set_size > 0 &&
           (t == 1 || t == cfg.iterations || t % cfg.trace_every == 0);
}

} // namespace

double StepSchedule::at(long t) const {
    const long shift = kind == ScheduleKind::ShiftedHarmonic ? offset : 0;
    return scale / static_cast<double>(t + shift);
}

void StepSchedule::validate() const {
    if (scale <= 0.0) throw ContractError("StepSchedule: scale must be positive");
    if (offset < 0) throw ContractError("StepSchedule: offset must be nonnegative");
}

void SgdConfig::validate() const {
    if (iterations < 1) throw ContractError("SgdConfig: iterations must be >= 1");
    if (trace_every < 1) throw ContractError("SgdConfig: trace_every must be >= 1");
    if (eval_set_size < 0) throw ContractError("SgdConfig: eval_set_size must be >= 0");
    if (max_step_retries < 0) throw ContractError("SgdConfig: max_step_retries must be >= 0");
    schedule.validate();
}

double estimate_objective(const Manifold& factor, const ProductPoint& candidate,
                          const std::vector<ProductPoint>& samples, const GroupSpec& G) {
    if (samples.empty()) throw ContractError("estimate_objective: empty sample list");
    double total = 0.0;
    for (const auto& s : samples) total += align(factor, candidate, s, G).cost;
    return total / static_cast<double>(samples.size());
}

SgdReport<Point> sgd_mean(SampleStream<Point>& sampler, const Manifold& manifold,
                          const SgdConfig& cfg, const std::optional<Point>& init) {
    cfg.validate();
    const auto eval_set = draw_eval_set(sampler, cfg.eval_set_size, "sgd_mean");

    SgdReport<Point> report;
    report.config = cfg;
    report.group = GroupSpec{GroupKind::Trivial, 1};

    const auto start = Clock::now();
    long consumed = cfg.eval_set_size;
    Point p = init.has_value() ? *init : draw_or_throw(sampler, consumed++, "sgd_mean");

    Point tail_sum;
    long tail_count = 0;
    const long tail_start = cfg.iterations - cfg.iterations / 2 + 1;

    for (long t = 1; t <= cfg.iterations; ++t) {
        const Point q = draw_or_throw(sampler, consumed++, "sgd_mean");
        double eta = cfg.schedule.at(t);
        TangentVector v = manifold.log(p, q);
        for (int attempt = 0;; ++attempt) {
            try {
                TangentVector step{(eta * v.components).eval(), p};
                p = manifold.exp(p, step);
                break;
            } catch (const StepTooLargeError&) {
                if (attempt >= cfg.max_step_retries) throw;
                eta /= 2.0;
            }
        }
        if (cfg.tail_average && t >= tail_start) {
            if (tail_count == 0) tail_sum = Point::Zero(p.size());
            tail_sum += p;
            ++tail_count;
        }
        if (should_trace(t, cfg)) {
            double obj = 0.0;
            for (const auto& e : eval_set) {
                const double d = manifold.dist(p, e);
                obj += d * d;
            }
            report.objective_trace.emplace_back(t, obj / static_cast<double>(eval_set.size()));
        }
    }
    report.wall_time_s = seconds_since(start);
    report.estimate = cfg.tail_average && tail_count > 0
                          ? Point((tail_sum / static_cast<double>(tail_count)).eval())
                          : p;
    return report;
}

SgdReport<ProductPoint> sgd_quotient(SampleStream<ProductPoint>& sampler, const Manifold& factor,
                                     const GroupSpec& G, const SgdConfig& cfg,
                                     const std::optional<ProductPoint>& init) {
    cfg.validate();
    const auto eval_set = draw_eval_set(sampler, cfg.eval_set_size, "sgd_quotient");

    SgdReport<ProductPoint> report;
    report.config = cfg;
    report.group = G;

    const auto start = Clock::now();
    long consumed = cfg.eval_set_size;
    ProductPoint p = init.has_value() ? *init : draw_or_throw(sampler, consumed++, "sgd_quotient");
    if (static_cast<int>(p.size()) != G.degree) {
        throw ContractError("sgd_quotient: tuple length does not match group degree");
    }

    std::vector<Point> tail_sum;
    long tail_count = 0;
    const long tail_start = cfg.iterations - cfg.iterations / 2 + 1;

    for (long t = 1; t <= cfg.iterations; ++t) {
        const ProductPoint q = draw_or_throw(sampler, consumed++, "sgd_quotient");
        if (cfg.check_configuration) validate_configuration(factor, q);
        const ProductPoint aligned = qb::apply(align(factor, p, q, G).element, q);
        double eta = cfg.schedule.at(t);
        for (int attempt = 0;; ++attempt) {
            try {
                ProductPoint next = p;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    TangentVector v = factor.log(p[i], aligned[i]);
                    v.components *= eta;
                    next[i] = factor.exp(p[i], v);
                }
                p = std::move(next);
                break;
            } catch (const StepTooLargeError&) {
                if (attempt >= cfg.max_step_retries) throw;
                eta /= 2.0;
            }
        }
        if (cfg.tail_average && t >= tail_start) {
            if (tail_count == 0) {
                tail_sum.assign(p.size(), Point());
                for (std::size_t i = 0; i < p.size(); ++i) tail_sum[i] = Point::Zero(p[i].size());
            }
            for (std::size_t i = 0; i < p.size(); ++i) tail_sum[i] += p[i];
            ++tail_count;
        }
        if (should_trace(t, cfg)) {
            report.objective_trace.emplace_back(t, estimate_objective(factor, p, eval_set, G));
        }
    }
    report.wall_time_s = seconds_since(start);
    if (cfg.tail_average && tail_count > 0) {
        ProductPoint avg(tail_sum.size());
        for (std::size_t i = 0; i < tail_sum.size(); ++i) {
            avg[i] = tail_sum[i] / static_cast<double>(tail_count);
        }
        report.estimate = std::move(avg);
    } else {
        report.estimate = std::move(p);
    }
    return report;
}

namespace {

Eigen::MatrixXd mixture_cost(const GaussianTuple& p, const GaussianTuple& q) {
    const int k = static_cast<int>(p.size());
    Eigen::MatrixXd cost(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            cost(i, j) = gaussian_w2_sq(p[static_cast<std::size_t>(i)],
                                        q[static_cast<std::size_t>(j)]);
        }
    }
    return cost;
}

GaussianTuple mixture_step(const GaussianTuple& p, const GaussianTuple& aligned, double eta) {
    GaussianTuple next = p;
    const Eigen::Index d = p.front().dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& target = aligned[i];
        next[i].mean = p[i].mean - eta * (p[i].mean - target.mean);
        const Eigen::MatrixXd T = transport_map(p[i].covariance, target.covariance);
        Eigen::MatrixXd L = p[i].factor - eta * (id - T) * p[i].factor;
        Eigen::MatrixXd cov = symmetrized(L * L.transpose());
        if (smallest_eigenvalue(cov) < tol().eigen_floor) {
            log_warn("sgd_gaussian_mixture: covariance hit the eigen floor; clamping");
            const GaussianComponent repaired = make_gaussian(next[i].mean, cov);
            cov = repaired.covariance;
            L = repaired.factor;
        }
        next[i].covariance = std::move(cov);
        next[i].factor = std::move(L);
    }
    return next;
}

} // namespace

SgdReport<GaussianTuple> sgd_gaussian_mixture(SampleStream<GaussianTuple>& sampler,
                                              const GroupSpec& G, const SgdConfig& cfg,
                                              const std::optional<GaussianTuple>& init) {
    cfg.validate();
    const auto eval_set = draw_eval_set(sampler, cfg.eval_set_size, "sgd_gaussian_mixture");

    SgdReport<GaussianTuple> report;
    report.config = cfg;
    report.group = G;

    const auto start = Clock::now();
    long consumed = cfg.eval_set_size;
    GaussianTuple p =
        init.has_value() ? *init : draw_or_throw(sampler, consumed++, "sgd_gaussian_mixture");
    if (static_cast<int>(p.size()) != G.degree) {
        throw ContractError("sgd_gaussian_mixture: tuple length does not match group degree");
    }

    const GaussianManifold gm(p.front().dim());
    std::vector<ProductPoint> eval_points;
    eval_points.reserve(eval_set.size());
    for (const auto& e : eval_set) eval_points.push_back(to_product_point(gm, e));

    GaussianTuple tail_sum;
    long tail_count = 0;
    const long tail_start = cfg.iterations - cfg.iterations / 2 + 1;

    for (long t = 1; t <= cfg.iterations; ++t) {
        const GaussianTuple q = draw_or_throw(sampler, consumed++, "sgd_gaussian_mixture");
        if (q.size() != p.size()) {
            throw ContractError("sgd_gaussian_mixture: draw has wrong component count");
        }
        const GroupSpec lap_group = G;
        AlignmentResult alignment = [&] {
            switch (lap_group.kind) {
                case GroupKind::Symmetric:
                    return solve_lap(mixture_cost(p, q));
                case GroupKind::Cyclic: {
                    const int k = lap_group.degree;
                    const Eigen::MatrixXd cost = mixture_cost(p, q);
                    int best_shift = 0;
                    double best = std::numeric_limits<double>::infinity();
                    for (int s = 0; s < k; ++s) {
                        double c = 0.0;
                        for (int i = 0; i < k; ++i) c += cost(i, (i + s) % k);
                        if (c < best) {
                            best = c;
                            best_shift = s;
                        }
                    }
                    return AlignmentResult{GroupElement::cyclic_shift(k, best_shift), best};
                }
                case GroupKind::Trivial: {
                    double c = 0.0;
                    for (std::size_t i = 0; i < p.size(); ++i) c += gaussian_w2_sq(p[i], q[i]);
                    return AlignmentResult{GroupElement::identity(lap_group.degree), c};
                }
            }
            throw ContractError("sgd_gaussian_mixture: unknown group kind");
        }();

        GaussianTuple aligned(q.size());
        for (int i = 0; i < alignment.element.degree(); ++i) {
            aligned[static_cast<std::size_t>(i)] =
                q[static_cast<std::size_t>(alignment.element(i))];
        }

        double eta = cfg.schedule.at(t);
        for (int attempt = 0;; ++attempt) {
            try {
                p = mixture_step(p, aligned, eta);
                break;
            } catch (const SingularityError&) {
                if (attempt >= cfg.max_step_retries) throw;
                eta /= 2.0;
            } catch (const StepTooLargeError&) {
                if (attempt >= cfg.max_step_retries) throw;
                eta /= 2.0;
            }
        }

        if (cfg.tail_average && t >= tail_start) {
            if (tail_count == 0) {
                tail_sum = p;
                for (auto& c : tail_sum) {
                    c.mean.setZero();
                    c.covariance.setZero();
                }
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                tail_sum[i].mean += p[i].mean;
                tail_sum[i].covariance += p[i].covariance;
            }
            ++tail_count;
        }
        if (should_trace(t, cfg)) {
            const ProductPoint est = to_product_point(gm, p);
            report.objective_trace.emplace_back(t, estimate_objective(gm, est, eval_points, G));
        }
    }
    report.wall_time_s = seconds_since(start);
    if (cfg.tail_average && tail_count > 0) {
        GaussianTuple avg;
        avg.reserve(tail_sum.size());
        for (const auto& c : tail_sum) {
            avg.push_back(make_gaussian(c.mean / static_cast<double>(tail_count),
                                        symmetrized(c.covariance / static_cast<double>(tail_count))));
        }
        report.estimate = std::move(avg);
    } else {
        report.estimate = std::move(p);
    }
    return report;
}

} // namespace qb
