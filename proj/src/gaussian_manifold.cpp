#include "qb/gaussian_manifold.hpp"

#include <cmath>

namespace qb {

GaussianManifold::GaussianManifold(Eigen::Index ambient_dim)
    : Manifold(ambient_dim + ambient_dim * ambient_dim), d_(ambient_dim) {
    if (ambient_dim < 1) throw ContractError("GaussianManifold: ambient dimension must be positive");
}

Eigen::MatrixXd GaussianManifold::cov_part(const Point& p) const {
    return Eigen::Map<const Eigen::MatrixXd>(p.data() + d_, d_, d_);
}

Point GaussianManifold::to_point(const GaussianComponent& c) const {
    if (c.dim() != d_) throw ContractError("GaussianManifold::to_point: dimension mismatch");
    Point out(dim());
    out.head(d_) = c.mean;
    Eigen::Map<Eigen::MatrixXd>(out.data() + d_, d_, d_) = c.covariance;
    return out;
}

GaussianComponent GaussianManifold::to_component(const Point& p) const {
    require_point(p, "to_component");
    return make_gaussian(mean_part(p), cov_part(p));
}

double GaussianManifold::dist_impl(const Point& p, const Point& q) const {
    const double mean_sq = (mean_part(p) - mean_part(q)).squaredNorm();
    return std::sqrt(mean_sq + bures_distance_sq(cov_part(p), cov_part(q)));
}

Point GaussianManifold::exp_impl(const Point& p, const TangentVector& v) const {
    Point out(dim());
    out.head(d_) = mean_part(p) + v.components.head(d_);
    const Eigen::MatrixXd xi =
        Eigen::Map<const Eigen::MatrixXd>(v.components.data() + d_, d_, d_);
    Eigen::Map<Eigen::MatrixXd>(out.data() + d_, d_, d_) =
        bures_exp(cov_part(p), symmetrized(xi));
    return out;
}

TangentVector GaussianManifold::log_impl(const Point& p, const Point& q) const {
    Eigen::VectorXd components(dim());
    components.head(d_) = mean_part(q) - mean_part(p);
    Eigen::Map<Eigen::MatrixXd>(components.data() + d_, d_, d_) =
        bures_log(cov_part(p), cov_part(q));
    return TangentVector{std::move(components), p};
}

double GaussianManifold::tangent_norm(const TangentVector& v) const {
    const double mean_sq = v.components.head(d_).squaredNorm();
    const Eigen::MatrixXd xi =
        Eigen::Map<const Eigen::MatrixXd>(v.components.data() + d_, d_, d_);
    const Eigen::MatrixXd S =
        Eigen::Map<const Eigen::MatrixXd>(v.base_point.data() + d_, d_, d_);
    return std::sqrt(mean_sq + spd_tangent_norm_sq(S, symmetrized(xi)));
}

ProductPoint to_product_point(const GaussianManifold& m, const GaussianTuple& tuple) {
    ProductPoint out;
    out.reserve(tuple.size());
    for (const auto& c : tuple) out.push_back(m.to_point(c));
    return out;
}

GaussianTuple to_gaussian_tuple(const GaussianManifold& m, const ProductPoint& p) {
    GaussianTuple out;
    out.reserve(p.size());
    for (const auto& pt : p) out.push_back(m.to_component(pt));
    return out;
}

} // namespace qb
