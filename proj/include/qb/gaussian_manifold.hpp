#pragma once

#include "qb/bures.hpp"
#include "qb/manifold.hpp"

namespace qb {

/// Tuple of mixture components; one draw of a K-component Gaussian mixture.
using GaussianTuple = std::vector<GaussianComponent>;

/// The product R^d x SPD(d) with the Gaussian 2-Wasserstein metric, exposed
/// through the manifold contract. Coordinates are the mean followed by the
/// column-major covariance entries, so dim() = d + d*d.
class GaussianManifold final : public Manifold {
public:
    explicit GaussianManifold(Eigen::Index ambient_dim);

    Eigen::Index ambient_dim() const { return d_; }

    Point to_point(const GaussianComponent& c) const;
    /// Inverse of to_point; recomputes a fresh Cholesky factor.
    GaussianComponent to_component(const Point& p) const;

    double tangent_norm(const TangentVector& v) const override;

protected:
    double dist_impl(const Point& p, const Point& q) const override;
    Point exp_impl(const Point& p, const TangentVector& v) const override;
    TangentVector log_impl(const Point& p, const Point& q) const override;

private:
    Eigen::VectorXd mean_part(const Point& p) const { return p.head(d_); }
    Eigen::MatrixXd cov_part(const Point& p) const;

    Eigen::Index d_;
};

/// Embed a mixture draw as a configuration-space tuple over the Gaussian
/// manifold, so alignment and quotient distances reuse the generic paths.
ProductPoint to_product_point(const GaussianManifold& m, const GaussianTuple& tuple);
GaussianTuple to_gaussian_tuple(const GaussianManifold& m, const ProductPoint& p);

} // namespace qb
