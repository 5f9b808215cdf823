#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "qb/errors.hpp"
#include "qb/tolerances.hpp"

namespace qb {

/// A point is a dense coordinate vector; the manifold instance owns the
/// interpretation and the dimension.
using Point = Eigen::VectorXd;

/// Tangent vector with its base point attached, so exp can verify that the
/// vector actually lives where it claims to.
struct TangentVector {
    Eigen::VectorXd components;
    Point base_point;
};

/// A configuration-space point: an ordered tuple of factor points, all on
/// the same factor manifold.
using ProductPoint = std::vector<Point>;

/// Metric-space contract used by every algorithm: geodesic distance,
/// exponential map and its inverse.
class Manifold {
public:
    virtual ~Manifold() = default;

    Eigen::Index dim() const { return dim_; }

    double dist(const Point& p, const Point& q) const;
    Point exp(const Point& p, const TangentVector& v) const;
    TangentVector log(const Point& p, const Point& q) const;

    /// Norm of v in the metric at its base point. Flat instances use the
    /// coordinate norm.
    virtual double tangent_norm(const TangentVector& v) const;

protected:
    explicit Manifold(Eigen::Index dim);

    virtual double dist_impl(const Point& p, const Point& q) const = 0;
    virtual Point exp_impl(const Point& p, const TangentVector& v) const = 0;
    virtual TangentVector log_impl(const Point& p, const Point& q) const = 0;

    void require_point(const Point& p, const char* what) const;

private:
    Eigen::Index dim_;
};

/// R^d with the standard metric.
class EuclideanManifold final : public Manifold {
public:
    explicit EuclideanManifold(Eigen::Index dim);

protected:
    double dist_impl(const Point& p, const Point& q) const override;
    Point exp_impl(const Point& p, const TangentVector& v) const override;
    TangentVector log_impl(const Point& p, const Point& q) const override;
};

/// K-fold product of one factor manifold with the product metric. Points
/// are the concatenated factor coordinates; split/join convert to the
/// tuple form used by the group machinery.
class ProductManifold final : public Manifold {
public:
    ProductManifold(std::shared_ptr<const Manifold> factor, int count);

    const Manifold& factor() const { return *factor_; }
    int count() const { return count_; }

    Point join(const ProductPoint& tuple) const;
    ProductPoint split(const Point& p) const;

    double tangent_norm(const TangentVector& v) const override;

protected:
    double dist_impl(const Point& p, const Point& q) const override;
    Point exp_impl(const Point& p, const TangentVector& v) const override;
    TangentVector log_impl(const Point& p, const Point& q) const override;

private:
    std::shared_ptr<const Manifold> factor_;
    int count_;
};

/// Squared product distance sum_i dist(p_i, q_i)^2 for tuples over a shared
/// factor manifold.
double product_dist_sq(const Manifold& factor, const ProductPoint& p, const ProductPoint& q);
double product_dist(const Manifold& factor, const ProductPoint& p, const ProductPoint& q);

/// Configuration-space check: all factors pairwise distinct. Callers opt in
/// (typically behind a diagnostics flag); the SGD loop does not pay for it
/// on every step.
void validate_configuration(const Manifold& factor, const ProductPoint& p);

} // namespace qb
