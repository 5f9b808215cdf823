#include "qb/manifold.hpp"

#include <cmath>
#include <sstream>

namespace qb {

Manifold::Manifold(Eigen::Index dim) : dim_(dim) {
    if (dim < 1) throw ContractError("Manifold: dimension must be positive");
}

void Manifold::require_point(const Point& p, const char* what) const {
    if (p.size() != dim_) {
        std::ostringstream os;
        os << what << ": point has dimension " << p.size() << ", manifold expects " << dim_;
        throw ContractError(os.str());
    }
    if (!p.allFinite()) {
        throw ContractError(std::string(what) + ": point has non-finite coordinates");
    }
}

double Manifold::dist(const Point& p, const Point& q) const {
    require_point(p, "dist");
    require_point(q, "dist");
    return dist_impl(p, q);
}

Point Manifold::exp(const Point& p, const TangentVector& v) const {
    require_point(p, "exp");
    if (v.components.size() != dim_) {
        throw ContractError("exp: tangent vector dimension mismatch");
    }
    if (v.base_point.size() != p.size() || v.base_point != p) {
        throw ContractError("exp: tangent vector is not based at p");
    }
    return exp_impl(p, v);
}

TangentVector Manifold::log(const Point& p, const Point& q) const {
    require_point(p, "log");
    require_point(q, "log");
    return log_impl(p, q);
}

double Manifold::tangent_norm(const TangentVector& v) const {
    return v.components.norm();
}

EuclideanManifold::EuclideanManifold(Eigen::Index dim) : Manifold(dim) {}

double EuclideanManifold::dist_impl(const Point& p, const Point& q) const {
    return (p - q).norm();
}

Point EuclideanManifold::exp_impl(const Point& p, const TangentVector& v) const {
    return p + v.components;
}

TangentVector EuclideanManifold::log_impl(const Point& p, const Point& q) const {
    return TangentVector{q - p, p};
}

ProductManifold::ProductManifold(std::shared_ptr<const Manifold> factor, int count)
    : Manifold(factor == nullptr ? 1 : factor->dim() * count),
      factor_(std::move(factor)),
      count_(count) {
    if (factor_ == nullptr) throw ContractError("ProductManifold: null factor");
    if (count < 1) throw ContractError("ProductManifold: need at least one factor");
}

Point ProductManifold::join(const ProductPoint& tuple) const {
    if (static_cast<int>(tuple.size()) != count_) {
        throw ContractError("ProductManifold::join: wrong tuple length");
    }
    Point out(dim());
    const Eigen::Index d = factor_->dim();
    for (int i = 0; i < count_; ++i) {
        if (tuple[i].size() != d) {
            throw ContractError("ProductManifold::join: factor dimension mismatch");
        }
        out.segment(i * d, d) = tuple[i];
    }
    return out;
}

ProductPoint ProductManifold::split(const Point& p) const {
    require_point(p, "split");
    const Eigen::Index d = factor_->dim();
    ProductPoint out(count_);
    for (int i = 0; i < count_; ++i) out[i] = p.segment(i * d, d);
    return out;
}

double ProductManifold::dist_impl(const Point& p, const Point& q) const {
    return product_dist(*factor_, split(p), split(q));
}

Point ProductManifold::exp_impl(const Point& p, const TangentVector& v) const {
    const Eigen::Index d = factor_->dim();
    Point out(dim());
    for (int i = 0; i < count_; ++i) {
        const Point base = p.segment(i * d, d);
        const TangentVector vi{v.components.segment(i * d, d), base};
        out.segment(i * d, d) = factor_->exp(base, vi);
    }
    return out;
}

TangentVector ProductManifold::log_impl(const Point& p, const Point& q) const {
    const Eigen::Index d = factor_->dim();
    Eigen::VectorXd components(dim());
    for (int i = 0; i < count_; ++i) {
        components.segment(i * d, d) =
            factor_->log(p.segment(i * d, d), q.segment(i * d, d)).components;
    }
    return TangentVector{std::move(components), p};
}

double ProductManifold::tangent_norm(const TangentVector& v) const {
    const Eigen::Index d = factor_->dim();
    double sq = 0.0;
    for (int i = 0; i < count_; ++i) {
        const TangentVector vi{v.components.segment(i * d, d),
                               v.base_point.segment(i * d, d)};
        const double n = factor_->tangent_norm(vi);
        sq += n * n;
    }
    return std::sqrt(sq);
}

double product_dist_sq(const Manifold& factor, const ProductPoint& p, const ProductPoint& q) {
    if (p.size() != q.size() || p.empty()) {
        throw ContractError("product_dist_sq: tuple length mismatch");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = factor.dist(p[i], q[i]);
        sq += d * d;
    }
    return sq;
}

double product_dist(const Manifold& factor, const ProductPoint& p, const ProductPoint& q) {
    return std::sqrt(product_dist_sq(factor, p, q));
}

void validate_configuration(const Manifold& factor, const ProductPoint& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (factor.dist(p[i], p[j]) <= 0.0) {
                std::ostringstream os;
                os << "configuration-space violation: factors " << i << " and " << j
                   << " coincide";
                throw ContractError(os.str());
            }
        }
    }
}

} // namespace qb
