#pragma once

#include <Eigen/Dense>

#include <vector>

#include "qb/manifold.hpp"

namespace qb {

enum class GroupKind {
    Symmetric, ///< all permutations of the K factors
    Cyclic,    ///< cyclic shifts only
    Trivial    ///< identity only (alignment disabled)
};

struct GroupSpec {
    GroupKind kind = GroupKind::Symmetric;
    int degree = 1;

    long long order() const;
};

/// A concrete group element stored as the induced index permutation, so one
/// apply path serves the symmetric and cyclic cases alike.
class GroupElement {
public:
    explicit GroupElement(std::vector<int> mapping);

    static GroupElement identity(int degree);
    static GroupElement cyclic_shift(int degree, int shift);

    int degree() const { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& mapping() const { return map_; }

    bool is_identity() const;
    GroupElement inverse() const;

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.map_ == b.map_;
    }

private:
    std::vector<int> map_;
};

/// apply(compose(g,h), p) == apply(g, apply(h, p)).
GroupElement compose(const GroupElement& g, const GroupElement& h);

/// Index action on tuples: factor i of the result is factor g(i) of the
/// input. Acts by isometry on any product manifold.
ProductPoint apply(const GroupElement& g, const ProductPoint& p);

/// Same action on a flat vector of K scalar entries (signals under cyclic
/// shifts).
Eigen::VectorXd apply(const GroupElement& g, const Eigen::VectorXd& x);

/// All elements of G in canonical order (lexicographic permutations for the
/// symmetric group, ascending shifts for the cyclic group). Refuses groups
/// with more than 5040 elements; use the alignment operations instead.
std::vector<GroupElement> group_elements(const GroupSpec& G);

/// The |G| images of p under the group, in canonical element order.
std::vector<ProductPoint> orbit(const ProductPoint& p, const GroupSpec& G);

struct AlignmentResult {
    GroupElement element;
    double cost = 0.0; ///< squared product distance after alignment
};

/// Exact linear assignment: the permutation sigma minimizing
/// sum_i cost(i, sigma(i)), Hungarian algorithm with potentials, O(K^3).
/// The reported cost is recomputed as the direct sum over the returned
/// permutation so it matches a brute-force oracle bit for bit.
AlignmentResult solve_lap(const Eigen::MatrixXd& cost);

/// Exhaustive minimizer over all of G; ties break toward the earliest
/// element in canonical order. Test oracle for the fast paths.
AlignmentResult brute_force_align(const Manifold& factor, const ProductPoint& p,
                                  const ProductPoint& q, const GroupSpec& G);

/// Optimal permutation aligning q to p over the full symmetric group, via
/// the assignment problem with costs dist(p_i, q_j)^2.
AlignmentResult align_symmetric(const Manifold& factor, const ProductPoint& p,
                                const ProductPoint& q);

/// Best of the K cyclic shifts of q; ties break toward the smallest shift.
AlignmentResult align_cyclic(const Manifold& factor, const ProductPoint& p,
                             const ProductPoint& q);

/// Dispatch on the group kind (Trivial aligns with the identity).
AlignmentResult align(const Manifold& factor, const ProductPoint& p, const ProductPoint& q,
                      const GroupSpec& G);

/// Distance between the orbits of p and q: the aligned product distance.
double quotient_distance(const Manifold& factor, const ProductPoint& p, const ProductPoint& q,
                         const GroupSpec& G);

/// 1D shortcut for the symmetric group: order q the way p is ordered.
/// Requires 1D factors; cost agrees exactly with align_symmetric.
AlignmentResult sort_align_1d(const ProductPoint& p, const ProductPoint& q);

} // namespace qb
