#include "qb/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qb/errors.hpp"

namespace qb {

namespace {

constexpr long long kEnumerationLimit = 5040; // 7!

void require_same_shape(const ProductPoint& p, const ProductPoint& q, const char* what) {
    if (p.size() != q.size() || p.empty()) {
        throw ContractError(std::string(what) + ": tuple length mismatch");
    }
}

Eigen::MatrixXd pairwise_cost(const Manifold& factor, const ProductPoint& p,
                              const ProductPoint& q) {
    const int k = static_cast<int>(p.size());
    Eigen::MatrixXd cost(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double d = factor.dist(p[static_cast<std::size_t>(i)],
                                         q[static_cast<std::size_t>(j)]);
            cost(i, j) = d * d;
        }
    }
    return cost;
}

double aligned_cost(const Manifold& factor, const ProductPoint& p, const ProductPoint& q,
                    const GroupElement& g) {
    double total = 0.0;
    for (int i = 0; i < g.degree(); ++i) {
        const double d = factor.dist(p[static_cast<std::size_t>(i)],
                                     q[static_cast<std::size_t>(g(i))]);
        total += d * d;
    }
    return total;
}

} // namespace

long long GroupSpec::order() const {
    if (degree < 1) throw ContractError("GroupSpec: degree must be positive");
    switch (kind) {
        case GroupKind::Trivial:
            return 1;
        case GroupKind::Cyclic:
            return degree;
        case GroupKind::Symmetric: {
            long long f = 1;
            for (int i = 2; i <= degree; ++i) {
                if (f > std::numeric_limits<long long>::max() / i) {
                    return std::numeric_limits<long long>::max();
                }
                f *= i;
            }
            return f;
        }
    }
    throw ContractError("GroupSpec: unknown kind");
}

GroupElement::GroupElement(std::vector<int> mapping) : map_(std::move(mapping)) {
    const int k = degree();
    if (k < 1) throw ContractError("GroupElement: empty mapping");
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (int v : map_) {
        if (v < 0 || v >= k || seen[static_cast<std::size_t>(v)]) {
            throw ContractError("GroupElement: mapping is not a permutation");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

GroupElement GroupElement::identity(int degree) {
    std::vector<int> m(static_cast<std::size_t>(degree));
    std::iota(m.begin(), m.end(), 0);
    return GroupElement(std::move(m));
}

GroupElement GroupElement::cyclic_shift(int degree, int shift) {
    if (degree < 1) throw ContractError("cyclic_shift: degree must be positive");
    const int s = ((shift % degree) + degree) % degree;
    std::vector<int> m(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) m[static_cast<std::size_t>(i)] = (i + s) % degree;
    return GroupElement(std::move(m));
}

bool GroupElement::is_identity() const {
    for (int i = 0; i < degree(); ++i) {
        if (map_[static_cast<std::size_t>(i)] != i) return false;
    }
    return true;
}

GroupElement GroupElement::inverse() const {
    std::vector<int> inv(map_.size());
    for (int i = 0; i < degree(); ++i) {
        inv[static_cast<std::size_t>(map_[static_cast<std::size_t>(i)])] = i;
    }
    return GroupElement(std::move(inv));
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    if (g.degree() != h.degree()) throw ContractError("compose: degree mismatch");
    std::vector<int> m(static_cast<std::size_t>(g.degree()));
    for (int i = 0; i < g.degree(); ++i) m[static_cast<std::size_t>(i)] = h(g(i));
    return GroupElement(std::move(m));
}

ProductPoint apply(const GroupElement& g, const ProductPoint& p) {
    if (static_cast<std::size_t>(g.degree()) != p.size()) {
        throw ContractError("apply: degree does not match tuple length");
    }
    ProductPoint out(p.size());
    for (int i = 0; i < g.degree(); ++i) {
        out[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(g(i))];
    }
    return out;
}

Eigen::VectorXd apply(const GroupElement& g, const Eigen::VectorXd& x) {
    if (g.degree() != x.size()) {
        throw ContractError("apply: degree does not match vector length");
    }
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < g.degree(); ++i) out(i) = x(g(i));
    return out;
}

std::vector<GroupElement> group_elements(const GroupSpec& G) {
    const long long n = G.order();
    if (n > kEnumerationLimit) {
        std::ostringstream os;
        os << "group of order " << n << " exceeds the enumeration limit " << kEnumerationLimit
           << "; use alignment instead of orbit materialization";
        throw EnumerationError(os.str());
    }
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(n));
    switch (G.kind) {
        case GroupKind::Trivial:
            out.push_back(GroupElement::identity(G.degree));
            break;
        case GroupKind::Cyclic:
            for (int s = 0; s < G.degree; ++s) out.push_back(GroupElement::cyclic_shift(G.degree, s));
            break;
        case GroupKind::Symmetric: {
            std::vector<int> m(static_cast<std::size_t>(G.degree));
            std::iota(m.begin(), m.end(), 0);
            do {
                out.push_back(GroupElement(m));
            } while (std::next_permutation(m.begin(), m.end()));
            break;
        }
    }
    return out;
}

std::vector<ProductPoint> orbit(const ProductPoint& p, const GroupSpec& G) {
    if (static_cast<int>(p.size()) != G.degree) {
        throw ContractError("orbit: tuple length does not match group degree");
    }
    std::vector<ProductPoint> out;
    for (const auto& g : group_elements(G)) out.push_back(qb::apply(g, p));
    return out;
}

AlignmentResult solve_lap(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols() || cost.rows() < 1) {
        throw ContractError("solve_lap: cost matrix must be square and nonempty");
    }
    if (!cost.allFinite()) {
        throw ContractError("solve_lap: cost matrix has non-finite entries");
    }
    const int n = static_cast<int>(cost.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Shortest augmenting path with potentials; 1-based with column 0 as the
    // virtual start.
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> perm(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (match[static_cast<std::size_t>(j)] != 0) {
            perm[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
        }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    return AlignmentResult{GroupElement(std::move(perm)), total};
}

AlignmentResult brute_force_align(const Manifold& factor, const ProductPoint& p,
                                  const ProductPoint& q, const GroupSpec& G) {
    require_same_shape(p, q, "brute_force_align");
    if (static_cast<int>(p.size()) != G.degree) {
        throw ContractError("brute_force_align: tuple length does not match group degree");
    }
    const auto elements = group_elements(G);
    const GroupElement* best = nullptr;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& g : elements) {
        const double c = aligned_cost(factor, p, q, g);
        if (c < best_cost) {
            best_cost = c;
            best = &g;
        }
    }
    return AlignmentResult{*best, best_cost};
}

AlignmentResult align_symmetric(const Manifold& factor, const ProductPoint& p,
                                const ProductPoint& q) {
    require_same_shape(p, q, "align_symmetric");
    return solve_lap(pairwise_cost(factor, p, q));
}

AlignmentResult align_cyclic(const Manifold& factor, const ProductPoint& p,
                             const ProductPoint& q) {
    require_same_shape(p, q, "align_cyclic");
    const int k = static_cast<int>(p.size());
    int best_shift = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < k; ++s) {
        const GroupElement g = GroupElement::cyclic_shift(k, s);
        const double c = aligned_cost(factor, p, q, g);
        if (c < best_cost) {
            best_cost = c;
            best_shift = s;
        }
    }
    return AlignmentResult{GroupElement::cyclic_shift(k, best_shift), best_cost};
}

AlignmentResult align(const Manifold& factor, const ProductPoint& p, const ProductPoint& q,
                      const GroupSpec& G) {
    if (static_cast<int>(p.size()) != G.degree) {
        throw ContractError("align: tuple length does not match group degree");
    }
    switch (G.kind) {
        case GroupKind::Symmetric:
            return align_symmetric(factor, p, q);
        case GroupKind::Cyclic:
            return align_cyclic(factor, p, q);
        case GroupKind::Trivial: {
            require_same_shape(p, q, "align");
            return AlignmentResult{GroupElement::identity(G.degree),
                                   product_dist_sq(factor, p, q)};
        }
    }
    throw ContractError("align: unknown group kind");
}

double quotient_distance(const Manifold& factor, const ProductPoint& p, const ProductPoint& q,
                         const GroupSpec& G) {
    return std::sqrt(align(factor, p, q, G).cost);
}

AlignmentResult sort_align_1d(const ProductPoint& p, const ProductPoint& q) {
    require_same_shape(p, q, "sort_align_1d");
    const int k = static_cast<int>(p.size());
    for (const auto& f : p) {
        if (f.size() != 1) throw ContractError("sort_align_1d: factors must be 1D");
    }
    for (const auto& f : q) {
        if (f.size() != 1) throw ContractError("sort_align_1d: factors must be 1D");
    }
    std::vector<int> rank_p(static_cast<std::size_t>(k));
    std::vector<int> rank_q(static_cast<std::size_t>(k));
    std::iota(rank_p.begin(), rank_p.end(), 0);
    std::iota(rank_q.begin(), rank_q.end(), 0);
    const auto by_value = [](const ProductPoint& t) {
        return [&t](int a, int b) {
            return t[static_cast<std::size_t>(a)](0) < t[static_cast<std::size_t>(b)](0);
        };
    };
    std::stable_sort(rank_p.begin(), rank_p.end(), by_value(p));
    std::stable_sort(rank_q.begin(), rank_q.end(), by_value(q));

    // Monotone matching: the r-th smallest of q goes to the slot holding the
    // r-th smallest of p.
    std::vector<int> mapping(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        mapping[static_cast<std::size_t>(rank_p[static_cast<std::size_t>(r)])] =
            rank_q[static_cast<std::size_t>(r)];
    }
    GroupElement g(std::move(mapping));
    double cost = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = p[static_cast<std::size_t>(i)](0) - q[static_cast<std::size_t>(g(i))](0);
        cost += d * d;
    }
    return AlignmentResult{std::move(g), cost};
}

} // namespace qb
