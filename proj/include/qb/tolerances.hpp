#pragma once

namespace qb {

/// Numeric tolerances shared between the library and its tests, so both
/// sides agree on what "equal" means.
struct Tolerances {
    /// dist(p,p) and symmetry drift are accepted up to this absolute value.
    double identity = 1e-12;
    /// exp/log roundtrip error on flat manifolds (relative).
    double roundtrip = 1e-10;
    /// exp/log roundtrip error for the covariance geometry (relative).
    double spd_roundtrip = 1e-8;
    /// Relative Frobenius asymmetry accepted before a matrix is rejected
    /// as non-symmetric.
    double symmetry = 1e-10;
    /// Eigenvalues of nominally-SPD matrices are clamped at this floor.
    double eigen_floor = 1e-12;
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

} // namespace qb
