#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pexstab/control.hpp"
#include "pexstab/domain.hpp"
#include "pexstab/funcspace.hpp"
#include "pexstab/stabilizer.hpp"

namespace pexstab {

/// splitmix64; the noise stream is identical on every platform for a given seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline constexpr double kPivotTolerance = 1e-9;

/// Orthonormal basis of the right nullspace, via full-pivot LU with a relative
/// pivot threshold.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double pivot_tol = kPivotTolerance);

/// Linear constraints whose nullspace is the solution space. Modular carriers use
/// one unknown per point; lattices use the scalar polynomial coefficients
/// (c, l_1..l_d, a_ij for i <= j) with rows from the grid {-1,0,1}^(2d), which is
/// unisolvent for the degree-2 constraint polynomials.
Eigen::MatrixXd quadratic_constraints(const GroupK& group);
Eigen::MatrixXd jensen_constraints(const GroupK& group, bool with_side_condition);

struct SolutionBasis {
    std::vector<FuncRep> elements;  // scalar-valued (r = 1)
    double max_residual = 0.0;      // over all constraint rows

    int dimension() const { return static_cast<int>(elements.size()); }
};

SolutionBasis quadratic_solution_space(const GroupK& group);
SolutionBasis jensen_solution_space(const GroupK& group, bool with_side_condition);

/// f = q + j + a + b, g = q + j + a, h = q + b. Throws LawViolation when q or j
/// fail their equations (or j the side condition) on the enumeration.
PexiderTriple make_exact_triple(const FuncRep& q, const FuncRep& j, const Value& a, const Value& b,
                                const GroupK& group, BetaParam beta);

struct NoiseTargets {
    bool f = true;
    bool g = false;
    bool h = false;
};

struct PerturbOptions {
    double delta = 0.0;
    std::uint64_t seed = 0;
    double support_radius = 0.0;  // noise at points with ||x|| <= radius
    NoiseTargets targets;
    bool zero_at_origin = true;
    std::optional<double> power;  // request a power certificate with this exponent
};

struct Perturbed {
    PexiderTriple triple;
    ControlFn certificate;
    double theta_star;
    bool degenerate;  // theta_star == 0; downstream needs phi > 0
};

/// Adds uniform noise in [-delta, delta]^r at the (K-closed) support and returns
/// the smallest constant or power certificate for the perturbed triple.
Perturbed perturb(const PexiderTriple& triple, const GroupK& group, BetaParam beta, const PerturbOptions& options);

}  // namespace pexstab
