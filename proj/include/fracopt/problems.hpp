#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracopt/fdesolve.hpp"
#include "fracopt/fracops.hpp"

namespace fracopt {

/// Differentiable cost function with an analytic gradient.
struct Objective {
    std::string name;
    int dimension = 0;
    std::function<double(const State&)> eval;
    std::function<State(const State&)> gradient;
    std::optional<State> known_optimum;
    std::optional<double> known_minimum;
    /// Set for scalar polynomial objectives; enables closed-form fractional
    /// operators in FGDM.
    std::optional<Polynomial> polynomial;
};

/// f(u) = (u - c)^2
Objective make_quadratic(double c);

enum class NodeRule {
    /// x_j = (j + 1) / (m + 2)
    InteriorUniform,
    /// Chebyshev points of the first kind mapped into (0, 1).
    Chebyshev,
};

struct VandermondeSpec {
    int degree = 0;
    std::vector<double> nodes;
    State u_true;
    /// Row-major (m+1) x (m+1), X[i][j] = x_i^(m-j).
    std::vector<double> matrix;
    State target;

    int size() const noexcept { return degree + 1; }
    double at(int i, int j) const { return matrix[static_cast<std::size_t>(i * size() + j)]; }
    /// X u - g
    State residual(const State& u) const;
};

struct VandermondeProblem {
    Objective objective;
    VandermondeSpec spec;
};

/// Alternating +1, -1, +1, ... of length m + 1.
State alternating_coefficients(int m);

/// Uniform on [-1, 1], seeded.
State seeded_coefficients(int m, std::uint64_t seed);

/// f(u) = ||X u - g||^2 with g = X u_true.
VandermondeProblem make_vandermonde(int m, NodeRule rule, const State& u_true);
VandermondeProblem make_vandermonde(int m, NodeRule rule, std::uint64_t seed);
/// Explicit nodes; throws ConfigError on duplicates or nodes outside (0, 1).
VandermondeProblem make_vandermonde(const std::vector<double>& nodes, const State& u_true);

/// Charge positions from the 2N angle vector [theta_1..theta_N, phi_1..phi_N].
struct ThomsonSpec {
    int charges = 0;

    struct Point {
        double x, y, z;
    };

    std::vector<Point> cartesian(const State& angles) const;
    /// Sum over pairs of 1/d_ij; throws SingularityError on coincident charges.
    double energy(const State& angles) const;
    State gradient(const State& angles) const;
};

struct ThomsonProblem {
    Objective objective;
    ThomsonSpec spec;
};

/// Known global minima for N in {4, 5, 6, 12}.
std::optional<double> thomson_reference_energy(int charges);

ThomsonProblem make_thomson(int charges);

/// Seeded configuration, uniform on the sphere per point, with every pair
/// at least 1e-3 rad apart.
State random_sphere_configuration(int charges, std::uint64_t seed);

/// `i,x,y,z` rows for the final charge positions.
void write_thomson_csv(std::ostream& os, const ThomsonSpec& spec, const State& angles);

/// Central-difference gradient with step 1e-6 (1 + ||u||_inf).
State central_difference_gradient(const Objective& objective, const State& u);

}  // namespace fracopt
