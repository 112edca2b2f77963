#include "fracopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fracopt/csv.hpp"
#include "fracopt/errors.hpp"

namespace fracopt {

namespace {

void require_dimension(const State& u, int d, const char* who) {
    if (static_cast<int>(u.size()) != d) {
        std::ostringstream os;
        os << who << ": expected a state of dimension " << d << ", got " << u.size();
        throw DomainError(os.str());
    }
}

}  // namespace

Objective make_quadratic(double c) {
    Objective obj;
    obj.name = "quadratic";
    obj.dimension = 1;
    obj.eval = [c](const State& u) {
        require_dimension(u, 1, "quadratic");
        return (u[0] - c) * (u[0] - c);
    };
    obj.gradient = [c](const State& u) {
        require_dimension(u, 1, "quadratic");
        return State{2.0 * (u[0] - c)};
    };
    obj.known_optimum = State{c};
    obj.known_minimum = 0.0;
    obj.polynomial = Polynomial::shifted_square(c);
    return obj;
}

State VandermondeSpec::residual(const State& u) const {
    const int n = size();
    State r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // X u is summed in the same order as the target, so r(u_true) is exactly 0.
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += at(i, j) * u[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = acc - target[static_cast<std::size_t>(i)];
    }
    return r;
}

State alternating_coefficients(int m) {
    State u(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) u[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
    return u;
}

State seeded_coefficients(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    State u(static_cast<std::size_t>(m + 1));
    for (double& v : u) v = dist(rng);
    return u;
}

VandermondeProblem make_vandermonde(const std::vector<double>& nodes, const State& u_true) {
    const int n = static_cast<int>(nodes.size());
    if (n < 2) throw ConfigError("make_vandermonde: degree m must be >= 1");
    if (static_cast<int>(u_true.size()) != n) {
        throw ConfigError("make_vandermonde: u_true must have m + 1 entries");
    }
    for (int i = 0; i < n; ++i) {
        const double x = nodes[static_cast<std::size_t>(i)];
        if (!(x > 0.0 && x < 1.0)) throw ConfigError("make_vandermonde: nodes must lie in (0, 1)");
        if (i > 0 && !(x > nodes[static_cast<std::size_t>(i - 1)])) {
            throw ConfigError("make_vandermonde: nodes must be distinct and increasing (X would be singular)");
        }
    }

    VandermondeSpec spec;
    spec.degree = n - 1;
    spec.nodes = nodes;
    spec.u_true = u_true;
    spec.matrix.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = n - 1; j >= 0; --j) {
            spec.matrix[static_cast<std::size_t>(i * n + j)] = p;
            p *= nodes[static_cast<std::size_t>(i)];
        }
    }
    spec.target.assign(static_cast<std::size_t>(n), 0.0);
    spec.target = spec.residual(u_true);  // target is still zero here, so this is X u_true

    VandermondeProblem out;
    out.spec = spec;
    Objective& obj = out.objective;
    obj.name = "vandermonde";
    obj.dimension = n;
    obj.eval = [spec](const State& u) {
        require_dimension(u, spec.size(), "vandermonde");
        const State r = spec.residual(u);
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };
    obj.gradient = [spec](const State& u) {
        require_dimension(u, spec.size(), "vandermonde");
        const State r = spec.residual(u);
        const int m1 = spec.size();
        State g(static_cast<std::size_t>(m1), 0.0);
        for (int i = 0; i < m1; ++i) {
            for (int j = 0; j < m1; ++j) {
                g[static_cast<std::size_t>(j)] += 2.0 * spec.at(i, j) * r[static_cast<std::size_t>(i)];
            }
        }
        return g;
    };
    obj.known_optimum = u_true;
    obj.known_minimum = 0.0;
    return out;
}

VandermondeProblem make_vandermonde(int m, NodeRule rule, const State& u_true) {
    if (m < 1) throw ConfigError("make_vandermonde: degree m must be >= 1");
    std::vector<double> nodes(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) {
        double x = 0.0;
        switch (rule) {
            case NodeRule::InteriorUniform:
                x = (j + 1.0) / (m + 2.0);
                break;
            case NodeRule::Chebyshev:
                x = 0.5 * (1.0 - std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * (m + 1))));
                break;
        }
        nodes[static_cast<std::size_t>(j)] = x;
    }
    return make_vandermonde(nodes, u_true);
}

VandermondeProblem make_vandermonde(int m, NodeRule rule, std::uint64_t seed) {
    return make_vandermonde(m, rule, seeded_coefficients(m, seed));
}

std::vector<ThomsonSpec::Point> ThomsonSpec::cartesian(const State& angles) const {
    require_dimension(angles, 2 * charges, "thomson");
    std::vector<Point> pts(static_cast<std::size_t>(charges));
    for (int i = 0; i < charges; ++i) {
        const double theta = angles[static_cast<std::size_t>(i)];
        const double phi = angles[static_cast<std::size_t>(charges + i)];
        pts[static_cast<std::size_t>(i)] = {std::sin(phi) * std::cos(theta),
                                            std::sin(phi) * std::sin(theta), std::cos(phi)};
    }
    return pts;
}

namespace {

double pair_distance(const ThomsonSpec::Point& a, const ThomsonSpec::Point& b, int i, int j) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d == 0.0) {
        std::ostringstream os;
        os << "thomson: charges " << i << " and " << j << " coincide";
        throw SingularityError(os.str(), i, j);
    }
    return d;
}

}  // namespace

double ThomsonSpec::energy(const State& angles) const {
    const auto pts = cartesian(angles);
    double e = 0.0;
    for (int i = 0; i < charges; ++i) {
        for (int j = i + 1; j < charges; ++j) {
            e += 1.0 / pair_distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], i, j);
        }
    }
    return e;
}

State ThomsonSpec::gradient(const State& angles) const {
    const auto pts = cartesian(angles);
    std::vector<Point> force(static_cast<std::size_t>(charges), Point{0.0, 0.0, 0.0});
    for (int i = 0; i < charges; ++i) {
        for (int j = i + 1; j < charges; ++j) {
            const Point& a = pts[static_cast<std::size_t>(i)];
            const Point& b = pts[static_cast<std::size_t>(j)];
            const double d = pair_distance(a, b, i, j);
            const double inv3 = 1.0 / (d * d * d);
            // dE/dp_i = -(p_i - p_j) / d^3
            const double gx = -(a.x - b.x) * inv3;
            const double gy = -(a.y - b.y) * inv3;
            const double gz = -(a.z - b.z) * inv3;
            Point& fi = force[static_cast<std::size_t>(i)];
            Point& fj = force[static_cast<std::size_t>(j)];
            fi.x += gx;
            fi.y += gy;
            fi.z += gz;
            fj.x -= gx;
            fj.y -= gy;
            fj.z -= gz;
        }
    }
    State g(static_cast<std::size_t>(2 * charges));
    for (int i = 0; i < charges; ++i) {
        const double theta = angles[static_cast<std::size_t>(i)];
        const double phi = angles[static_cast<std::size_t>(charges + i)];
        const double st = std::sin(theta), ct = std::cos(theta);
        const double sp = std::sin(phi), cp = std::cos(phi);
        const Point& f = force[static_cast<std::size_t>(i)];
        g[static_cast<std::size_t>(i)] = f.x * (-sp * st) + f.y * (sp * ct);
        g[static_cast<std::size_t>(charges + i)] = f.x * (cp * ct) + f.y * (cp * st) - f.z * sp;
    }
    return g;
}

std::optional<double> thomson_reference_energy(int charges) {
    switch (charges) {
        case 4: return 3.674234614;
        case 5: return 6.474691495;
        case 6: return 9.985281374;
        case 12: return 49.165253058;
        default: return std::nullopt;
    }
}

ThomsonProblem make_thomson(int charges) {
    if (charges < 2) throw ConfigError("make_thomson: need at least 2 charges");
    ThomsonProblem out;
    out.spec.charges = charges;
    const ThomsonSpec spec = out.spec;
    Objective& obj = out.objective;
    obj.name = "thomson";
    obj.dimension = 2 * charges;
    obj.eval = [spec](const State& u) { return spec.energy(u); };
    obj.gradient = [spec](const State& u) { return spec.gradient(u); };
    obj.known_minimum = thomson_reference_energy(charges);
    return out;
}

State random_sphere_configuration(int charges, std::uint64_t seed) {
    if (charges < 2) throw ConfigError("random_sphere_configuration: need at least 2 charges");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double min_cos = std::cos(1e-3);
    constexpr int kBudget = 10000;

    std::vector<ThomsonSpec::Point> pts;
    pts.reserve(static_cast<std::size_t>(charges));
    while (static_cast<int>(pts.size()) < charges) {
        bool placed = false;
        for (int attempt = 0; attempt < kBudget && !placed; ++attempt) {
            const double x = normal(rng), y = normal(rng), z = normal(rng);
            const double r = std::sqrt(x * x + y * y + z * z);
            if (r == 0.0) continue;
            const ThomsonSpec::Point p{x / r, y / r, z / r};
            bool ok = true;
            for (const auto& q : pts) {
                if (p.x * q.x + p.y * q.y + p.z * q.z > min_cos) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                pts.push_back(p);
                placed = true;
            }
        }
        if (!placed) {
            std::ostringstream os;
            os << "random_sphere_configuration: rejection budget exhausted for seed " << seed;
            throw RetryError(os.str());
        }
    }

    State angles(static_cast<std::size_t>(2 * charges));
    for (int i = 0; i < charges; ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        angles[static_cast<std::size_t>(i)] = std::atan2(p.y, p.x);
        angles[static_cast<std::size_t>(charges + i)] = std::acos(std::clamp(p.z, -1.0, 1.0));
    }
    return angles;
}

void write_thomson_csv(std::ostream& os, const ThomsonSpec& spec, const State& angles) {
    os << "i,x,y,z\n";
    const auto pts = spec.cartesian(angles);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        os << i << ',' << format_real(pts[i].x) << ',' << format_real(pts[i].y) << ','
           << format_real(pts[i].z) << '\n';
    }
}

State central_difference_gradient(const Objective& objective, const State& u) {
    double scale = 0.0;
    for (double x : u) scale = std::max(scale, std::fabs(x));
    const double step = 1e-6 * (1.0 + scale);
    State g(u.size());
    State probe = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        probe[i] = u[i] + step;
        const double fp = objective.eval(probe);
        probe[i] = u[i] - step;
        const double fm = objective.eval(probe);
        probe[i] = u[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

}  // namespace fracopt
