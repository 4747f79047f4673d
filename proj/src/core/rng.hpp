#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace geofuse {

/// splitmix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for Monte-Carlo run k: two rounds of splitmix64 over the pair
/// (base, k) folded together. Frozen for reproducibility.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t k) {
    return splitmix64(splitmix64(base) ^ splitmix64(k * 0x9e3779b97f4a7c15ULL + 1));
}

/// Deterministic random source. Gaussian draws use Box-Muller over
/// mt19937_64 so that output streams do not depend on the standard
/// library's normal_distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::Vector3d normal3() {
        Eigen::Vector3d v;
        // evaluation order of Vector3d(normal(), ...) is unspecified; draw explicitly
        v.x() = normal();
        v.y() = normal();
        v.z() = normal();
        return v;
    }

    /// Draw from N(0, cov). Accepts PSD matrices via eigenvalue square root.
    Eigen::Vector3d mvn(const Eigen::Matrix3d& cov) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        Eigen::Vector3d lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * lam.asDiagonal() * normal3();
    }

    /// Uniform direction on the unit sphere.
    Eigen::Vector3d unit_vector() {
        Eigen::Vector3d v;
        double n = 0.0;
        do {
            v = normal3();
            n = v.norm();
        } while (n < 1e-12);
        return v / n;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace geofuse
