// Deterministic random number generation. The generator is xoshiro256++
// seeded through splitmix64, with Gaussian variates drawn by Box-Muller, so
// that every random quantity in the toolkit is reproducible byte-for-byte
// from a single integer seed.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>

namespace landing::rng {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// xoshiro256++ generator (Blackman & Vigna).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1], using the top 53 bits.
    double uniform01() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal variate via Box-Muller; generates pairs internally.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// n x p matrix with iid standard normal entries, filled row-major.
inline Eigen::MatrixXd normal_matrix(Xoshiro256pp& gen, Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            m(i, j) = gen.normal();
        }
    }
    return m;
}

/// Matrix with orthonormal columns, drawn uniformly via QR of a Gaussian
/// matrix with the sign convention diag(R) > 0.
inline Eigen::MatrixXd orthonormal_matrix(Xoshiro256pp& gen, Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd g = normal_matrix(gen, n, p);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return q;
}

/// Random k x k skew-symmetric matrix with Gaussian entries.
inline Eigen::MatrixXd skew_matrix(Xoshiro256pp& gen, Eigen::Index k) {
    Eigen::MatrixXd a = normal_matrix(gen, k, k);
    return 0.5 * (a - a.transpose());
}

/// Random k x k symmetric matrix with Gaussian entries.
inline Eigen::MatrixXd sym_matrix(Xoshiro256pp& gen, Eigen::Index k) {
    Eigen::MatrixXd a = normal_matrix(gen, k, k);
    return 0.5 * (a + a.transpose());
}

/// Random k x k SPD matrix A'A + I.
inline Eigen::MatrixXd spd_matrix(Xoshiro256pp& gen, Eigen::Index k) {
    Eigen::MatrixXd a = normal_matrix(gen, k, k);
    return a.transpose() * a + Eigen::MatrixXd::Identity(k, k);
}

} // namespace landing::rng
