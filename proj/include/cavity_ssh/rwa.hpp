// rwa.hpp: rotating-wave analytics: Jaynes-Cummings-like blocks per photon subspace

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/linalg.hpp"
#include "cavity_ssh/manybody.hpp"
#include "cavity_ssh/model.hpp"

namespace cavity_ssh {

/// 2x2 block in the basis {|phi_+, n>, |phi_-, n+1>}.
struct RwaBlock {
    int n{0};
    double k{0.0};
    Eigen::Matrix2cd matrix;
};

enum class Band { minus, plus };

/// Components of an RWA eigenvector on |phi_+, n> (alpha) and |phi_-, n+1> (beta).
struct RwaAmplitudes {
    cplx alpha;
    cplx beta;
};

struct RwaEigenvectors {
    RwaAmplitudes minus;
    RwaAmplitudes plus;

    const RwaAmplitudes& operator[](Band b) const { return b == Band::plus ? plus : minus; }
};

inline constexpr double kBlockDegeneracyTol = 1e-9;

namespace detail {
inline void require_photon_index(int n) {
    if (n < 0) throw Error(ErrorCode::OutOfRange, "photon subspace n = " + std::to_string(n));
}
} // namespace detail

inline RwaBlock rwa_block(int n, double k, const ModelParams& p) {
    detail::require_photon_index(n);
    const double e = detail::require_gapped(k, p);
    const double coupling = p.g * gamma_coupling(k, p) * std::sqrt(n + 1.0);
    RwaBlock b{n, k, {}};
    b.matrix << n * p.omega + e, -I * coupling, I * coupling, (n + 1) * p.omega - e;
    return b;
}

inline BandPair rwa_bands(int n, double k, const ModelParams& p) {
    detail::require_photon_index(n);
    const double e = detail::require_gapped(k, p);
    const double gam = gamma_coupling(k, p);
    const double detuning = e - 0.5 * p.omega;
    const double r = std::sqrt(detuning * detuning + p.g * p.g * (n + 1.0) * gam * gam);
    const double centre = p.omega * (n + 0.5);
    return {centre - r, centre + r};
}

/// Eigenvectors of rwa_block, ordered by energy. Gauge: alpha real >= 0, and
/// beta real > 0 when alpha vanishes. Throws DegenerateBlock at exact crossings.
inline RwaEigenvectors rwa_eigenvectors(int n, double k, const ModelParams& p) {
    const auto bands = rwa_bands(n, k, p);
    if (bands.plus - bands.minus < kBlockDegeneracyTol) {
        throw Error(ErrorCode::DegenerateBlock,
                    "exact crossing at k = " + std::to_string(k) + ", omega = " +
                        std::to_string(p.omega) + ", n = " + std::to_string(n));
    }
    const double detuning = ssh_upper_energy(k, p) - 0.5 * p.omega;
    const double coupling = p.g * gamma_coupling(k, p) * std::sqrt(n + 1.0);
    // Traceless part detuning*sigma_z + coupling*sigma_y = r (cos t sigma_z + sin t sigma_y).
    const double t = std::atan2(coupling, detuning);
    auto fix_gauge = [](cplx a, cplx b) {
        if (std::abs(a) > 1e-12) {
            const cplx ph = std::conj(a) / std::abs(a);
            return RwaAmplitudes{a * ph, b * ph};
        }
        const cplx ph = std::abs(b) > 0.0 ? std::conj(b) / std::abs(b) : cplx{1.0};
        return RwaAmplitudes{0.0, b * ph};
    };
    RwaEigenvectors v;
    v.plus = fix_gauge(std::cos(0.5 * t), I * std::sin(0.5 * t));
    v.minus = fix_gauge(std::sin(0.5 * t), -I * std::cos(0.5 * t));
    return v;
}

/// RWA block rotated back to the sublattice basis; chiral about (n + 1/2) Omega.
inline BlochBlock rwa_lab_frame(int n, double k, const ModelParams& p) {
    detail::require_photon_index(n);
    const double e = detail::require_gapped(k, p);
    const double coupling = p.g * std::sqrt(n + 1.0) * gamma_coupling(k, p);
    const double detuning = e - 0.5 * p.omega;
    const double diag = (n + 0.5) * p.omega;
    const cplx ab = e * (detuning - I * coupling) / (p.J + p.Jp * std::exp(-I * k));
    const cplx ba = e * (detuning + I * coupling) / (p.J + p.Jp * std::exp(I * k));
    Eigen::MatrixXcd m(2, 2);
    m << diag, ab, ba, diag;
    return {k, std::move(m), BasisLabel::sublattice};
}

/// Levels of the truncated momentum block as predicted by the RWA: the
/// decoupled |phi_-, 0>, the pairs of every block n < n_max, and the unpaired
/// |phi_+, n_max>. Sorted ascending.
inline Eigen::VectorXd rwa_predicted_levels(double k, const ModelParams& p) {
    const double e = detail::require_gapped(k, p);
    std::vector<double> levels{-e, p.n_max * p.omega + e};
    for (int n = 0; n < p.n_max; ++n) {
        const auto b = rwa_bands(n, k, p);
        levels.push_back(b.minus);
        levels.push_back(b.plus);
    }
    std::sort(levels.begin(), levels.end());
    return Eigen::Map<Eigen::VectorXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));
}

/// Largest deviation between full momentum-block levels (counter-rotating
/// terms included) and rwa_predicted_levels over the grid.
inline double rwa_deviation(const ModelParams& p, int n_k) {
    double worst = 0.0;
    for (int j = 0; j < n_k; ++j) {
        const double k = bz_point(j, n_k);
        const auto full = diagonalize(build_momentum_block(k, p).matrix);
        worst = std::max(worst, (full.values - rwa_predicted_levels(k, p)).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace cavity_ssh
