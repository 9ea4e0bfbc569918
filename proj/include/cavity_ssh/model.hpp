// model.hpp: closed-form quantities of the dimerized chain and its cavity coupling
//
// Conventions used throughout the library:
//   * momentum k lives in the Brillouin zone [-pi, pi); every Bloch matrix is
//     2pi-periodic in k (no intra-cell position phases).
//   * sublattice basis (A, B); the (A, B) element of the bare Bloch matrix is
//     J + J' e^{ik}.
//   * band basis ordered (+, -).  phi_+ has a real positive A-component and
//     phi_- = -sigma_z phi_+.  In this gauge the coupling matrix elements and
//     the RWA block take their closed forms with V_{+-} = -i Gamma(k).
//   * energies in units of J.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "cavity_ssh/errors.hpp"

namespace cavity_ssh {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Energy scale below which E_+(k) counts as a gap closure.
inline constexpr double kDegeneracyTol = 1e-9;

struct ModelParams {
    double J{1.0};      // intra-dimer hopping
    double Jp{2.0};     // inter-dimer hopping J'
    double g{0.0};      // light-matter coupling
    double omega{1.0};  // cavity frequency
    int n_sites{24};    // total chain sites L (even)
    int n_max{6};       // photon Fock cutoff

    int n_cells() const { return n_sites / 2; }
    int n_photon_states() const { return n_max + 1; }

    /// Throws InvalidParams naming the offending field.
    void validate() const {
        auto fail = [](const std::string& field, const std::string& why) {
            throw Error(ErrorCode::InvalidParams, field + " " + why);
        };
        if (!(J > 0.0)) fail("J", "must be > 0");
        if (!(Jp >= 0.0)) fail("Jp", "must be >= 0");
        if (!(g >= 0.0)) fail("g", "must be >= 0");
        if (!(omega > 0.0)) fail("omega", "must be > 0");
        if (n_sites < 4 || n_sites % 2 != 0) fail("n_sites", "must be even and >= 4");
        if (n_max < 0) fail("n_max", "must be >= 0");
    }
};

enum class BasisLabel { sublattice, band_eigenbasis, sublattice_fock };

/// Finite Hermitian matrix at fixed momentum.
struct BlochBlock {
    double k{0.0};
    Eigen::MatrixXcd matrix;
    BasisLabel basis{BasisLabel::sublattice};

    double hermiticity_error() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
};

inline Eigen::Matrix2cd sigma_x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
inline Eigen::Matrix2cd sigma_y() { return (Eigen::Matrix2cd() << 0, -I, I, 0).finished(); }
inline Eigen::Matrix2cd sigma_z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }

/// Off-diagonal (A, B) element of the bare Bloch matrix.
inline cplx ssh_offdiagonal(double k, const ModelParams& p) {
    return p.J + p.Jp * std::exp(I * k);
}

inline BlochBlock bloch_hamiltonian(double k, const ModelParams& p) {
    const cplx h = ssh_offdiagonal(k, p);
    Eigen::MatrixXcd m(2, 2);
    m << 0.0, h, std::conj(h), 0.0;
    return {k, std::move(m), BasisLabel::sublattice};
}

/// Sublattice pattern multiplying g(d + d^dagger): +1 on intra-dimer bonds,
/// -1 on inter-dimer bonds, Fourier transformed with the same convention as
/// bloch_hamiltonian.
inline Eigen::Matrix2cd coupling_pattern(double k) {
    const cplx c = 1.0 - std::exp(I * k);
    Eigen::Matrix2cd m;
    m << 0.0, c, std::conj(c), 0.0;
    return m;
}

struct BandPair {
    double minus;
    double plus;
};

inline double ssh_upper_energy(double k, const ModelParams& p) {
    return std::sqrt(std::max(0.0, p.J * p.J + p.Jp * p.Jp + 2.0 * p.J * p.Jp * std::cos(k)));
}

inline BandPair ssh_energies(double k, const ModelParams& p) {
    const double e = ssh_upper_energy(k, p);
    return {-e, e};
}

namespace detail {
inline double require_gapped(double k, const ModelParams& p) {
    const double e = ssh_upper_energy(k, p);
    if (e < kDegeneracyTol) {
        throw Error(ErrorCode::DegenerateAtK,
                    "E_+(k) = " + std::to_string(e) + " at k = " + std::to_string(k));
    }
    return e;
}
} // namespace detail

struct SshEigenvectors {
    Eigen::Vector2cd plus;
    Eigen::Vector2cd minus;

    /// Columns (phi_+, phi_-): maps band amplitudes to sublattice amplitudes.
    Eigen::Matrix2cd unitary() const {
        Eigen::Matrix2cd u;
        u.col(0) = plus;
        u.col(1) = minus;
        return u;
    }
};

inline SshEigenvectors ssh_eigenvectors(double k, const ModelParams& p) {
    const double e = detail::require_gapped(k, p);
    const cplx phase = std::conj(ssh_offdiagonal(k, p)) / e;  // e^{-i theta}
    const double s = 1.0 / std::sqrt(2.0);
    SshEigenvectors v;
    v.plus << s, s * phase;
    v.minus << -s, s * phase;
    return v;
}

inline double gamma_coupling(double k, const ModelParams& p) {
    const double e = detail::require_gapped(k, p);
    return (p.J + p.Jp) * std::sin(k) / e;
}

/// Coupling g(d + d^dagger) in the band basis, ordered (+, -).
inline Eigen::Matrix2cd coupling_matrix_elements(double k, const ModelParams& p) {
    const double e = detail::require_gapped(k, p);
    const double vpp = (1.0 - std::cos(k)) * (p.J - p.Jp) / e;
    const double gam = (p.J + p.Jp) * std::sin(k) / e;
    Eigen::Matrix2cd v;
    v << vpp, -I * gam, I * gam, -vpp;
    return v;
}

struct Resonances {
    double omega_plus;   // closure at k = 0
    double omega_minus;  // closure at k = pi
    bool gapless_chain;  // J == J': the window degenerates
};

inline Resonances resonance_frequencies(const ModelParams& p) {
    const double plus = 2.0 * std::abs(p.J + p.Jp);
    const double minus = 2.0 * std::abs(p.J - p.Jp);
    return {plus, minus, minus < kDegeneracyTol};
}

/// Uniform Brillouin-zone grid k_j = -pi + 2 pi j / n_k, j = 0..n_k-1.
inline double bz_point(int j, int n_k) {
    return -pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(n_k);
}

} // namespace cavity_ssh
