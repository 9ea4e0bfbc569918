// manybody.hpp: exact diagonalization of the chain coupled to one cavity mode
//
// The Hamiltonian conserves fermion number; everything here lives in the
// single-fermion sector tensored with the truncated photon ladder
// {|0>, ..., |n_max>}.  Basis ordering is photon-number major:
//   index = n * width + j,   width = L (open chain) or 2 (momentum block).
// Sites are 0-based internally: site 2c is A of cell c, site 2c+1 is B.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/linalg.hpp"
#include "cavity_ssh/model.hpp"
#include "cavity_ssh/parallel.hpp"

namespace cavity_ssh {

struct ManyBodyBasis {
    enum class Mode { real_space_obc, momentum_block };

    Mode mode{Mode::real_space_obc};
    int width{0};  // L sites, or 2 sublattices
    int n_max{0};
    double k{0.0};  // momentum_block only

    static ManyBodyBasis real_space(const ModelParams& p) {
        return {Mode::real_space_obc, p.n_sites, p.n_max, 0.0};
    }
    static ManyBodyBasis momentum(double k, const ModelParams& p) {
        return {Mode::momentum_block, 2, p.n_max, k};
    }

    Eigen::Index dimension() const { return static_cast<Eigen::Index>(width) * (n_max + 1); }

    Eigen::Index index(int photons, int site) const {
        if (photons < 0 || photons > n_max || site < 0 || site >= width) {
            throw Error(ErrorCode::OutOfRange, "basis state (n=" + std::to_string(photons) +
                                                   ", site=" + std::to_string(site) + ")");
        }
        return static_cast<Eigen::Index>(photons) * width + site;
    }

    /// (photon number, site) for a basis index.
    std::pair<int, int> decode(Eigen::Index i) const {
        if (i < 0 || i >= dimension()) {
            throw Error(ErrorCode::OutOfRange, "basis index " + std::to_string(i));
        }
        return {static_cast<int>(i / width), static_cast<int>(i % width)};
    }
};

/// Truncated quadrature d + d^dagger on {|0>, ..., |n_max>}.
inline Eigen::MatrixXd photon_quadrature(int n_max) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n < n_max; ++n) {
        x(n, n + 1) = x(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
    }
    return x;
}

/// Open chain: Omega n on the diagonal, J + g X on intra-dimer bonds and
/// J' - g X on inter-dimer bonds, X = d + d^dagger truncated at n_max.
inline Eigen::SparseMatrix<double> build_obc_hamiltonian_sparse(const ModelParams& p) {
    p.validate();
    const auto basis = ManyBodyBasis::real_space(p);
    const int L = p.n_sites;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(basis.dimension()) * 5);

    for (int n = 0; n <= p.n_max; ++n) {
        for (int s = 0; s < L; ++s) {
            if (n > 0) entries.emplace_back(basis.index(n, s), basis.index(n, s), p.omega * n);
        }
        for (int s = 0; s + 1 < L; ++s) {
            const bool intra = s % 2 == 0;
            const double hop = intra ? p.J : p.Jp;
            const double sign = intra ? 1.0 : -1.0;
            const auto a = basis.index(n, s), b = basis.index(n, s + 1);
            if (hop != 0.0) {
                entries.emplace_back(a, b, hop);
                entries.emplace_back(b, a, hop);
            }
            if (n < p.n_max && p.g != 0.0) {
                const double amp = sign * p.g * std::sqrt(static_cast<double>(n + 1));
                const auto a1 = basis.index(n + 1, s), b1 = basis.index(n + 1, s + 1);
                entries.emplace_back(a, b1, amp);
                entries.emplace_back(b1, a, amp);
                entries.emplace_back(a1, b, amp);
                entries.emplace_back(b, a1, amp);
            }
        }
    }
    Eigen::SparseMatrix<double> h(basis.dimension(), basis.dimension());
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

inline Eigen::MatrixXd build_obc_hamiltonian(const ModelParams& p) {
    return Eigen::MatrixXd(build_obc_hamiltonian_sparse(p));
}

/// Full light-matter Hamiltonian at fixed fermion momentum (the photon
/// carries none), counter-rotating terms included. Basis sublattice x Fock,
/// photon-number major.
inline BlochBlock build_momentum_block(double k, const ModelParams& p) {
    const int nph = p.n_max + 1;
    const Eigen::MatrixXd x = photon_quadrature(p.n_max);
    const Eigen::Matrix2cd h = bloch_hamiltonian(k, p).matrix;
    const Eigen::Matrix2cd c = coupling_pattern(k);

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * nph, 2 * nph);
    for (int n = 0; n < nph; ++n) {
        m.block<2, 2>(2 * n, 2 * n) = h + Eigen::Matrix2cd::Identity() * (p.omega * n);
        for (int n2 = 0; n2 < nph; ++n2) {
            if (x(n, n2) != 0.0) m.block<2, 2>(2 * n, 2 * n2) += p.g * x(n, n2) * c;
        }
    }
    return {k, std::move(m), BasisLabel::sublattice_fock};
}

/// Probability on the outermost `n_edge_cells` unit cells at both ends,
/// traced over photon number.
template <typename Derived>
double edge_localization(const Eigen::MatrixBase<Derived>& v, const ManyBodyBasis& basis,
                         int n_edge_cells = 1) {
    if (basis.mode != ManyBodyBasis::Mode::real_space_obc) {
        throw Error(ErrorCode::BasisMismatch, "edge localization needs a real-space basis");
    }
    if (v.size() != basis.dimension()) {
        throw Error(ErrorCode::BasisMismatch, "state dimension " + std::to_string(v.size()) +
                                                  " vs basis " + std::to_string(basis.dimension()));
    }
    const int L = basis.width;
    if (n_edge_cells < 1 || 4 * n_edge_cells > L) {
        throw Error(ErrorCode::OutOfRange, "n_edge_cells = " + std::to_string(n_edge_cells));
    }
    const int edge_sites = 2 * n_edge_cells;
    double w = 0.0;
    for (int n = 0; n <= basis.n_max; ++n) {
        for (int s = 0; s < edge_sites; ++s) {
            w += std::norm(v[basis.index(n, s)]);
            w += std::norm(v[basis.index(n, L - 1 - s)]);
        }
    }
    return std::clamp(w, 0.0, 1.0);
}

/// Allowed momenta of the closed ring with the same number of cells,
/// k_m = -pi + 2 pi m / (L/2). Contains 0 and pi whenever L/2 is even.
inline std::vector<double> ring_momenta(const ModelParams& p) {
    std::vector<double> ks(static_cast<std::size_t>(p.n_cells()));
    for (int m = 0; m < p.n_cells(); ++m) ks[static_cast<std::size_t>(m)] = bz_point(m, p.n_cells());
    return ks;
}

/// Bulk many-body gap of the resonance between |phi_+, n> and |phi_-, n+1>:
/// at every k the two full-block levels with the largest weight on that pair
/// are located and their splitting minimized over `ks`.
inline double resonance_gap(const ModelParams& p, int n, const std::vector<double>& ks) {
    if (n < 0 || n + 1 > p.n_max) {
        throw Error(ErrorCode::OutOfRange, "resonance n = " + std::to_string(n) +
                                               " needs n + 1 <= n_max");
    }
    double gap = std::numeric_limits<double>::infinity();
    for (double k : ks) {
        const auto phi = ssh_eigenvectors(k, p);
        const auto sys = diagonalize(build_momentum_block(k, p).matrix);
        Eigen::VectorXd weight(sys.size());
        for (Eigen::Index i = 0; i < sys.size(); ++i) {
            const auto col = sys.vectors.col(i);
            weight[i] = std::norm(phi.plus.dot(col.segment<2>(2 * n))) +
                        std::norm(phi.minus.dot(col.segment<2>(2 * (n + 1))));
        }
        Eigen::Index first = 0;
        weight.maxCoeff(&first);
        double best = -1.0;
        Eigen::Index second = -1;
        for (Eigen::Index i = 0; i < weight.size(); ++i) {
            if (i != first && weight[i] > best) {
                best = weight[i];
                second = i;
            }
        }
        gap = std::min(gap, std::abs(sys.values[first] - sys.values[second]));
    }
    return gap;
}

struct SpectrumScan {
    std::vector<double> omegas;
    std::vector<Eigen::VectorXd> energies;     // per omega, ascending
    std::vector<Eigen::VectorXd> edge_weight;  // per omega, matched to energies
    std::vector<double> bulk_gap;              // n = 0 resonance gap of the ring
    std::vector<std::optional<std::string>> failures;
    ModelParams params;
    int n_edge_cells{1};
};

/// Number of edge-localized levels (weight > threshold) sitting inside the
/// bulk gaps centred at (n + 1/2) Omega, for n = 0 .. n_max - 2. Bulk levels
/// are those at or below the threshold.
inline int resonant_edge_levels(const Eigen::VectorXd& energies, const Eigen::VectorXd& weights,
                                double omega, int n_max, double threshold = 0.5) {
    int count = 0;
    for (int n = 0; n + 2 <= n_max; ++n) {
        const double centre = (n + 0.5) * omega;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        bool below = false, above = false;
        for (Eigen::Index i = 0; i < energies.size(); ++i) {
            if (weights[i] > threshold) continue;
            if (energies[i] < centre) {
                lo = std::max(lo, energies[i]);
                below = true;
            } else {
                hi = std::min(hi, energies[i]);
                above = true;
            }
        }
        if (!below || !above) continue;
        for (Eigen::Index i = 0; i < energies.size(); ++i) {
            if (weights[i] > threshold && energies[i] > lo && energies[i] < hi) ++count;
        }
    }
    return count;
}

/// Open-chain spectra and edge weights over a grid of cavity frequencies.
/// Points are independent; a failing point is recorded, not fatal.
inline SpectrumScan spectrum_scan(const ModelParams& p, const std::vector<double>& omega_grid,
                                  int workers = default_workers(), int n_edge_cells = 1) {
    p.validate();
    if (omega_grid.empty()) throw Error(ErrorCode::OutOfRange, "empty omega grid");

    SpectrumScan scan;
    scan.omegas = omega_grid;
    scan.params = p;
    scan.n_edge_cells = n_edge_cells;
    const std::size_t n = omega_grid.size();
    scan.energies.resize(n);
    scan.edge_weight.resize(n);
    scan.bulk_gap.assign(n, std::numeric_limits<double>::quiet_NaN());
    scan.failures.resize(n);

    const auto ks = ring_momenta(p);
    parallel_for(n, workers, [&](std::size_t i) {
        ModelParams q = p;
        q.omega = omega_grid[i];
        try {
            q.validate();
            const auto basis = ManyBodyBasis::real_space(q);
            const auto sys = diagonalize(build_obc_hamiltonian(q));
            Eigen::VectorXd w(sys.size());
            for (Eigen::Index j = 0; j < sys.size(); ++j) {
                w[j] = edge_localization(sys.vectors.col(j), basis, n_edge_cells);
            }
            scan.energies[i] = sys.values;
            scan.edge_weight[i] = std::move(w);
            if (q.n_max >= 1) scan.bulk_gap[i] = resonance_gap(q, 0, ks);
        } catch (const Error& e) {
            scan.failures[i] = "omega=" + std::to_string(q.omega) + ": " + e.what();
        }
    });
    return scan;
}

/// Indices of local minima of `values` lying below `threshold`.
inline std::vector<std::size_t> local_minima_below(const std::vector<double>& values,
                                                   double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v < threshold)) continue;
        const bool left = i == 0 || !(values[i - 1] < v);
        const bool right = i + 1 == values.size() || !(values[i + 1] < v);
        if (left && right) out.push_back(i);
    }
    return out;
}

struct ConvergenceReport {
    int n_max{0};
    int levels{0};
    Eigen::VectorXd energies;      // at n_max
    Eigen::VectorXd energies_ref;  // at n_max + 2
    double max_shift{0.0};
    bool pass{false};
};

inline constexpr double kTruncationTol = 1e-6;

/// Recomputes the lowest `levels` open-chain energies at n_max + 2 and
/// reports the largest shift. PASS iff the shift is below 1e-6.
inline ConvergenceReport truncation_convergence_check(const ModelParams& p, int levels) {
    p.validate();
    if (p.n_max < 2) throw Error(ErrorCode::OutOfRange, "convergence check needs n_max >= 2");
    ModelParams ref = p;
    ref.n_max = p.n_max + 2;

    ConvergenceReport r;
    r.n_max = p.n_max;
    r.levels = levels;
    r.energies = lowest_levels(build_obc_hamiltonian_sparse(p), levels);
    r.energies_ref = lowest_levels(build_obc_hamiltonian_sparse(ref), levels);
    r.max_shift = (r.energies - r.energies_ref).cwiseAbs().maxCoeff();
    r.pass = r.max_shift < kTruncationTol;
    return r;
}

inline void require_converged(const ConvergenceReport& r) {
    if (!r.pass) {
        throw Error(ErrorCode::TruncationTooSmall,
                    "n_max = " + std::to_string(r.n_max) + " shifts the lowest " +
                        std::to_string(r.levels) + " levels by " + std::to_string(r.max_shift));
    }
}

/// Largest distance between a sorted spectrum and its mirror image about
/// `centre`. Reported for full blocks, not asserted: the many-body chiral
/// operator of the full model is not known in closed form.
inline double reflection_asymmetry(const Eigen::VectorXd& sorted_values, double centre) {
    const Eigen::Index n = sorted_values.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mirrored = 2.0 * centre - sorted_values[n - 1 - i];
        worst = std::max(worst, std::abs(sorted_values[i] - mirrored));
    }
    return worst;
}

} // namespace cavity_ssh
