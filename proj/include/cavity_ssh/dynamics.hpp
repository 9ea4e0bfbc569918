// dynamics.hpp: exact evolution of a fermion launched at a chain site with a
// definite photon number, plus site and photon-subspace observables.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/linalg.hpp"
#include "cavity_ssh/manybody.hpp"
#include "cavity_ssh/model.hpp"
#include "cavity_ssh/parallel.hpp"

namespace cavity_ssh {

/// |site> x |n_photons>, site 1-based (1 = A of the first cell, L = B of the last).
inline Eigen::VectorXcd initial_edge_state(int site, int n_photons, const ManyBodyBasis& basis) {
    if (basis.mode != ManyBodyBasis::Mode::real_space_obc) {
        throw Error(ErrorCode::BasisMismatch, "initial state needs a real-space basis");
    }
    if (site < 1 || site > basis.width) {
        throw Error(ErrorCode::OutOfRange, "site = " + std::to_string(site));
    }
    if (n_photons < 0 || n_photons > basis.n_max) {
        throw Error(ErrorCode::OutOfRange, "n_photons = " + std::to_string(n_photons) +
                                               " with n_max = " + std::to_string(basis.n_max));
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dimension());
    psi[basis.index(n_photons, site - 1)] = 1.0;
    return psi;
}

/// n_points equally spaced times on [0, t_max].
inline std::vector<double> time_grid(double t_max, int n_points) {
    if (!(t_max >= 0.0) || n_points < 1) {
        throw Error(ErrorCode::OutOfRange, "time grid needs t_max >= 0 and n_points >= 1");
    }
    std::vector<double> t(static_cast<std::size_t>(n_points), 0.0);
    for (int i = 1; i < n_points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (n_points - 1);
    return t;
}

struct Trajectory {
    std::vector<double> times;
    ManyBodyBasis basis;
    Eigen::MatrixXcd states;              // dimension x T
    Eigen::MatrixXd site_occupation;      // L x T
    Eigen::MatrixXd photon_populations;   // (n_max + 1) x T
    std::vector<double> norm_series;
    std::vector<double> energy_series;
};

/// P_n(t) = sum_sites |<site, n|psi(t)>|^2, recomputed from stored states.
inline Eigen::MatrixXd photon_subspace_populations(const Trajectory& traj) {
    const auto& b = traj.basis;
    Eigen::MatrixXd pops = Eigen::MatrixXd::Zero(b.n_max + 1, traj.states.cols());
    for (Eigen::Index t = 0; t < traj.states.cols(); ++t) {
        for (int n = 0; n <= b.n_max; ++n) {
            pops(n, t) = traj.states.col(t).segment(static_cast<Eigen::Index>(n) * b.width, b.width)
                             .squaredNorm();
        }
    }
    return pops;
}

/// psi(t) = sum_m exp(-i E_m t) <m|psi0> |m>, one eigendecomposition shared by
/// all time points.
inline Trajectory evolve(const EigenSystem<double>& sys, const Eigen::VectorXcd& psi0,
                         const std::vector<double>& times, const ManyBodyBasis& basis,
                         int workers = default_workers()) {
    if (psi0.size() != sys.vectors.rows() || psi0.size() != basis.dimension()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "psi0 has " + std::to_string(psi0.size()) + " entries, H has dimension " +
                        std::to_string(sys.vectors.rows()));
    }
    if (basis.mode != ManyBodyBasis::Mode::real_space_obc) {
        throw Error(ErrorCode::BasisMismatch, "evolution needs a real-space basis");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
            throw Error(ErrorCode::OutOfRange, "times must be ascending from 0");
        }
    }

    const Eigen::VectorXcd coeff = sys.vectors.cast<cplx>().adjoint() * psi0;
    const Eigen::MatrixXcd vecs = sys.vectors.cast<cplx>();
    const auto n_t = static_cast<Eigen::Index>(times.size());
    const int L = basis.width;

    Trajectory tr;
    tr.times = times;
    tr.basis = basis;
    tr.states.resize(psi0.size(), n_t);
    tr.site_occupation.resize(L, n_t);
    tr.norm_series.assign(times.size(), 0.0);
    tr.energy_series.assign(times.size(), 0.0);

    parallel_for(times.size(), workers, [&](std::size_t i) {
        const auto ti = static_cast<Eigen::Index>(i);
        Eigen::VectorXcd c(coeff.size());
        for (Eigen::Index m = 0; m < c.size(); ++m) {
            c[m] = coeff[m] * std::exp(-I * (sys.values[m] * times[i]));
        }
        tr.states.col(ti) = vecs * c;
        tr.norm_series[i] = std::sqrt(c.squaredNorm());
        tr.energy_series[i] = (c.cwiseAbs2().transpose() * sys.values).value();
        for (int s = 0; s < L; ++s) {
            double occ = 0.0;
            for (int n = 0; n <= basis.n_max; ++n) occ += std::norm(tr.states(basis.index(n, s), ti));
            tr.site_occupation(s, ti) = occ;
        }
    });
    tr.photon_populations = photon_subspace_populations(tr);
    return tr;
}

template <typename Derived>
Trajectory evolve(const Eigen::MatrixBase<Derived>& h, const Eigen::VectorXcd& psi0,
                  const std::vector<double>& times, const ManyBodyBasis& basis,
                  int workers = default_workers()) {
    if (h.rows() != psi0.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "H has dimension " + std::to_string(h.rows()) + ", psi0 " +
                        std::to_string(psi0.size()));
    }
    return evolve(diagonalize(h.real().eval()), psi0, times, basis, workers);
}

/// First dimer at the end holding `site` (1-based), as 0-based site indices.
inline std::vector<int> edge_region(int site, int n_sites) {
    if (site < 1 || site > n_sites) throw Error(ErrorCode::OutOfRange, "site = " + std::to_string(site));
    if (site <= n_sites / 2) return {0, 1};
    return {n_sites - 2, n_sites - 1};
}

/// Sum of site_occupation over `region` (0-based sites) at every time.
inline std::vector<double> return_probability(const Trajectory& traj, const std::vector<int>& region) {
    std::vector<double> out(traj.times.size(), 0.0);
    for (int s : region) {
        if (s < 0 || s >= traj.site_occupation.rows()) {
            throw Error(ErrorCode::OutOfRange, "region site " + std::to_string(s));
        }
    }
    for (std::size_t t = 0; t < out.size(); ++t) {
        for (int s : region) out[t] += traj.site_occupation(s, static_cast<Eigen::Index>(t));
    }
    return out;
}

inline double time_average(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    double s = 0.0;
    for (double v : series) s += v;
    return s / static_cast<double>(series.size());
}

} // namespace cavity_ssh
