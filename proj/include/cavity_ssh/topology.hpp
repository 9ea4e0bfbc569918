// topology.hpp: winding numbers, discretized Zak phases and the split of the
// total invariant into a bare-chain part and a light-matter part.
//
// Phases are reported in (-pi, pi]. A Zak phase is only defined mod 2 pi, so
// -pi and +pi are the same value; canonical_phase() maps both to +pi.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/linalg.hpp"
#include "cavity_ssh/manybody.hpp"
#include "cavity_ssh/model.hpp"
#include "cavity_ssh/rwa.hpp"

namespace cavity_ssh {

inline constexpr double kGapClosureTol = 1e-9;
inline constexpr double kChiralityTol = 1e-8;
inline constexpr double kQuantizationTol = 0.02 * pi;
inline constexpr double kMinOverlap = 0.1;
inline constexpr int kDefaultNk = 512;

/// GapClosureOnGrid with the offending momentum attached.
class GapClosureError : public Error {
public:
    GapClosureError(double k, const std::string& what)
        : Error(ErrorCode::GapClosureOnGrid, what), k_(k) {}
    double k() const noexcept { return k_; }

private:
    double k_;
};

/// Wraps into (-pi, pi]; values within 1e-9 of -pi become +pi.
inline double canonical_phase(double phase) {
    double x = std::remainder(phase, 2.0 * pi);
    if (x <= -pi + 1e-9) x += 2.0 * pi;
    return x;
}

/// Distance between two phases on the circle.
inline double phase_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * pi));
}

/// Equality mod 2 pi within `tol`.
inline bool same_phase(double a, double b, double tol = kQuantizationTol) {
    return phase_distance(a, b) < tol;
}

struct WindingResult {
    int winding{0};
    double integral{0.0};  // trapezoidal value of the winding integral
    double residual{0.0};  // |integral - winding|
};

using BlochSampler = std::function<Eigen::Matrix2cd(double)>;

/// Winding number of a chiral 2x2 Bloch family,
///   nu = (1/4 pi i) \oint tr[C H^{-1} d_k H] dk,
/// on the grid k_j = -pi + 2 pi j / n_k. Any scalar shift is removed and the
/// chiral operator C (Hermitian, C^2 = 1) is rotated to sigma_z first; the
/// integer then counts the phase of the off-diagonal element q(k) as
/// nu = -(1/2 pi) \oint d arg q, accumulated from wrapped increments. The
/// trapezoidal integral with central differences is reported alongside.
inline WindingResult winding_number_chiral(const BlochSampler& sampler, int n_k,
                                           const Eigen::Matrix2cd& chiral = sigma_z()) {
    if (n_k < 8) throw Error(ErrorCode::OutOfRange, "n_k = " + std::to_string(n_k));
    if ((chiral * chiral - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
        hermiticity_error(chiral) > 1e-10) {
        throw Error(ErrorCode::NotChiral, "chiral operator is not a Hermitian involution");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> ce(chiral);
    Eigen::Matrix2cd rot;
    rot.col(0) = ce.eigenvectors().col(1);  // eigenvalue +1
    rot.col(1) = ce.eigenvectors().col(0);  // eigenvalue -1

    std::vector<Eigen::Matrix2cd> hs(static_cast<std::size_t>(n_k));
    std::vector<cplx> q(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) {
        const double k = bz_point(j, n_k);
        Eigen::Matrix2cd h = sampler(k);
        h -= 0.5 * h.trace() * Eigen::Matrix2cd::Identity();
        if ((chiral * h + h * chiral).cwiseAbs().maxCoeff() > kChiralityTol) {
            throw Error(ErrorCode::NotChiral, "anticommutator exceeds tolerance at k = " +
                                                  std::to_string(k));
        }
        h = rot.adjoint() * h * rot;
        const auto idx = static_cast<std::size_t>(j);
        q[idx] = h(0, 1);
        if (std::abs(q[idx]) < kGapClosureTol) {
            throw GapClosureError(k, "off-diagonal vanishes at k = " + std::to_string(k));
        }
        hs[idx] = h;
    }

    double phase = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        phase += std::arg(q[(j + 1) % q.size()] / q[j]);
    }
    WindingResult r;
    r.winding = static_cast<int>(std::lround(-phase / (2.0 * pi)));

    const double dk = 2.0 * pi / n_k;
    cplx sum = 0.0;
    for (std::size_t j = 0; j < hs.size(); ++j) {
        const auto& next = hs[(j + 1) % hs.size()];
        const auto& prev = hs[(j + hs.size() - 1) % hs.size()];
        const Eigen::Matrix2cd dh = (next - prev) / (2.0 * dk);
        sum += (sigma_z() * hs[j].inverse() * dh).trace();
    }
    r.integral = (sum * dk / (4.0 * pi * I)).real();
    r.residual = std::abs(r.integral - r.winding);
    return r;
}

struct ZakPhase {
    double phase{0.0};     // (-pi, pi]
    double residual{0.0};  // distance to the nearest of {0, pi}
    bool quantized{false};

    double in_units_of_pi() const { return phase / pi; }
    /// 0 or 1: the quantized value mod 2 pi in units of pi.
    int parity() const { return phase_distance(phase, pi) < phase_distance(phase, 0.0) ? 1 : 0; }
};

inline ZakPhase make_zak(double phase) {
    ZakPhase z;
    z.phase = canonical_phase(phase);
    z.residual = std::min(phase_distance(z.phase, 0.0), phase_distance(z.phase, pi));
    z.quantized = z.residual < kQuantizationTol;
    return z;
}

/// Gauge-invariant Wilson-loop phase gamma = -sum_k Im log <u_k|u_{k+dk}> over a
/// closed, k-ordered loop; the last state connects back to the first.
inline ZakPhase zak_phase_discrete(std::span<const Eigen::VectorXcd> states) {
    if (states.size() < 64) {
        throw Error(ErrorCode::OutOfRange,
                    "Wilson loop needs >= 64 points, got " + std::to_string(states.size()));
    }
    cplx product = 1.0;
    for (std::size_t j = 0; j < states.size(); ++j) {
        const auto& a = states[j];
        const auto& b = states[(j + 1) % states.size()];
        if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "state sizes differ");
        const cplx overlap = a.dot(b) / (a.norm() * b.norm());
        if (std::abs(overlap) < kMinOverlap) {
            throw Error(ErrorCode::VanishingOverlap,
                        "|overlap| = " + std::to_string(std::abs(overlap)) + " at step " +
                            std::to_string(j));
        }
        product *= overlap / std::abs(overlap);
    }
    return make_zak(-std::arg(product));
}

/// Bare-chain Berry connection i<phi|d_k phi>, identical for both bands in
/// the library gauge.
inline double ssh_berry_connection(double k, const ModelParams& p) {
    const double e = detail::require_gapped(k, p);
    return p.Jp * (p.J * std::cos(k) + p.Jp) / (2.0 * e * e);
}

inline std::vector<Eigen::VectorXcd> ssh_band_states(Band band, int n_k, const ModelParams& p) {
    std::vector<Eigen::VectorXcd> out;
    out.reserve(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) {
        const auto v = ssh_eigenvectors(bz_point(j, n_k), p);
        out.emplace_back(band == Band::plus ? v.plus : v.minus);
    }
    return out;
}

/// Multiplies every state by an independent random phase.
inline void randomize_gauge(std::vector<Eigen::VectorXcd>& states, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (auto& s : states) s *= std::exp(I * angle(rng));
}

struct ManyBodyZak {
    ZakPhase zak;
    int path_points{0};  // grid points after adaptive refinement
};

/// Zak phase of one many-body band of the full momentum blocks. The band
/// starts as level `state_index` (by energy) at k = -pi and is followed by
/// maximal overlap; a step whose best overlap drops below 0.9 is bisected
/// (up to 16 levels) so narrow anticrossings are followed adiabatically.
/// Throws BandTrackingAmbiguous if the two best overlaps stay within 5%.
inline ManyBodyZak many_body_zak(const ModelParams& p, int state_index, int n_k = kDefaultNk,
                                 unsigned long long gauge_seed = 0) {
    p.validate();
    const Eigen::Index dim = 2 * (p.n_max + 1);
    if (state_index < 0 || state_index >= dim) {
        throw Error(ErrorCode::OutOfRange, "state_index = " + std::to_string(state_index));
    }
    if (n_k < 64) throw Error(ErrorCode::OutOfRange, "n_k = " + std::to_string(n_k));

    std::vector<Eigen::VectorXcd> path;
    path.reserve(static_cast<std::size_t>(n_k) + 1);
    {
        const auto sys = diagonalize(build_momentum_block(-pi, p).matrix);
        path.emplace_back(sys.vectors.col(state_index));
    }

    constexpr int max_depth = 16;
    std::function<void(double, double, int)> advance = [&](double ka, double kb, int depth) {
        const auto sys = diagonalize(build_momentum_block(kb, p).matrix);
        const Eigen::VectorXd ov = (sys.vectors.adjoint() * path.back()).cwiseAbs();
        Eigen::Index best_i = 0;
        const double best = ov.maxCoeff(&best_i);
        double second = 0.0;
        for (Eigen::Index i = 0; i < ov.size(); ++i) {
            if (i != best_i) second = std::max(second, ov[i]);
        }
        if (best < 0.9 && depth < max_depth) {
            const double mid = 0.5 * (ka + kb);
            advance(ka, mid, depth + 1);
            advance(mid, kb, depth + 1);
            return;
        }
        if (second >= 0.95 * best) {
            throw Error(ErrorCode::BandTrackingAmbiguous,
                        "overlaps " + std::to_string(best) + " and " + std::to_string(second) +
                            " at k = " + std::to_string(kb) + ", omega = " +
                            std::to_string(p.omega));
        }
        path.emplace_back(sys.vectors.col(best_i));
    };
    for (int j = 1; j <= n_k; ++j) advance(bz_point(j - 1, n_k), bz_point(j, n_k), 0);

    if (gauge_seed != 0) randomize_gauge(path, gauge_seed);
    return {zak_phase_discrete(path), static_cast<int>(path.size())};
}

struct BerryConnection {
    double total{0.0};          // A_total = A_0 + A_lm
    double bare{0.0};           // A_0
    double light_matter{0.0};   // i a* da + i b* db
    double normalization_residual{0.0};  // imaginary part dropped by |a|^2 + |b|^2 = 1
};

/// Pointwise split of the RWA Berry connection with central differences of
/// step 2 pi / n_k. The light-matter term is real once |alpha|^2 + |beta|^2 = 1
/// is used; the discarded imaginary part is O(dk^2) and reported. The
/// quantized light-matter phase lives in gauge discontinuities of (alpha,
/// beta); integrate it with light_matter_zak().
inline BerryConnection berry_connection_split(int n, double k, const ModelParams& p, Band band,
                                              int n_k = kDefaultNk) {
    const double dk = 2.0 * pi / n_k;
    const auto centre = rwa_eigenvectors(n, k, p)[band];
    const auto fwd = rwa_eigenvectors(n, k + dk, p)[band];
    const auto bwd = rwa_eigenvectors(n, k - dk, p)[band];
    const cplx da = (fwd.alpha - bwd.alpha) / (2.0 * dk);
    const cplx db = (fwd.beta - bwd.beta) / (2.0 * dk);
    const cplx raw = I * std::conj(centre.alpha) * da + I * std::conj(centre.beta) * db;

    BerryConnection a;
    a.bare = ssh_berry_connection(k, p);
    a.light_matter = raw.real();
    a.normalization_residual = std::abs(raw.imag());
    a.total = a.bare + a.light_matter;
    return a;
}

/// Wilson loop of the RWA spinors (alpha, beta): the light-matter part of the
/// Zak phase, pi * nu_tilde mod 2 pi.
inline ZakPhase light_matter_zak(int n, Band band, const ModelParams& p, int n_k = kDefaultNk) {
    std::vector<Eigen::VectorXcd> states;
    states.reserve(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) {
        const auto v = rwa_eigenvectors(n, bz_point(j, n_k), p)[band];
        states.emplace_back((Eigen::VectorXcd(2) << v.alpha, v.beta).finished());
    }
    return zak_phase_discrete(states);
}

/// Wilson loop of the full RWA eigenstates alpha|phi_+, n> + beta|phi_-, n+1>,
/// embedded in sublattice x {n, n+1}.
inline ZakPhase rwa_state_zak(int n, Band band, const ModelParams& p, int n_k = kDefaultNk) {
    std::vector<Eigen::VectorXcd> states;
    states.reserve(static_cast<std::size_t>(n_k));
    for (int j = 0; j < n_k; ++j) {
        const double k = bz_point(j, n_k);
        const auto v = rwa_eigenvectors(n, k, p)[band];
        const auto phi = ssh_eigenvectors(k, p);
        Eigen::VectorXcd s(4);
        s << v.alpha * phi.plus, v.beta * phi.minus;
        states.push_back(std::move(s));
    }
    return zak_phase_discrete(states);
}

/// Chiral operator of the band-basis blocks: U^dagger sigma_z U with U the
/// stacked bare eigenvectors. Equal to -sigma_x in the library gauge for
/// every gapped k.
inline Eigen::Matrix2cd band_chiral_operator(const ModelParams& p) {
    const auto u = ssh_eigenvectors(0.5 * pi, p).unitary();
    return u.adjoint() * sigma_z() * u;
}

struct ClosureFlag {
    double k{0.0};
    double omega{0.0};
    std::string source;
};

struct TopologyReport {
    double omega{0.0};
    int n{0};
    std::optional<int> nu0;
    std::optional<int> nu_tilde;
    std::optional<int> nu_total;
    double residual_nu0{0.0};
    double residual_nu_tilde{0.0};
    double residual_nu_total{0.0};
    std::optional<ZakPhase> zak_bare;           // lower bare band
    std::optional<ZakPhase> zak_ground;         // many-body level 0
    std::optional<ZakPhase> zak_first_excited;  // many-body level 1
    std::vector<ClosureFlag> closure_flags;
    std::vector<std::string> warnings;

    bool flagged() const { return !closure_flags.empty(); }
    /// nu = nu0 + nu_tilde; vacuous when a closure withheld the integers.
    bool additive() const {
        if (flagged() || !nu0 || !nu_tilde || !nu_total) return true;
        return *nu_total == *nu0 + *nu_tilde;
    }
};

struct DecompositionOptions {
    int n_k{kDefaultNk};
    bool many_body{false};
    unsigned long long gauge_seed{0};
};

/// nu0 from the bare chain, nu_tilde from the band-basis RWA block (chiral
/// operator rotated to sigma_z), nu from the lab-frame RWA block.
inline TopologyReport invariant_decomposition(const ModelParams& p, int n,
                                              const DecompositionOptions& opt = {}) {
    TopologyReport r;
    r.omega = p.omega;
    r.n = n;

    auto guarded = [&](const std::string& source, auto&& body) {
        try {
            body();
        } catch (const GapClosureError& e) {
            r.closure_flags.push_back({e.k(), p.omega, source});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateAtK) throw;
            r.closure_flags.push_back({pi, p.omega, source});
        }
    };

    guarded("nu0", [&] {
        const auto w = winding_number_chiral(
            [&](double k) { return Eigen::Matrix2cd(bloch_hamiltonian(k, p).matrix); }, opt.n_k);
        r.nu0 = w.winding;
        r.residual_nu0 = w.residual;
        r.zak_bare = zak_phase_discrete(ssh_band_states(Band::minus, opt.n_k, p));
    });
    guarded("nu_tilde", [&] {
        const auto w = winding_number_chiral(
            [&](double k) { return Eigen::Matrix2cd(rwa_block(n, k, p).matrix); }, opt.n_k,
            band_chiral_operator(p));
        r.nu_tilde = w.winding;
        r.residual_nu_tilde = w.residual;
    });
    guarded("nu_total", [&] {
        const auto w = winding_number_chiral(
            [&](double k) { return Eigen::Matrix2cd(rwa_lab_frame(n, k, p).matrix); }, opt.n_k);
        r.nu_total = w.winding;
        r.residual_nu_total = w.residual;
    });
    if (r.flagged()) {
        r.nu_tilde.reset();
        r.nu_total.reset();
    }

    if (opt.many_body) {
        for (int level : {0, 1}) {
            try {
                const auto z = many_body_zak(p, level, opt.n_k, opt.gauge_seed);
                (level == 0 ? r.zak_ground : r.zak_first_excited) = z.zak;
            } catch (const Error& e) {
                r.warnings.push_back("level " + std::to_string(level) + ": " + e.what());
            }
        }
    }
    return r;
}

struct BlochTrajectory {
    std::vector<double> ks;
    std::vector<std::array<double, 2>> points;  // (v_x, v_y) with H - tr/2 = v . sigma
    int winding{0};
    bool encloses_origin{false};
    bool origin_on_path{false};
    double min_radius{0.0};
};

/// Bloch-vector path of the lab-frame RWA block over the zone. The path is
/// always returned; when it touches the origin, origin_on_path is set and
/// the winding is left at 0.
inline BlochTrajectory bloch_trajectory(int n, int n_k, const ModelParams& p) {
    if (n_k < 256) throw Error(ErrorCode::OutOfRange, "trajectory needs >= 256 k-points");
    BlochTrajectory t;
    t.ks.reserve(static_cast<std::size_t>(n_k));
    t.points.reserve(static_cast<std::size_t>(n_k));
    t.min_radius = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_k; ++j) {
        const double k = bz_point(j, n_k);
        const cplx ab = rwa_lab_frame(n, k, p).matrix(0, 1);
        t.ks.push_back(k);
        t.points.push_back({ab.real(), -ab.imag()});
        t.min_radius = std::min(t.min_radius, std::abs(ab));
    }
    t.origin_on_path = t.min_radius < kGapClosureTol;
    if (!t.origin_on_path) {
        double angle = 0.0;
        for (std::size_t j = 0; j < t.points.size(); ++j) {
            const auto& a = t.points[j];
            const auto& b = t.points[(j + 1) % t.points.size()];
            angle += std::remainder(std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]), 2.0 * pi);
        }
        t.winding = static_cast<int>(std::lround(angle / (2.0 * pi)));
        t.encloses_origin = t.winding != 0;
    }
    return t;
}

} // namespace cavity_ssh
