#include <gtest/gtest.h>

#include <random>

#include "cavity_ssh/model.hpp"
#include "oracles.hpp"

using namespace cavity_ssh;

namespace {
ModelParams chain(double J, double Jp) {
    ModelParams p;
    p.J = J;
    p.Jp = Jp;
    return p;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ConfigInvalid;  // sentinel: nothing thrown
}
} // namespace

TEST(Model, ValidateNamesField) {
    ModelParams p;
    p.omega = -1.0;
    try {
        p.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
        EXPECT_NE(std::string(e.what()).find("omega"), std::string::npos);
    }
    p = ModelParams{};
    p.n_sites = 7;
    EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::InvalidParams);
}

TEST(Model, BlochMatrixHermitianWithClosedFormBands) {
    const auto p = chain(1.0, 2.0);
    for (int j = 0; j < 64; ++j) {
        const double k = bz_point(j, 64);
        const auto b = bloch_hamiltonian(k, p);
        EXPECT_LT(b.hermiticity_error(), 1e-15);
        const auto [lo, hi] = oracle::eig2(b.matrix);
        const auto e = ssh_energies(k, p);
        EXPECT_NEAR(lo, e.minus, 1e-12);
        EXPECT_NEAR(hi, e.plus, 1e-12);
    }
    EXPECT_NEAR(ssh_upper_energy(pi, p), 1.0, 1e-12);  // |J - J'|
    EXPECT_NEAR(ssh_upper_energy(0.0, p), 3.0, 1e-12);
}

TEST(Model, BandsMatchRealSpaceRing) {
    const int L = 24;
    for (auto [J, Jp] : {std::pair{1.0, 2.0}, std::pair{2.0, 1.0}, std::pair{1.0, 0.5}}) {
        const auto p = chain(J, Jp);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::ssh_ring(L, J, Jp));
        std::vector<double> bands;
        for (int m = 0; m < L / 2; ++m) {
            const auto e = ssh_energies(bz_point(m, L / 2), p);
            bands.push_back(e.minus);
            bands.push_back(e.plus);
        }
        std::sort(bands.begin(), bands.end());
        for (int i = 0; i < L; ++i) EXPECT_NEAR(es.eigenvalues()[i], bands[i], 1e-12);
    }
}

TEST(Model, EigenvectorsAndGauge) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.1, 3.0), kk(-pi, pi);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = chain(u(rng), u(rng));
        const double k = kk(rng);
        const auto v = ssh_eigenvectors(k, p);
        const Eigen::Matrix2cd h = bloch_hamiltonian(k, p).matrix;
        const double e = ssh_upper_energy(k, p);
        EXPECT_LT((h * v.plus - e * v.plus).norm(), 1e-12);
        EXPECT_LT((h * v.minus + e * v.minus).norm(), 1e-12);
        EXPECT_LT((v.unitary().adjoint() * v.unitary() - Eigen::Matrix2cd::Identity()).norm(), 1e-12);
        EXPECT_NEAR(v.plus[0].imag(), 0.0, 1e-15);
        EXPECT_GT(v.plus[0].real(), 0.0);
        EXPECT_LT((v.minus + sigma_z() * v.plus).norm(), 1e-15);
    }
}

TEST(Model, CouplingMatrixElementsFromBruteForceProjection) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.1, 3.0), kk(-pi, pi);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = chain(u(rng), u(rng));
        const double k = kk(rng);
        const auto v = ssh_eigenvectors(k, p);
        const Eigen::Matrix2cd c = coupling_pattern(k);
        const auto m = coupling_matrix_elements(k, p);
        EXPECT_NEAR(std::abs(m(0, 0) - v.plus.dot(c * v.plus)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(m(1, 1) - v.minus.dot(c * v.minus)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(m(0, 1) - v.plus.dot(c * v.minus)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(m(0, 1) - (-I * gamma_coupling(k, p))), 0.0, 1e-12);
    }
}

TEST(Model, CouplingPatternIsFourierTransformOfBondSigns) {
    // real-space bond signs (+1 intra, -1 inter) on a ring, block-diagonalized at k_m
    const int L = 16;
    const Eigen::MatrixXd d = oracle::ssh_ring(L, 1.0, -1.0);
    for (int m = 0; m < L / 2; ++m) {
        const double k = bz_point(m, L / 2);
        Eigen::MatrixXcd u(L, 2);
        u.setZero();
        for (int c = 0; c < L / 2; ++c) {
            const cplx ph = std::exp(-I * (k * c)) / std::sqrt(L / 2.0);
            u(2 * c, 0) = ph;
            u(2 * c + 1, 1) = ph;
        }
        const Eigen::Matrix2cd block = u.adjoint() * d.cast<cplx>() * u;
        EXPECT_LT((block - coupling_pattern(k)).norm(), 1e-12);
        const Eigen::MatrixXd h = oracle::ssh_ring(L, 1.3, 0.7);
        const Eigen::Matrix2cd hb = u.adjoint() * h.cast<cplx>() * u;
        EXPECT_LT((hb - bloch_hamiltonian(k, chain(1.3, 0.7)).matrix).norm(), 1e-12);
    }
}

TEST(Model, ResonanceFrequencies) {
    const auto r = resonance_frequencies(chain(1.0, 2.0));
    EXPECT_DOUBLE_EQ(r.omega_plus, 6.0);
    EXPECT_DOUBLE_EQ(r.omega_minus, 2.0);
    EXPECT_FALSE(r.gapless_chain);
    EXPECT_TRUE(resonance_frequencies(chain(1.0, 1.0)).gapless_chain);
    // 2 E_+(0) and 2 E_+(pi)
    EXPECT_NEAR(r.omega_plus, 2.0 * ssh_upper_energy(0.0, chain(1.0, 2.0)), 1e-12);
    EXPECT_NEAR(r.omega_minus, 2.0 * ssh_upper_energy(pi, chain(1.0, 2.0)), 1e-12);
}

TEST(Model, DegenerateAtGapClosure) {
    const auto p = chain(1.0, 1.0);
    EXPECT_EQ(code_of([&] { ssh_eigenvectors(pi, p); }), ErrorCode::DegenerateAtK);
    EXPECT_EQ(code_of([&] { coupling_matrix_elements(pi, p); }), ErrorCode::DegenerateAtK);
    EXPECT_NO_THROW(ssh_eigenvectors(0.5, p));
}

TEST(Model, GridIsHalfOpen) {
    EXPECT_DOUBLE_EQ(bz_point(0, 8), -pi);
    EXPECT_NEAR(bz_point(4, 8), 0.0, 1e-15);
    EXPECT_NEAR(bz_point(8, 8), pi, 1e-15);
}
