// Prints the open-chain levels closest to the n = 0 resonance window centre
// together with their edge weight, for one cavity frequency.

#include <cstdio>
#include <cstdlib>

#include "cavity_ssh.hpp"

int main(int argc, char** argv) {
    using namespace cavity_ssh;
    ModelParams p;
    p.J = 1.0;
    p.Jp = 2.0;
    p.g = 0.35;
    p.n_sites = 24;
    p.n_max = 6;
    p.omega = argc > 1 ? std::atof(argv[1]) : 4.0;
    p.validate();

    const auto basis = ManyBodyBasis::real_space(p);
    const auto sys = diagonalize(build_obc_hamiltonian(p));
    const double centre = 0.5 * p.omega;
    std::printf("omega = %g, dimension = %ld\n", p.omega, static_cast<long>(sys.size()));
    for (Eigen::Index i = 0; i < sys.size(); ++i) {
        if (std::abs(sys.values[i] - centre) > 1.0) continue;
        std::printf("%4ld  E = %+.6f  edge weight = %.3f\n", static_cast<long>(i), sys.values[i],
                    edge_localization(sys.vectors.col(i), basis));
    }
    const auto r = resonance_frequencies(p);
    std::printf("resonances: Omega_- = %g, Omega_+ = %g\n", r.omega_minus, r.omega_plus);
}
