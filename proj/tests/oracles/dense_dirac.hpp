#pragma once

// Dense reference for the grid Dirac Hamiltonian. The kinetic operator is
// assembled from an explicit DFT matrix (no FFT library) and the static
// evolution operator comes from a full Hermitian diagonalization.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double c_light = 137.0359991;

/// H on the 2n-dimensional space (upper block, lower block), position basis,
/// grid z_j = -L/2 + j L/n with spectral momentum lattice.
inline Eigen::MatrixXcd dense_hamiltonian(std::size_t n, double L, const std::vector<double>& v) {
    const double pi = std::acos(-1.0);
    const double dz = L / static_cast<double>(n);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
            cplx p{};
            for (std::size_t m = 0; m < n; ++m) {
                const long s = m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
                const double k = 2.0 * pi * static_cast<double>(s) / L;
                p += k * std::polar(1.0, k * dz * (static_cast<double>(j) - static_cast<double>(l)));
            }
            p /= static_cast<double>(n);
            // c sigma_1 p
            h(j, n + l) += c_light * p;
            h(n + j, l) += c_light * p;
        }
        h(j, j) += c_light * c_light + v[j];
        h(n + j, n + j) += -c_light * c_light + v[j];
    }
    return 0.5 * (h + h.adjoint());
}

/// exp(-i H t) for Hermitian H.
inline Eigen::MatrixXcd unitary(const Eigen::MatrixXcd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd ph(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) ph[i] = std::polar(1.0, -es.eigenvalues()[i] * t);
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace oracle
