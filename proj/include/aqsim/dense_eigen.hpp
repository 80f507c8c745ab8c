#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "aqsim/grid.hpp"
#include "aqsim/propagator.hpp"

// Dense diagonalization oracle for the grid Hamiltonian. Desk scale only;
// states come back l2-normalized and mutually orthonormal.

namespace aqsim {

struct eigen_pair {
    double energy;
    std::vector<double> state;
};

inline Eigen::MatrixXd dense_hamiltonian(const grid1d& g, const potential& V,
                                         const units& u = units{}) {
    const double kin = u.hbar * u.hbar / (2.0 * u.default_mass * g.dx * g.dx);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(g.n, g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        H(i, i) = 2.0 * kin + V.values[i];
        if (i + 1 < g.n) {
            H(i, i + 1) = -kin;
            H(i + 1, i) = -kin;
        }
    }
    if (g.boundary == boundary_kind::periodic) {
        H(0, g.n - 1) += -kin;
        H(g.n - 1, 0) += -kin;
    }
    return H;
}

inline std::vector<eigen_pair> eigen_dense(const grid1d& g, const potential& V,
                                           std::size_t k, const units& u = units{}) {
    g.validate();
    V.validate(g);
    if (g.n > 4096) throw size_cap("eigen_dense: grid too large for dense solve");
    Eigen::MatrixXd H = dense_hamiltonian(g, V, u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
        throw convergence_error("eigen_dense: eigensolver failed");
    std::vector<eigen_pair> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k && j < g.n; ++j) {
        Eigen::VectorXd v = solver.eigenvectors().col(j);
        double e = solver.eigenvalues()(j);
        double resid = (H * v - e * v).norm();
        if (resid > 1e-8) throw convergence_error("eigen_dense: residual too large");
        if (v.sum() < 0.0) v = -v; // deterministic sign
        out.push_back({e, std::vector<double>(v.data(), v.data() + v.size())});
    }
    return out;
}

} // namespace aqsim
