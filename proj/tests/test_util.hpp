#pragma once

#include <cmath>
#include <random>

#include "cdslab/channel.hpp"
#include "cdslab/states.hpp"

namespace cdslab::testing {

inline Matrix ginibre(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    }
    return m;
}

inline StateVector random_pure(std::mt19937_64& rng, const Layout& layout) {
    Matrix g = ginibre(rng, static_cast<Eigen::Index>(layout.total_dim()), 1);
    return StateVector::normalized(g.col(0), layout);
}

/// Random mixed state of the given rank (full rank when rank = 0).
inline DensityMatrix random_density(std::mt19937_64& rng, const Layout& layout, Eigen::Index rank = 0) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    const Matrix g = ginibre(rng, d, rank > 0 ? rank : d);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()), layout);
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index d) {
    Eigen::HouseholderQR<Matrix> qr(ginibre(rng, d, d));
    return qr.householderQ() * Matrix::Identity(d, d);
}

/// Random channel with `kraus_count` operators, from a random isometry.
inline QuantumChannel random_channel(std::mt19937_64& rng, const Layout& in, const Layout& out, int kraus_count) {
    const auto di = static_cast<Eigen::Index>(in.total_dim());
    const auto dout = static_cast<Eigen::Index>(out.total_dim());
    Eigen::HouseholderQR<Matrix> qr(ginibre(rng, dout * kraus_count, di));
    const Matrix v = qr.householderQ() * Matrix::Identity(dout * kraus_count, di);
    std::vector<Matrix> kraus;
    for (int k = 0; k < kraus_count; ++k) kraus.push_back(v.block(k * dout, 0, dout, di));
    return QuantumChannel(std::move(kraus), in, out);
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace cdslab::testing
