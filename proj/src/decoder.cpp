#include "cdslab/decoder.hpp"

#include <cmath>

#include "cdslab/error.hpp"
#include "cdslab/measures.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

// Image of |i><j| under the channel.
Matrix image_of_unit(const QuantumChannel& ch, Idx i, Idx j) {
    const Idx d = static_cast<Idx>(ch.output_dim());
    Matrix out = Matrix::Zero(d, d);
    for (const auto& k : ch.kraus()) {
        out.noalias() += k.col(i) * k.col(j).adjoint();
    }
    return out;
}

// tr over the first (dc-dimensional) factor of an operator on C (x) B.
Matrix trace_first(const Matrix& m, Idx dc, Idx db) {
    Matrix out = Matrix::Zero(db, db);
    for (Idx c = 0; c < dc; ++c) out += m.block(c * db, c * db, db, db);
    return out;
}

Matrix sandwich(const Matrix& j, const Matrix& w, Idx dc, Idx db) {
    Matrix out(j.rows(), j.cols());
    for (Idx a = 0; a < dc; ++a) {
        for (Idx b = 0; b < dc; ++b) {
            out.block(a * db, b * db, db, db) = w * j.block(a * db, b * db, db, db) * w;
        }
    }
    return out;
}

// Rescales J so that tr_C J = I_B; directions where tr_C J vanishes are sent to |0>.
Matrix normalize_choi(const Matrix& j, Idx dc, Idx db) {
    const Matrix omega = trace_first(j, dc, db);
    const auto e = hermitian_eig(omega);
    const double cutoff = 1e-12 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
    RealVector inv(e.values.size());
    RealVector ker(e.values.size());
    for (Idx i = 0; i < e.values.size(); ++i) {
        const bool on = e.values(i) > cutoff;
        inv(i) = on ? 1.0 / std::sqrt(e.values(i)) : 0.0;
        ker(i) = on ? 0.0 : 1.0;
    }
    const Matrix w = e.vectors * inv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    Matrix out = sandwich(j, w, dc, db);
    if (ker.sum() > 0.0) {
        out.block(0, 0, db, db) += e.vectors * ker.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    }
    return 0.5 * (out + out.adjoint());
}

}  // namespace

DecoderResult find_best_decoder(const QuantumChannel& n, const QuantumChannel& target, const DecoderSearchOptions& options) {
    if (n.input_dim() != target.input_dim()) {
        throw LayoutError("decoder search: channel and target inputs differ");
    }
    const Idx da = static_cast<Idx>(n.input_dim());
    const Idx db = static_cast<Idx>(n.output_dim());
    const Idx dc = static_cast<Idx>(target.output_dim());

    // Objective tr(J_D C) with C = sum_ij T(|i><j|) (x) N(|j><i|)^T.
    Matrix c = Matrix::Zero(dc * db, dc * db);
    for (Idx i = 0; i < da; ++i) {
        for (Idx j = 0; j < da; ++j) {
            c += kron(image_of_unit(target, i, j), image_of_unit(n, j, i).transpose());
        }
    }
    c = 0.5 * (c + c.adjoint());
    const double scale = static_cast<double>(da * da);

    auto value = [&](const Matrix& j) { return (j.cwiseProduct(c.transpose())).sum().real() / scale; };

    Matrix j = normalize_choi(c, dc, db);
    double best = value(j);
    Matrix best_j = j;
    int rounds = 0;
    bool converged = false;
    while (rounds < options.max_rounds) {
        ++rounds;
        if (best >= 1.0 - 1e-14) {
            converged = true;
            break;
        }
        Matrix next = normalize_choi(j * c * j, dc, db);
        const double v = value(next);
        j = std::move(next);
        const double gain = v - best;
        if (v > best) {
            best = v;
            best_j = j;
        }
        if (std::abs(gain) < options.min_improvement) {
            converged = true;
            break;
        }
    }

    QuantumChannel decoder = channel_from_choi(best_j / static_cast<double>(db), n.output_layout(), target.output_layout());
    const QuantumChannel composed = compose(decoder, n);
    const double err = diamond_distance_bounds(composed, target).lower;
    return DecoderResult{std::move(decoder), err, best, rounds, converged};
}

}  // namespace cdslab
