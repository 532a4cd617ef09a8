#include "cdslab/channel.hpp"

#include <algorithm>
#include <cmath>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

// Indices of the columns of k that hold a nonzero entry.
std::vector<Idx> support_columns(const Matrix& k) {
    std::vector<Idx> cols;
    for (Idx c = 0; c < k.cols(); ++c) {
        if (k.col(c).squaredNorm() != 0.0) cols.push_back(c);
    }
    return cols;
}

Idx as_idx(std::size_t n) { return static_cast<Idx>(n); }

// Columns are the row-major vectorizations of the Kraus operators.
Matrix stacked_kraus(const std::vector<Matrix>& kraus, Idx d_out, Idx d_in) {
    Matrix a(d_out * d_in, as_idx(kraus.size()));
    for (std::size_t k = 0; k < kraus.size(); ++k) {
        for (Idx o = 0; o < d_out; ++o) {
            for (Idx i = 0; i < d_in; ++i) {
                a(o * d_in + i, as_idx(k)) = kraus[k](o, i);
            }
        }
    }
    return a;
}

Matrix unstack(const Vector& col, Idx d_out, Idx d_in) {
    Matrix k(d_out, d_in);
    for (Idx o = 0; o < d_out; ++o) {
        for (Idx i = 0; i < d_in; ++i) {
            k(o, i) = col(o * d_in + i);
        }
    }
    return k;
}

// Where the subsystems of `layout` named by `inputs` go, and the layout after
// replacing them by `outputs`.
struct Placement {
    std::vector<std::string> rest_then_inputs;
    Layout rest;
    Layout result;
    std::vector<std::string> result_order;
};

Placement place(const Layout& layout, const Layout& inputs, const Layout& outputs) {
    for (const auto& s : inputs) {
        if (layout.dim_of(s.name) != s.dim) {
            throw LayoutError("subsystem '" + s.name + "' has dimension " + std::to_string(layout.dim_of(s.name)) +
                              ", channel expects " + std::to_string(s.dim));
        }
    }
    Placement p;
    p.rest = layout.without(inputs.names());
    p.rest_then_inputs = p.rest.names();
    for (const auto& n : inputs.names()) p.rest_then_inputs.push_back(n);
    Layout interim = p.rest.concat(outputs);
    std::size_t first_pos = layout.size();
    for (const auto& s : inputs) first_pos = std::min(first_pos, layout.index_of(s.name));
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (i == first_pos) {
            for (const auto& n : outputs.names()) p.result_order.push_back(n);
        }
        if (!inputs.contains(layout[i].name)) p.result_order.push_back(layout[i].name);
    }
    if (first_pos == layout.size()) {
        for (const auto& n : outputs.names()) p.result_order.push_back(n);
    }
    p.result = interim.select(p.result_order);
    return p;
}

}  // namespace

Isometry::Isometry(Matrix v, Layout input, Layout output) : v_(std::move(v)), in_(std::move(input)), out_(std::move(output)) {
    if (v_.rows() != as_idx(out_.total_dim()) || v_.cols() != as_idx(in_.total_dim())) {
        throw LayoutError("isometry shape does not match its layouts");
    }
    const Matrix g = v_.adjoint() * v_;
    if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > tol::invariant) {
        throw DomainError("matrix is not an isometry");
    }
}

QuantumChannel::QuantumChannel(std::vector<Matrix> kraus, Layout input, Layout output)
    : kraus_(std::move(kraus)), in_(std::move(input)), out_(std::move(output)) {
    if (kraus_.empty()) {
        throw DomainError("channel needs at least one Kraus operator");
    }
    const Idx di = as_idx(in_.total_dim());
    const Idx dout = as_idx(out_.total_dim());
    Matrix sum = Matrix::Zero(di, di);
    for (const auto& k : kraus_) {
        if (k.rows() != dout || k.cols() != di) {
            throw LayoutError("Kraus operator shape does not match channel layouts");
        }
        const auto cols = support_columns(k);
        if (cols.size() == static_cast<std::size_t>(di)) {
            sum.noalias() += k.adjoint() * k;
        } else if (!cols.empty()) {
            const Matrix kc = k(Eigen::all, cols);
            sum(cols, cols) += kc.adjoint() * kc;
        }
    }
    if (!sum.allFinite() || (sum - Matrix::Identity(di, di)).cwiseAbs().maxCoeff() > tol::invariant) {
        throw DomainError("Kraus operators are not trace preserving");
    }
}

QuantumChannel QuantumChannel::identity(const Layout& layout) {
    const Idx d = as_idx(layout.total_dim());
    return QuantumChannel({Matrix::Identity(d, d)}, layout, layout);
}

QuantumChannel QuantumChannel::unitary(const Matrix& u, const Layout& layout) { return QuantumChannel({u}, layout, layout); }

QuantumChannel QuantumChannel::from_isometry(const Isometry& v) {
    return QuantumChannel({v.matrix()}, v.input_layout(), v.output_layout());
}

QuantumChannel QuantumChannel::constant(const Layout& input, const DensityMatrix& sigma) {
    const auto e = hermitian_eig(sigma.matrix());
    const Idx di = as_idx(input.total_dim());
    const Idx dout = as_idx(sigma.dim());
    std::vector<Matrix> kraus;
    for (Idx j = 0; j < e.values.size(); ++j) {
        const double lam = e.values(j);
        if (lam <= 1e-15) continue;
        for (Idx i = 0; i < di; ++i) {
            Matrix k = Matrix::Zero(dout, di);
            k.col(i) = std::sqrt(lam) * e.vectors.col(j);
            kraus.push_back(std::move(k));
        }
    }
    // Renormalize the kept weight so the map is exactly trace preserving.
    double kept = 0.0;
    for (Idx j = 0; j < e.values.size(); ++j) kept += e.values(j) > 1e-15 ? e.values(j) : 0.0;
    for (auto& k : kraus) k /= std::sqrt(kept);
    return QuantumChannel(std::move(kraus), input, sigma.layout());
}

QuantumChannel QuantumChannel::depolarizing(const Layout& layout, double p) {
    if (p < 0.0 || p > 1.0) {
        throw DomainError("depolarizing probability must be in [0,1]");
    }
    const Idx d = as_idx(layout.total_dim());
    const Vector phi = maximally_entangled("a", "b", layout.total_dim()).amplitudes();
    const Matrix choi = (1.0 - p) * phi * phi.adjoint() +
                        p * Matrix::Identity(d * d, d * d) / static_cast<double>(d * d);
    return channel_from_choi(choi, layout, layout);
}

QuantumChannel QuantumChannel::dephasing(const Layout& layout, double p) {
    if (p < 0.0 || p > 1.0) {
        throw DomainError("dephasing probability must be in [0,1]");
    }
    const Idx d = as_idx(layout.total_dim());
    std::vector<Matrix> kraus;
    if (p < 1.0) kraus.push_back(std::sqrt(1.0 - p) * Matrix::Identity(d, d));
    if (p > 0.0) {
        for (Idx i = 0; i < d; ++i) {
            Matrix k = Matrix::Zero(d, d);
            k(i, i) = std::sqrt(p);
            kraus.push_back(std::move(k));
        }
    }
    return QuantumChannel(std::move(kraus), layout, layout);
}

QuantumChannel QuantumChannel::relabeled(const Layout& input, const Layout& output) const {
    return QuantumChannel(kraus_, input, output);
}

QuantumChannel with_input_order(const QuantumChannel& n, const std::vector<std::string>& order) {
    if (n.input_layout().names() == order) return n;
    const auto idx = reorder_indices(n.input_layout(), order);
    std::vector<Matrix> kraus;
    for (const auto& k : n.kraus()) {
        Matrix r(k.rows(), k.cols());
        for (std::size_t j = 0; j < idx.size(); ++j) r.col(as_idx(j)) = k.col(as_idx(idx[j]));
        kraus.push_back(std::move(r));
    }
    return QuantumChannel(std::move(kraus), n.input_layout().select(order), n.output_layout());
}

QuantumChannel with_output_order(const QuantumChannel& n, const std::vector<std::string>& order) {
    if (n.output_layout().names() == order) return n;
    const auto idx = reorder_indices(n.output_layout(), order);
    std::vector<Matrix> kraus;
    for (const auto& k : n.kraus()) {
        Matrix r(k.rows(), k.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) r.row(as_idx(i)) = k.row(as_idx(idx[i]));
        kraus.push_back(std::move(r));
    }
    return QuantumChannel(std::move(kraus), n.input_layout(), n.output_layout().select(order));
}

QuantumChannel minimal_kraus(const QuantumChannel& n) {
    const Idx di = as_idx(n.input_dim());
    const Idx dout = as_idx(n.output_dim());
    const Matrix a = stacked_kraus(n.kraus(), dout, di);
    std::vector<Matrix> kraus;
    if (a.cols() <= a.rows()) {
        // Columns a v_j for the eigenvectors of the Gram matrix; BDCSVD loses
        // accuracy on the highly degenerate spectra that show up here.
        const auto e = hermitian_eig(a.adjoint() * a);
        const double top = std::max(1.0, e.values(e.values.size() - 1));
        for (Idx j = e.values.size() - 1; j >= 0; --j) {
            if (e.values(j) <= 1e-24 * top) break;
            kraus.push_back(unstack(a * e.vectors.col(j), dout, di));
        }
    } else {
        const auto e = hermitian_eig(a * a.adjoint());
        for (Idx j = e.values.size() - 1; j >= 0; --j) {
            if (e.values(j) <= 1e-24 * std::max(1.0, e.values(e.values.size() - 1))) break;
            kraus.push_back(unstack(std::sqrt(e.values(j)) * e.vectors.col(j), dout, di));
        }
    }
    return QuantumChannel(std::move(kraus), n.input_layout(), n.output_layout());
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
    if (second.input_dim() != first.output_dim()) {
        throw LayoutError("cannot compose channels: " + to_string(first.output_layout()) + " into " +
                          to_string(second.input_layout()));
    }
    std::vector<Matrix> kraus;
    kraus.reserve(second.kraus().size() * first.kraus().size());
    for (const auto& b : second.kraus()) {
        for (const auto& a : first.kraus()) {
            kraus.push_back(b * a);
        }
    }
    QuantumChannel c(std::move(kraus), first.input_layout(), second.output_layout());
    if (c.kraus().size() > c.input_dim() * c.output_dim()) {
        return minimal_kraus(c);
    }
    return c;
}

QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
    std::vector<Matrix> kraus;
    kraus.reserve(a.kraus().size() * b.kraus().size());
    for (const auto& ka : a.kraus()) {
        for (const auto& kb : b.kraus()) {
            kraus.push_back(kron(ka, kb));
        }
    }
    return QuantumChannel(std::move(kraus), a.input_layout().concat(b.input_layout()),
                          a.output_layout().concat(b.output_layout()));
}

Matrix apply_channel_to_operator(const QuantumChannel& n, const Matrix& m, const Layout& layout, Layout* out_layout) {
    if (m.rows() != m.cols() || m.rows() != as_idx(layout.total_dim())) {
        throw LayoutError("operator shape does not match layout " + to_string(layout));
    }
    const Placement p = place(layout, n.input_layout(), n.output_layout());
    const Matrix r = p.rest.empty() && layout.names() == n.input_layout().names()
                         ? m
                         : reorder(m, layout, p.rest_then_inputs);
    const Idx dr = as_idx(p.rest.total_dim());
    const Idx di = as_idx(n.input_dim());
    const Idx dout = as_idx(n.output_dim());
    Matrix out = Matrix::Zero(dr * dout, dr * dout);
    Matrix tmp(dout, di);
    for (const auto& k : n.kraus()) {
        const auto cols = support_columns(k);
        if (cols.empty()) continue;
        if (cols.size() < static_cast<std::size_t>(di) / 2) {
            const Matrix kc = k(Eigen::all, cols);
            std::vector<Idx> ia(cols.size()), ib(cols.size());
            for (Idx a = 0; a < dr; ++a) {
                for (std::size_t t = 0; t < cols.size(); ++t) ia[t] = a * di + cols[t];
                for (Idx b = 0; b < dr; ++b) {
                    for (std::size_t t = 0; t < cols.size(); ++t) ib[t] = b * di + cols[t];
                    const Matrix block = r(ia, ib);
                    out.block(a * dout, b * dout, dout, dout).noalias() += kc * block * kc.adjoint();
                }
            }
            continue;
        }
        for (Idx a = 0; a < dr; ++a) {
            for (Idx b = 0; b < dr; ++b) {
                tmp.noalias() = k * r.block(a * di, b * di, di, di);
                out.block(a * dout, b * dout, dout, dout).noalias() += tmp * k.adjoint();
            }
        }
    }
    const Layout interim = p.rest.concat(n.output_layout());
    if (out_layout) *out_layout = p.result;
    if (interim.names() == p.result_order) return out;
    return reorder(out, interim, p.result_order);
}

DensityMatrix apply_channel(const QuantumChannel& n, const DensityMatrix& rho) {
    Layout l;
    Matrix out = apply_channel_to_operator(n, rho.matrix(), rho.layout(), &l);
    return DensityMatrix::assume_valid(std::move(out), std::move(l));
}

StateVector apply_isometry(const Isometry& v, const StateVector& psi) {
    const Layout& layout = psi.layout();
    const Placement p = place(layout, v.input_layout(), v.output_layout());
    const Vector r = reorder(psi.amplitudes(), layout, p.rest_then_inputs);
    const Idx dr = as_idx(p.rest.total_dim());
    const Idx di = as_idx(v.input_layout().total_dim());
    const Idx dout = as_idx(v.output_layout().total_dim());
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> in(r.data(), dr, di);
    RowMat res = in * v.matrix().transpose();
    Vector flat = Eigen::Map<const Vector>(res.data(), dr * dout);
    const Layout interim = p.rest.concat(v.output_layout());
    if (interim.names() != p.result_order) flat = reorder(flat, interim, p.result_order);
    return StateVector::normalized(std::move(flat), p.result);
}

Isometry purify_channel(const QuantumChannel& n, const std::string& env_name) {
    const QuantumChannel m = n.kraus().size() > n.input_dim() * n.output_dim() ? minimal_kraus(n) : n;
    const Idx di = as_idx(m.input_dim());
    const Idx dout = as_idx(m.output_dim());
    const Idx ne = as_idx(m.kraus().size());
    Matrix v(dout * ne, di);
    for (Idx k = 0; k < ne; ++k) {
        for (Idx o = 0; o < dout; ++o) {
            v.row(o * ne + k) = m.kraus()[static_cast<std::size_t>(k)].row(o);
        }
    }
    Layout out = m.output_layout().concat(Layout{{env_name, static_cast<std::size_t>(ne)}});
    return Isometry(std::move(v), m.input_layout(), std::move(out));
}

QuantumChannel complementary_channel(const QuantumChannel& n, const std::string& env_name) {
    const Idx di = as_idx(n.input_dim());
    const Idx dout = as_idx(n.output_dim());
    const Idx ne = as_idx(n.kraus().size());
    std::vector<Matrix> kraus;
    kraus.reserve(static_cast<std::size_t>(dout));
    for (Idx o = 0; o < dout; ++o) {
        Matrix c(ne, di);
        for (Idx k = 0; k < ne; ++k) {
            c.row(k) = n.kraus()[static_cast<std::size_t>(k)].row(o);
        }
        kraus.push_back(std::move(c));
    }
    return QuantumChannel(std::move(kraus), n.input_layout(), Layout{{env_name, static_cast<std::size_t>(ne)}});
}

DensityMatrix choi_state(const QuantumChannel& n) {
    const Idx di = as_idx(n.input_dim());
    const Idx dout = as_idx(n.output_dim());
    const Matrix a = stacked_kraus(n.kraus(), dout, di);
    Matrix j = a * a.adjoint() / static_cast<double>(di);
    return DensityMatrix::assume_valid(std::move(j), n.output_layout().concat(n.input_layout().suffixed("'")));
}

QuantumChannel channel_from_choi(const Matrix& choi, const Layout& input, const Layout& output) {
    const Idx di = as_idx(input.total_dim());
    const Idx dout = as_idx(output.total_dim());
    if (choi.rows() != di * dout || choi.cols() != di * dout) {
        throw LayoutError("Choi matrix shape does not match layouts");
    }
    const auto e = hermitian_eig(choi * static_cast<double>(di));
    std::vector<Matrix> kraus;
    const double top = std::max(1.0, e.values(e.values.size() - 1));
    for (Idx j = e.values.size() - 1; j >= 0; --j) {
        if (e.values(j) <= 1e-13 * top) break;
        kraus.push_back(unstack(std::sqrt(e.values(j)) * e.vectors.col(j), dout, di));
    }
    return QuantumChannel(std::move(kraus), input, output);
}

}  // namespace cdslab
