#include "cdslab/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "cdslab/error.hpp"
#include "cdslab/lp.hpp"
#include "cdslab/measures.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

std::vector<InputPair> sorted_domain(const PromiseFunction& f) {
    std::vector<InputPair> d = f.domain;
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

// Rows of counts over the union of keys, keys sorted.
std::vector<std::vector<u64>> align(const std::vector<MessageDistribution>& dists) {
    std::vector<u64> keys;
    for (const auto& d : dists) {
        for (const auto& e : d.entries) keys.push_back(e.first);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<std::vector<u64>> rows;
    for (const auto& d : dists) {
        std::vector<u64> row(keys.size(), 0);
        std::size_t j = 0;
        for (const auto& e : d.entries) {
            while (keys[j] != e.first) ++j;
            row[j] = e.second;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double l1(const std::vector<double>& a, const std::vector<u64>& b, double denom) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - static_cast<double>(b[j]) / denom);
    return s;
}

ChebyshevCenter lp_center(const std::vector<std::vector<u64>>& rows, u64 denominator) {
    const std::size_t m = rows.size();
    const std::size_t cols = rows[0].size();
    // Columns whose count profiles across rows are proportional are
    // interchangeable for the simulator; merge them.
    std::map<std::vector<u64>, std::size_t> group_of;
    std::vector<std::size_t> col_group(cols);
    std::vector<std::vector<u64>> group_counts;
    std::vector<u64> col_total(cols, 0);
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<u64> prof(m);
        u64 g = 0;
        for (std::size_t i = 0; i < m; ++i) {
            prof[i] = rows[i][c];
            g = std::gcd(g, prof[i]);
            col_total[c] += prof[i];
        }
        if (g > 0) {
            for (auto& v : prof) v /= g;
        }
        auto [it, inserted] = group_of.emplace(prof, group_counts.size());
        if (inserted) group_counts.emplace_back(m, 0);
        col_group[c] = it->second;
        for (std::size_t i = 0; i < m; ++i) group_counts[it->second][i] += rows[i][c];
    }
    const std::size_t ng = group_counts.size();
    const double denom = static_cast<double>(denominator);

    // Variables: Sim_G, then t, then v_{iG} for groups where row i has mass.
    LinearProgram lp;
    const int t_var = static_cast<int>(ng);
    int next = t_var + 1;
    std::vector<LinearConstraint> slack_sums(m);
    for (std::size_t i = 0; i < m; ++i) {
        slack_sums[i].sense = LinearConstraint::Sense::ge;
        slack_sums[i].terms.push_back({t_var, 1.0});
    }
    LinearConstraint total;
    total.sense = LinearConstraint::Sense::eq;
    total.rhs = 1.0;
    for (std::size_t g = 0; g < ng; ++g) total.terms.push_back({static_cast<int>(g), 1.0});
    lp.constraints.push_back(total);
    // sum_G |Sim_G - P_i(G)| = 2 sum_G (P_i(G) - Sim_G)^+ since both sum to one.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t g = 0; g < ng; ++g) {
            if (group_counts[g][i] == 0) continue;
            const int v = next++;
            LinearConstraint c;
            c.sense = LinearConstraint::Sense::ge;
            c.rhs = static_cast<double>(group_counts[g][i]) / denom;
            c.terms = {{v, 1.0}, {static_cast<int>(g), 1.0}};
            lp.constraints.push_back(c);
            slack_sums[i].terms.push_back({v, -2.0});
        }
    }
    for (auto& c : slack_sums) lp.constraints.push_back(std::move(c));
    lp.num_vars = next;
    lp.objective.assign(static_cast<std::size_t>(next), 0.0);
    lp.objective[static_cast<std::size_t>(t_var)] = 1.0;

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::optimal) throw Error("simulator linear program did not reach an optimum");

    std::vector<u64> group_total(ng, 0);
    for (std::size_t c = 0; c < cols; ++c) group_total[col_group[c]] += col_total[c];
    ChebyshevCenter out;
    out.center.resize(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t g = col_group[c];
        const double share = group_total[g] == 0 ? 0.0
                                                 : static_cast<double>(col_total[c]) /
                                                       static_cast<double>(group_total[g]);
        out.center[c] = std::max(0.0, sol.x[g]) * share;
    }
    for (const auto& r : rows) out.distances.push_back(l1(out.center, r, denom));
    out.radius = *std::max_element(out.distances.begin(), out.distances.end());
    return out;
}

struct QuantumInputResult {
    InputDiagnostic diag;
    ProductnessEntry product;
};

Vector pauli_eigenstate(int which) {
    // +Z, -Z, +X, -X, +Y, -Y
    const double h = 1.0 / std::sqrt(2.0);
    Vector v(2);
    switch (which) {
        case 0: v << 1.0, 0.0; break;
        case 1: v << 0.0, 1.0; break;
        case 2: v << h, h; break;
        case 3: v << h, -h; break;
        case 4: v << h, cplx(0.0, h); break;
        default: v << h, cplx(0.0, -h); break;
    }
    return v;
}

double pauli_spread(const CdqsProtocol& p, const QuantumChannel& n, const Matrix& rho_m) {
    const std::size_t k = n.input_layout().size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= 6;
    const Idx dm = static_cast<Idx>(n.output_dim());
    double worst = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
        Vector psi = Vector::Ones(1);
        std::size_t c = code;
        for (std::size_t i = 0; i < k; ++i) {
            psi = kron(psi, pauli_eigenstate(static_cast<int>(c % 6)));
            c /= 6;
        }
        Matrix w(dm, static_cast<Idx>(n.kraus().size()));
        for (std::size_t j = 0; j < n.kraus().size(); ++j) w.col(static_cast<Idx>(j)) = n.kraus()[j] * psi;
        const Matrix out = w * w.adjoint();
        worst = std::max(worst, blockwise_trace_norm(out - rho_m, n.output_layout(), p.classical_registers));
    }
    return worst;
}

bool qubit_secret(const CdqsProtocol& p) {
    if (p.d_q() > 4) return false;
    return std::all_of(p.secret.begin(), p.secret.end(), [](const Subsystem& s) { return s.dim == 2; });
}

QuantumInputResult analyze_quantum_input(const CdqsProtocol& p, InputPair in, FValue value, bool want_spread) {
    QuantumInputResult r;
    r.diag.x = r.product.x = in.x;
    r.diag.y = r.product.y = in.y;
    r.diag.value = r.product.value = value;
    const std::size_t dq = p.d_q();
    const double dqd = static_cast<double>(dq);

    const QuantumChannel n = effective_channel(p, in.x, in.y);
    // (I (x) K_k)|Phi+> has entries K_k(m, q)/sqrt(d_Q) at (q, m); the mid
    // state is the Gram product of these columns.
    const Idx dm = static_cast<Idx>(n.output_dim());
    Matrix cols(static_cast<Idx>(dq) * dm, static_cast<Idx>(n.kraus().size()));
    for (std::size_t k = 0; k < n.kraus().size(); ++k) {
        const Matrix& kk = n.kraus()[k];
        for (Idx q = 0; q < static_cast<Idx>(dq); ++q) cols.col(static_cast<Idx>(k)).segment(q * dm, dm) = kk.col(q);
    }
    cols /= std::sqrt(dqd);
    const DensityMatrix mid = DensityMatrix::assume_valid(cols * cols.adjoint(),
                                                          Layout{{kReferenceName, dq}}.concat(n.output_layout()));

    const Matrix rho_m = trace_out(mid.matrix(), mid.layout(), n.output_layout().names());
    const Matrix pi = Matrix::Identity(static_cast<Idx>(dq), static_cast<Idx>(dq)) / dqd;
    const Matrix diff = mid.matrix() - kron(pi, rho_m);
    std::vector<std::string> classical = p.classical_registers;
    r.product.product_distance = blockwise_trace_norm(diff, mid.layout(), classical);

    if (value == FValue::one) {
        const auto dec = p.decoder(in.x, in.y);
        if (!dec) throw DomainError(p.name + ": no decoder for a value-one input");
        if (dec->output_dim() != dq) throw LayoutError(p.name + ": decoder output dimension differs from the secret");
        const DensityMatrix out = apply_channel(*dec, mid);
        std::vector<std::string> out_order{kReferenceName};
        for (const auto& name : dec->output_layout().names()) out_order.push_back(name);
        const DensityMatrix ro = reordered(out, out_order);
        Vector target = Vector::Zero(static_cast<Idx>(dq * dq));
        for (std::size_t i = 0; i < dq; ++i) target(static_cast<Idx>(i * dq + i)) = 1.0 / std::sqrt(dqd);
        const double lower = trace_norm(ro.matrix() - target * target.adjoint());
        r.diag.correctness = lower;
        r.diag.correctness_upper = std::min(2.0, dqd * lower);
        r.product.entanglement_fidelity = fidelity_with_pure(target, ro.matrix());
    } else {
        r.diag.security = r.product.product_distance;
        r.diag.security_upper = std::min(2.0, dqd * r.diag.security);
        if (want_spread && qubit_secret(p)) {
            const Matrix rm = trace_out(mid.matrix(), mid.layout(), n.output_layout().names());
            r.diag.pauli_spread = pauli_spread(p, n, rm);
        }
    }
    return r;
}

std::vector<QuantumInputResult> analyze_quantum(const CdqsProtocol& p, const PromiseFunction& f,
                                                const VerifyOptions& opt, bool want_spread) {
    const auto domain = sorted_domain(f);
    std::vector<FValue> values(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) values[i] = f(domain[i].x, domain[i].y);
    std::vector<std::optional<QuantumInputResult>> res(domain.size());
    parallel_for(domain.size(), opt.workers, [&](std::size_t i) {
        if (values[i] == FValue::outside) return;
        res[i] = analyze_quantum_input(p, domain[i], values[i], want_spread);
    });
    std::vector<QuantumInputResult> out;
    for (auto& r : res) {
        if (r) out.push_back(std::move(*r));
    }
    return out;
}

}  // namespace

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t w = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = count;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < w; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

ChebyshevCenter l1_chebyshev_center(const std::vector<std::vector<u64>>& counts, u64 denominator, bool force_lp) {
    if (counts.empty()) throw DomainError("no distributions");
    const std::size_t cols = counts[0].size();
    for (const auto& r : counts) {
        if (r.size() != cols) throw DomainError("distributions over different supports");
    }
    std::vector<std::vector<u64>> unique_rows;
    std::vector<std::size_t> row_of;
    for (const auto& r : counts) {
        auto it = std::find(unique_rows.begin(), unique_rows.end(), r);
        row_of.push_back(static_cast<std::size_t>(it - unique_rows.begin()));
        if (it == unique_rows.end()) unique_rows.push_back(r);
    }
    const double denom = static_cast<double>(denominator);
    ChebyshevCenter u;
    if (unique_rows.size() == 1) {
        u.center.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) u.center[c] = static_cast<double>(unique_rows[0][c]) / denom;
        u.distances = {0.0};
    } else if (unique_rows.size() == 2 && !force_lp) {
        u.center.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            u.center[c] = 0.5 * static_cast<double>(unique_rows[0][c] + unique_rows[1][c]) / denom;
        }
        const double d = l1(u.center, unique_rows[0], denom);
        u.distances = {d, d};
    } else {
        u = lp_center(unique_rows, denominator);
    }
    ChebyshevCenter out;
    out.center = std::move(u.center);
    for (std::size_t i : row_of) out.distances.push_back(u.distances[i]);
    out.radius = *std::max_element(out.distances.begin(), out.distances.end());
    return out;
}

double blockwise_trace_norm(const Matrix& m, const Layout& layout, const std::vector<std::string>& classical) {
    std::vector<std::string> regs;
    for (const auto& c : classical) {
        if (layout.contains(c)) regs.push_back(c);
    }
    if (regs.empty()) return trace_norm(m);
    std::vector<std::string> order = regs;
    for (const auto& name : layout.without(regs).names()) order.push_back(name);
    const Matrix r = reorder(m, layout, order);
    const Idx dc = static_cast<Idx>(layout.select(regs).total_dim());
    const Idx db = static_cast<Idx>(layout.total_dim()) / dc;
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    for (Idx i = 0; i < dc; ++i) {
        for (Idx j = 0; j < dc; ++j) {
            if (i == j) continue;
            if (r.block(i * db, j * db, db, db).cwiseAbs().maxCoeff() > 1e-14 * scale) return trace_norm(m);
        }
    }
    double s = 0.0;
    for (Idx i = 0; i < dc; ++i) {
        const Matrix b = r.block(i * db, i * db, db, db);
        if (b.cwiseAbs().maxCoeff() == 0.0) continue;
        s += trace_norm(b);
    }
    return s;
}

double entangled_separation_bound(std::size_t d_q, double epsilon) {
    return 2.0 * (1.0 - 1.0 / std::sqrt(static_cast<double>(d_q))) - epsilon;
}

VerificationReport cds_verify(const CdsProtocol& p, const PromiseFunction& f, const VerifyOptions& opt) {
    VerificationReport rep;
    rep.protocol = p.name;
    rep.kind = "cds";
    rep.function = f.name;
    rep.n = std::max(p.nx, p.ny);
    rep.exhaustive = f.exhaustive;
    rep.cost = protocol_cost(p);
    const auto domain = sorted_domain(f);
    const double denom = static_cast<double>(transcript_denominator(p));
    std::vector<std::optional<InputDiagnostic>> diags(domain.size());
    bool used_lp = false;
    std::mutex mu;
    parallel_for(domain.size(), opt.workers, [&](std::size_t i) {
        const InputPair in = domain[i];
        const FValue v = f(in.x, in.y);
        if (v == FValue::outside) return;
        InputDiagnostic d;
        d.x = in.x;
        d.y = in.y;
        d.value = v;
        if (v == FValue::one) {
            for (u64 s = 0; s < p.secret_alphabet; ++s) {
                u64 bad = 0;
                for_each_transcript(p, in.x, in.y, s, [&](u64 ma, u64 mb, u64 w) {
                    if (p.decode(ma, in.x, mb, in.y) != s) bad += w;
                });
                d.correctness = std::max(d.correctness, static_cast<double>(bad) / denom);
            }
            d.correctness_upper = d.correctness;
        } else {
            std::vector<MessageDistribution> dists;
            for (u64 s = 0; s < p.secret_alphabet; ++s) dists.push_back(enumerate_message_distribution(p, in.x, in.y, s));
            const ChebyshevCenter c = l1_chebyshev_center(align(dists), dists[0].denominator, opt.force_lp);
            d.security = d.security_upper = c.radius;
            if (p.secret_alphabet > 2 || opt.force_lp) {
                std::lock_guard<std::mutex> lock(mu);
                used_lp = true;
            }
        }
        diags[i] = d;
    });
    for (auto& d : diags) {
        if (!d) continue;
        rep.epsilon_hat = std::max(rep.epsilon_hat, d->correctness);
        rep.delta_hat_lower = std::max(rep.delta_hat_lower, d->security);
        rep.inputs.push_back(*d);
    }
    rep.epsilon_upper = rep.epsilon_hat;
    rep.delta_hat_upper = rep.delta_hat_lower;
    rep.notes.push_back("exact enumeration of randomness");
    rep.notes.push_back(used_lp ? "simulator radius by linear program" : "simulator radius as half the L1 distance");
    if (!f.exhaustive) rep.notes.push_back("promise inputs sampled");
    return rep;
}

VerificationReport psm_verify(const PsmProtocol& p, const PromiseFunction& f, const VerifyOptions& opt) {
    VerificationReport rep;
    rep.protocol = p.name;
    rep.kind = "psm";
    rep.function = f.name;
    rep.n = std::max(p.nx, p.ny);
    rep.exhaustive = f.exhaustive;
    rep.cost = protocol_cost(p);
    const auto domain = sorted_domain(f);
    std::vector<FValue> values(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) values[i] = f(domain[i].x, domain[i].y);
    std::vector<MessageDistribution> dists(domain.size());
    std::vector<double> errors(domain.size(), 0.0);
    parallel_for(domain.size(), opt.workers, [&](std::size_t i) {
        if (values[i] == FValue::outside) return;
        dists[i] = enumerate_message_distribution(p, domain[i].x, domain[i].y);
        const u64 want = values[i] == FValue::one ? 1 : 0;
        u64 bad = 0;
        for (std::size_t e = 0; e < dists[i].entries.size(); ++e) {
            if (p.decode(dists[i].m_a(e), dists[i].m_b(e)) != want) bad += dists[i].entries[e].second;
        }
        errors[i] = static_cast<double>(bad) / static_cast<double>(dists[i].denominator);
    });
    std::vector<double> security(domain.size(), 0.0);
    for (FValue v : {FValue::zero, FValue::one}) {
        std::vector<std::size_t> members;
        std::vector<MessageDistribution> cls;
        for (std::size_t i = 0; i < domain.size(); ++i) {
            if (values[i] != v) continue;
            members.push_back(i);
            cls.push_back(dists[i]);
        }
        if (members.empty()) continue;
        const ChebyshevCenter c = l1_chebyshev_center(align(cls), cls[0].denominator, opt.force_lp);
        for (std::size_t k = 0; k < members.size(); ++k) security[members[k]] = c.distances[k];
    }
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (values[i] == FValue::outside) continue;
        InputDiagnostic d;
        d.x = domain[i].x;
        d.y = domain[i].y;
        d.value = values[i];
        d.correctness = d.correctness_upper = errors[i];
        d.security = d.security_upper = security[i];
        rep.epsilon_hat = std::max(rep.epsilon_hat, d.correctness);
        rep.delta_hat_lower = std::max(rep.delta_hat_lower, d.security);
        rep.inputs.push_back(d);
    }
    rep.epsilon_upper = rep.epsilon_hat;
    rep.delta_hat_upper = rep.delta_hat_lower;
    rep.notes.push_back("exact enumeration of randomness");
    rep.notes.push_back("one simulator per function value, Chebyshev center in L1");
    if (!f.exhaustive) rep.notes.push_back("promise inputs sampled");
    return rep;
}

VerificationReport cdqs_verify(const CdqsProtocol& p, const PromiseFunction& f, const VerifyOptions& opt) {
    VerificationReport rep;
    rep.protocol = p.name;
    rep.kind = "cdqs";
    rep.function = f.name;
    rep.n = std::max(p.nx, p.ny);
    rep.exhaustive = f.exhaustive;
    rep.cost = protocol_cost(p);
    for (auto& r : analyze_quantum(p, f, opt, true)) {
        rep.epsilon_hat = std::max(rep.epsilon_hat, r.diag.correctness);
        rep.epsilon_upper = std::max(rep.epsilon_upper, r.diag.correctness_upper);
        rep.delta_hat_lower = std::max(rep.delta_hat_lower, r.diag.security);
        rep.delta_hat_upper = std::max(rep.delta_hat_upper, r.diag.security_upper);
        rep.inputs.push_back(std::move(r.diag));
    }
    rep.notes.push_back("maximally entangled secret; diamond norm bracketed by the Choi value and d_Q times it");
    rep.notes.push_back("simulator fixed to rho_M of the entangled input");
    if (qubit_secret(p)) rep.notes.push_back("Pauli eigenstate products checked on value-zero inputs");
    if (!f.exhaustive) rep.notes.push_back("promise inputs sampled");
    return rep;
}

std::vector<ProductnessEntry> productness_check(const CdqsProtocol& p, const PromiseFunction& f,
                                                const VerifyOptions& opt) {
    std::vector<ProductnessEntry> out;
    for (auto& r : analyze_quantum(p, f, opt, false)) out.push_back(std::move(r.product));
    return out;
}

}  // namespace cdslab
