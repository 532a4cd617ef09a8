#include "cdslab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "cdslab/cdqs.hpp"
#include "cdslab/classical_protocols.hpp"
#include "cdslab/error.hpp"
#include "cdslab/forrelation.hpp"
#include "cdslab/lowerbound.hpp"
#include "cdslab/measures.hpp"
#include "cdslab/quantum_protocols.hpp"
#include "cdslab/report_json.hpp"
#include "cdslab/verifier.hpp"

namespace cdslab {

namespace {

using json = nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string num(u64 v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

std::string pair_label(u64 x, u64 y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

std::vector<int> sizes(const SuiteConfig& c, std::vector<int> sweep) {
    if (c.n) return {*c.n};
    return sweep;
}

bool selected(const SuiteConfig& c, const std::string& name) {
    return c.protocol.empty() || name.find(c.protocol) != std::string::npos;
}

void check(SuiteOutput& out, std::string name, bool ok, std::string detail = {}) {
    out.checks.push_back({std::move(name), ok, std::move(detail)});
}

const std::vector<std::string> kReportColumns{"protocol",        "n",           "x",          "y",
                                              "value",           "correctness", "security",   "cost_bits",
                                              "cost_qubits",     "epsilon_hat", "delta_hat_lower",
                                              "delta_hat_upper"};

void add_report(SuiteOutput& out, const VerificationReport& r) {
    if (out.columns.empty()) out.columns = kReportColumns;
    out.records.push_back(to_json(r));
    for (const auto& d : r.inputs) {
        const bool one = d.value == FValue::one;
        out.rows.push_back({r.protocol, num(r.n), num(d.x), num(d.y), one ? "1" : "0", one ? num(d.correctness) : "",
                            one ? "" : num(d.security), num(r.cost.communication_bits),
                            num(r.cost.communication_qubits), num(r.epsilon_hat), num(r.delta_hat_lower),
                            num(r.delta_hat_upper)});
    }
}

void require_exact_zero(SuiteOutput& out, const VerificationReport& r) {
    check(out, r.protocol + " epsilon_hat = 0", r.epsilon_hat == 0.0, num(r.epsilon_hat));
    check(out, r.protocol + " delta_hat = 0", r.delta_hat_upper == 0.0, num(r.delta_hat_upper));
}

SuiteOutput suite_neq_classical(const SuiteConfig& c) {
    SuiteOutput out;
    for (int n : sizes(c, {1, 2, 3, 4})) {
        auto r = cds_verify(neq_cds(n), neq_function(n), {c.workers});
        r.seed = c.seed;
        require_exact_zero(out, r);
        add_report(out, r);
    }
    return out;
}

SuiteOutput suite_and_cds(const SuiteConfig& c) {
    SuiteOutput out;
    auto r = cds_verify(and_cds(), and_function(), {c.workers});
    r.seed = c.seed;
    require_exact_zero(out, r);
    add_report(out, r);
    return out;
}

SuiteOutput suite_ip_psm(const SuiteConfig& c) {
    SuiteOutput out;
    for (int n : sizes(c, {1, 2, 3})) {
        VerifyOptions opt{c.workers, true};
        auto r = psm_verify(ip_psm(n), inner_product_function(n), opt);
        r.seed = c.seed;
        require_exact_zero(out, r);
        add_report(out, r);
    }
    return out;
}

SuiteOutput suite_hybrid(const SuiteConfig& c) {
    SuiteOutput out;
    for (int n : sizes(c, {4, 8, 16})) {
        auto r = cds_verify(neq_promise_cds(n), promise_neq_function(n, c.seed), {c.workers});
        r.seed = c.seed;
        const int log_n = ceil_log2(static_cast<u64>(n));
        check(out, r.protocol + " epsilon_hat = 0", r.epsilon_hat == 0.0, num(r.epsilon_hat));
        check(out, r.protocol + " delta_hat <= 1e-9", r.delta_hat_upper <= 1e-9, num(r.delta_hat_upper));
        check(out, r.protocol + " uses log n EPR pairs", r.cost.entanglement_pairs == log_n,
              num(r.cost.entanglement_pairs));
        check(out, r.protocol + " classical bits <= 4 log n + 1", r.cost.communication_bits <= 4 * log_n + 1,
              num(r.cost.communication_bits));
        r.notes.push_back("cost table: " + std::to_string(r.cost.entanglement_pairs) + " EPR pairs, " +
                          std::to_string(r.cost.communication_bits) + " message bits (" + std::to_string(log_n) +
                          " + " + std::to_string(log_n) + " shortened strings in the clear, " +
                          std::to_string(r.cost.communication_bits - 2 * log_n) + " inner CDS), " +
                          std::to_string(r.cost.randomness_bits) + " shared random bits");
        add_report(out, r);
    }
    return out;
}

SuiteOutput suite_dj_shorten(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"n", "class", "x", "y", "pr_equal", "diagonal_min", "diagonal_max"};
    const int samples = c.reps.value_or(8);
    for (int n : sizes(c, {2, 4, 8, 16})) {
        if (n < 2 || n > 64 || !is_power_of_two(static_cast<u64>(n))) {
            throw DomainError("dj-shorten needs n a power of 2 in [2, 64]");
        }
        std::mt19937_64 rng(derive_seed(c.seed, static_cast<u64>(n)));
        for (int cls = 0; cls < 2; ++cls) {
            for (int t = 0; t < samples; ++t) {
                const u64 x = rng() & low_mask(n);
                u64 mask = 0;
                if (cls == 1) {
                    std::vector<int> idx(static_cast<std::size_t>(n));
                    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
                    for (int i = n - 1; i > 0; --i)
                        std::swap(idx[static_cast<std::size_t>(i)], idx[uniform_below(rng, static_cast<u64>(i + 1))]);
                    for (int i = 0; i < n / 2; ++i) mask |= u64{1} << idx[static_cast<std::size_t>(i)];
                }
                const u64 y = x ^ mask;
                const auto d = dj_shorten(bits_from_u64(x, n), bits_from_u64(y, n));
                const double eq = d.probability_equal();
                double dmin = 1.0, dmax = 0.0;
                for (u64 a = 0; a < static_cast<u64>(n); ++a) {
                    dmin = std::min(dmin, d.probability(a, a));
                    dmax = std::max(dmax, d.probability(a, a));
                }
                const std::string label = "n=" + num(n) + " " + bits_to_string(x, n) + "," + bits_to_string(y, n);
                if (cls == 0) {
                    check(out, label + " Pr[a=b] = 1", std::abs(eq - 1.0) <= 1e-9, num(eq));
                    check(out, label + " diagonal = 1/n",
                          std::abs(dmin - 1.0 / n) <= 1e-9 && std::abs(dmax - 1.0 / n) <= 1e-9);
                } else {
                    check(out, label + " Pr[a=b] = 0", std::abs(eq) <= 1e-9, num(eq));
                }
                out.records.push_back({{"n", n},
                                       {"class", cls == 0 ? "equal" : "half_distance"},
                                       {"x", bits_to_string(x, n)},
                                       {"y", bits_to_string(y, n)},
                                       {"pr_equal", eq},
                                       {"diagonal_min", dmin},
                                       {"diagonal_max", dmax}});
                out.rows.push_back({num(n), cls == 0 ? "equal" : "half_distance", bits_to_string(x, n),
                                    bits_to_string(y, n), num(eq), num(dmin), num(dmax)});
            }
        }
    }
    return out;
}

SuiteOutput suite_bhm(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"n", "instance", "seed", "promised_value", "p_correct", "equality", "vote_identity",
                   "cost_bits", "entanglement_pairs"};
    const int instances = c.reps.value_or(100);
    for (int n : sizes(c, {2, 4, 6})) {
        const auto p = bhm_psqm(n);
        const u64 rmax = u64{1} << p.inner.randomness_bits;
        const CostReport cost = p.cost();
        struct Row {
            u64 seed = 0;
            BhmInstance inst;
            double p_correct = 0.0;
            bool identity = true;
            std::vector<std::pair<std::pair<u64, u64>, int>> inner;
        };
        std::vector<Row> rows(static_cast<std::size_t>(instances));
        parallel_for(rows.size(), c.workers, [&](std::size_t i) {
            Row& r = rows[i];
            r.seed = derive_seed(derive_seed(c.seed, static_cast<u64>(n)), i);
            r.inst = bhm_instance(n, static_cast<int>(i % 2), r.seed);
            const double p1 = p.probability_vote_one(r.inst);
            r.p_correct = r.inst.promised_value == 1 ? p1 : 1.0 - p1;
            std::mt19937_64 rng(r.seed);
            for (const auto& o : p.outcomes(r.inst)) {
                const auto [a, b] = r.inst.matching[static_cast<std::size_t>(o.edge)];
                const int expect = bit(r.inst.x, a) ^ bit(r.inst.x, b) ^ bit(r.inst.w, o.edge);
                if (rmax <= 1024) {
                    for (u64 s = 0; s < rmax; ++s) r.identity = r.identity && p.vote(r.inst, o, s) == expect;
                } else {
                    for (int s = 0; s < 16; ++s) r.identity = r.identity && p.vote(r.inst, o, rng() % rmax) == expect;
                }
                r.inner.push_back({{p.alice_inner_input(o.k), p.bob_inner_input(r.inst, o.l, o.edge)}, expect});
            }
        });
        std::map<std::pair<u64, u64>, int> inner_inputs;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            const bool equality = std::abs(r.p_correct - 2.0 / 3.0) <= 1e-12;
            const std::string label = "n=" + num(n) + " instance " + num(static_cast<u64>(i));
            check(out, label + " single-shot correctness >= 2/3", r.p_correct >= 2.0 / 3.0 - 1e-12,
                  num(r.p_correct) + (equality ? " (equality)" : ""));
            check(out, label + " vote identity", r.identity);
            for (const auto& [in, v] : r.inner) inner_inputs[in] = v;
            out.records.push_back({{"n", n},
                                   {"instance", i},
                                   {"seed", r.seed},
                                   {"instance_text", format_bhm_instance(r.inst)},
                                   {"promised_value", r.inst.promised_value},
                                   {"p_correct", r.p_correct},
                                   {"equality", equality},
                                   {"vote_identity", r.identity},
                                   {"cost", to_json(cost)}});
            out.rows.push_back({num(n), num(static_cast<u64>(i)), num(r.seed), num(r.inst.promised_value),
                                num(r.p_correct), flag(equality), flag(r.identity), num(cost.communication_bits),
                                num(cost.entanglement_pairs)});
        }
        // The inner messages may depend on the inputs only through the vote.
        std::map<int, std::map<std::pair<u64, u64>, u64>> by_vote;
        bool conditional_zero = true;
        for (const auto& [in, v] : inner_inputs) {
            std::map<std::pair<u64, u64>, u64> h;
            for (u64 r = 0; r < rmax; ++r) ++h[{p.inner.message_a(in.first, r), p.inner.message_b(in.second, r)}];
            auto [it, fresh] = by_vote.emplace(v, h);
            if (!fresh && it->second != h) conditional_zero = false;
        }
        check(out, "n=" + num(n) + " inner messages depend only on the vote", conditional_zero,
              num(static_cast<u64>(inner_inputs.size())) + " inner inputs");
    }
    return out;
}

double forr_direct(const SignVector& z) {
    const std::size_t h = z.size() / 2;
    double sum = 0.0;
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j)
            sum += z[i] * z[h + j] * (parity(static_cast<u64>(i & j)) ? -1.0 : 1.0);
    return sum / (static_cast<double>(z.size()) * std::sqrt(static_cast<double>(h)));
}

SuiteOutput suite_forrelation(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"n", "wires", "t_depth", "instances", "reps", "forr_max_error", "unitary_error",
                   "decision_error_high", "decision_error_low", "decision_error"};
    const int reps = c.reps.value_or(15);
    const int per_side = 100;
    std::vector<int> depths;
    for (int n : sizes(c, {4, 8, 16, 32})) {
        const Circuit original = forrelation_circuit(n);
        const Circuit compiled = compile_clifford_t(original);
        const int depth = t_depth(compiled);
        depths.push_back(depth);
        std::vector<ForrelationInstance> inst(2 * per_side);
        std::vector<double> err(inst.size()), forr_err(inst.size());
        parallel_for(inst.size(), c.workers, [&](std::size_t i) {
            const ForrSide side = i < per_side ? ForrSide::high : ForrSide::low;
            inst[i] = forrelation_instance(n, side, derive_seed(derive_seed(c.seed, static_cast<u64>(n)), i));
            const SignVector z = pointwise_product(inst[i].x, inst[i].y);
            forr_err[i] = std::abs(forr_value(z) - forr_direct(z));
            err[i] = 1.0 - decision_success_probability(inst[i], reps);
        });
        double unitary_error = 0.0;
        if (original.wire_count <= 10) {
            unitary_error = (circuit_unitary(compiled, inst[0].x, inst[0].y) -
                             circuit_unitary(original, inst[0].x, inst[0].y))
                                .cwiseAbs()
                                .maxCoeff();
        }
        double high = 0.0, low = 0.0;
        for (std::size_t i = 0; i < inst.size(); ++i) (i < per_side ? high : low) += err[i];
        high /= per_side;
        low /= per_side;
        const double mean = (high + low) / 2.0;
        const double fmax = *std::max_element(forr_err.begin(), forr_err.end());
        const std::string label = "n=" + num(n);
        check(out, label + " forr matches direct summation", fmax <= 1e-12, num(fmax));
        check(out, label + " compiled unitary matches", unitary_error <= 1e-9, num(unitary_error));
        check(out, label + " decision error <= 0.09", mean <= 0.09, num(mean));
        out.records.push_back({{"n", n},
                               {"wires", original.wire_count},
                               {"t_depth", depth},
                               {"instances", inst.size()},
                               {"reps", reps},
                               {"forr_max_error", fmax},
                               {"unitary_error", unitary_error},
                               {"unitary_checked", original.wire_count <= 10},
                               {"decision_error_high", high},
                               {"decision_error_low", low},
                               {"decision_error", mean}});
        out.rows.push_back({num(n), num(original.wire_count), num(depth), num(static_cast<u64>(inst.size())),
                            num(reps), num(fmax), num(unitary_error), num(high), num(low), num(mean)});
    }
    const bool constant = std::adjacent_find(depths.begin(), depths.end(), std::not_equal_to<>()) == depths.end();
    check(out, "T-depth constant across n", constant, depths.empty() ? "" : num(depths.front()));
    return out;
}

SuiteOutput suite_forrelation_calibration(const SuiteConfig& c) {
    SuiteOutput out;
    const auto cal = calibrate_forrelation(c.seed, 100, c.reps.value_or(15));
    out.columns = {"n", "slope", "intercept", "max_residual", "points"};
    json fits = json::array();
    for (const auto& f : cal.fits) {
        check(out, "n=" + num(f.n) + " acceptance = 1/2 + forr",
              std::abs(f.slope - 1.0) <= 1e-9 && std::abs(f.intercept - 0.5) <= 1e-9 && f.max_residual <= 1e-9);
        fits.push_back({{"n", f.n},
                        {"slope", f.slope},
                        {"intercept", f.intercept},
                        {"max_residual", f.max_residual},
                        {"points", f.points}});
        out.rows.push_back({num(f.n), num(f.slope), num(f.intercept), num(f.max_residual),
                            num(static_cast<u64>(f.points))});
    }
    out.records.push_back({{"alpha", cal.alpha},
                           {"beta", cal.beta},
                           {"reps", cal.reps},
                           {"fits", fits},
                           {"single_shot_error_high", cal.single_shot_error_high},
                           {"single_shot_error_low", cal.single_shot_error_low},
                           {"decision_error_high", cal.decision_error_high},
                           {"decision_error_low", cal.decision_error_low},
                           {"text", format_calibration(cal)}});
    return out;
}

struct NamedCdqs {
    CdqsProtocol p;
    PromiseFunction f;
};

CdqsProtocol depolarized(const CdqsProtocol& p, double q) {
    return with_secret_noise(p, QuantumChannel::depolarizing(p.secret, q), "dep");
}

std::vector<NamedCdqs> toy_cdqs() {
    return {{lifted_neq_cdqs(), neq_function(1)},
            {and_key_cdqs(), and_function()},
            {depolarized(lifted_neq_cdqs(), 0.1), neq_function(1)},
            {depolarized(and_key_cdqs(), 0.1), and_function()},
            {leaky_and_key_cdqs(0.05), and_function()}};
}

std::vector<NamedCdqs> shipped_cdqs() {
    auto all = toy_cdqs();
    all.insert(all.begin(), NamedCdqs{forwarding_cdqs(), constant_function(1, 1, FValue::one)});
    all.push_back({neq_promise_cdqs(2), promise_neq_function(2)});
    return all;
}

std::vector<NamedCdqs> select(const SuiteConfig& c, std::vector<NamedCdqs> all) {
    std::vector<NamedCdqs> out;
    for (auto& t : all)
        if (selected(c, t.p.name)) out.push_back(std::move(t));
    return out;
}

SuiteOutput suite_cdqs_verify(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = kReportColumns;
    for (const auto& t : select(c, shipped_cdqs())) {
        auto r = cdqs_verify(t.p, t.f, {c.workers});
        r.seed = c.seed;
        add_report(out, r);
    }
    return out;
}

SuiteOutput suite_productness(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"protocol", "x", "y", "value", "product_distance", "entanglement_fidelity", "epsilon_hat",
                   "delta_hat_lower", "delta_hat_upper"};
    for (const auto& t : select(c, shipped_cdqs())) {
        const auto rep = cdqs_verify(t.p, t.f, {c.workers});
        for (const auto& e : productness_check(t.p, t.f, {c.workers})) {
            const bool one = e.value == FValue::one;
            const std::string label = t.p.name + " " + pair_label(e.x, e.y);
            if (one) {
                check(out, label + " entanglement fidelity >= 1 - epsilon_hat",
                      *e.entanglement_fidelity >= 1.0 - rep.epsilon_hat - 1e-9, num(*e.entanglement_fidelity));
            } else {
                check(out, label + " product distance <= delta_hat", e.product_distance <= rep.delta_hat_lower + 1e-9,
                      num(e.product_distance));
            }
            json j = {{"protocol", t.p.name},          {"x", e.x},
                      {"y", e.y},                      {"value", one ? 1 : 0},
                      {"product_distance", e.product_distance}, {"epsilon_hat", rep.epsilon_hat},
                      {"delta_hat_lower", rep.delta_hat_lower}, {"delta_hat_upper", rep.delta_hat_upper}};
            j["entanglement_fidelity"] = one ? json(*e.entanglement_fidelity) : json(nullptr);
            out.records.push_back(std::move(j));
            out.rows.push_back({t.p.name, num(e.x), num(e.y), one ? "1" : "0", num(e.product_distance),
                                one ? num(*e.entanglement_fidelity) : "", num(rep.epsilon_hat),
                                num(rep.delta_hat_lower), num(rep.delta_hat_upper)});
        }
    }
    return out;
}

SuiteOutput suite_one_way(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"protocol", "x", "y", "value", "decision", "digits", "gamma", "threshold", "distance",
                   "exact_distance", "trace_error", "trace_bound", "chain_holds"};
    for (const auto& t : select(c, toy_cdqs())) {
        const auto rep = cdqs_verify(t.p, t.f, {c.workers});
        auto params = one_way_parameters(t.p, rep.epsilon_hat, rep.delta_hat_lower);
        if (c.k) params.digits = *c.k;
        const auto domain = t.f.domain;
        std::vector<OneWayDecision> d(domain.size());
        parallel_for(domain.size(), c.workers,
                     [&](std::size_t i) { d[i] = one_way_decide(t.p, domain[i].x, domain[i].y, params); });
        for (std::size_t i = 0; i < domain.size(); ++i) {
            const int want = t.f(domain[i].x, domain[i].y) == FValue::one ? 1 : 0;
            const std::string label = t.p.name + " " + pair_label(domain[i].x, domain[i].y);
            check(out, label + " one-way decision", d[i].value == want,
                  "distance " + num(d[i].distance) + " threshold " + num(d[i].threshold));
            check(out, label + " quantization norm chain", d[i].quantization.chain_holds);
            const auto& q = d[i].quantization;
            out.records.push_back({{"protocol", t.p.name},
                                   {"x", domain[i].x},
                                   {"y", domain[i].y},
                                   {"value", want},
                                   {"decision", d[i].value},
                                   {"digits", d[i].digits},
                                   {"gamma", d[i].gamma},
                                   {"threshold", d[i].threshold},
                                   {"distance", d[i].distance},
                                   {"exact_distance", d[i].exact_distance},
                                   {"max_component_error", q.max_component_error},
                                   {"frobenius_error", q.frobenius_error},
                                   {"trace_error", q.trace_error},
                                   {"trace_bound", q.trace_bound},
                                   {"chain_holds", q.chain_holds}});
            out.rows.push_back({t.p.name, num(domain[i].x), num(domain[i].y), num(want), num(d[i].value),
                                num(d[i].digits), num(d[i].gamma), num(d[i].threshold), num(d[i].distance),
                                num(d[i].exact_distance), num(q.trace_error), num(q.trace_bound),
                                flag(q.chain_holds)});
        }
    }
    return out;
}

SuiteOutput suite_two_prover(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"protocol", "k", "x", "y", "value", "honest_mean", "honest_min", "honest_threshold", "cheat",
                   "ablation", "cheat_bound", "orthogonality", "orthogonality_bound", "product_restricted",
                   "communication", "cost_bound"};
    const std::vector<int> ks = c.k ? std::vector<int>{*c.k} : std::vector<int>{1, 2, 3};
    struct Task {
        std::size_t toy;
        int k;
        InputPair in;
    };
    struct Result {
        HonestAcceptance honest;
        CheatResult cheat;
        double orth = 0.0;
        ProofCost cost;
    };
    const auto toys = select(c, toy_cdqs());
    std::vector<VerificationReport> reps;
    for (const auto& t : toys) reps.push_back(cdqs_verify(t.p, t.f, {c.workers}));
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < toys.size(); ++i)
        for (int k : ks)
            for (const auto& in : toys[i].f.domain) tasks.push_back({i, k, in});
    std::vector<Result> results(tasks.size());
    parallel_for(tasks.size(), c.workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        const auto& toy = toys[t.toy];
        const auto tp = build_two_prover_proof(toy.p, t.k);
        Result& r = results[i];
        r.cost = proof_cost(tp, t.in.x, t.in.y);
        if (toy.f(t.in.x, t.in.y) == FValue::one) {
            r.honest = honest_acceptance(tp, toy.f, t.in.x, t.in.y);
        } else {
            CheatOptions opt;
            opt.seed = derive_seed(c.seed, i);
            r.cheat = cheat_optimize(tp, toy.f, t.in.x, t.in.y, opt);
            r.orth = message_orthogonality_check(tp, toy.f, t.in.x, t.in.y);
        }
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        const auto& toy = toys[t.toy];
        const auto& rep = reps[t.toy];
        const Result& r = results[i];
        const bool one = toy.f(t.in.x, t.in.y) == FValue::one;
        const std::string label = toy.p.name + " k=" + num(t.k) + " " + pair_label(t.in.x, t.in.y);
        json j = {{"protocol", toy.p.name}, {"k", t.k}, {"x", t.in.x}, {"y", t.in.y}, {"value", one ? 1 : 0},
                  {"communication", r.cost.communication}, {"cost_bound", r.cost.bound}};
        std::vector<std::string> row{toy.p.name, num(t.k), num(t.in.x), num(t.in.y), one ? "1" : "0"};
        check(out, label + " proof cost within bound",
              r.cost.environment_bounds_hold && r.cost.communication <= r.cost.bound + 1e-9);
        if (one) {
            const double eps_k = std::min(2.0, t.k * rep.epsilon_hat);
            const bool perfect = rep.epsilon_upper <= 1e-12;
            const double need = perfect ? 1.0 - 1e-9 : 1.0 - 2.0 * std::sqrt(eps_k);
            check(out, label + " honest acceptance", r.honest.min >= need,
                  num(r.honest.min) + " >= " + num(need));
            j.update({{"honest_mean", r.honest.mean}, {"honest_min", r.honest.min}, {"honest_threshold", need}});
            row.insert(row.end(), {num(r.honest.mean), num(r.honest.min), num(need), "", "", "", "", "", ""});
        } else {
            const double bound = soundness_bound(t.k, rep.delta_hat_upper);
            const double obound = 4.0 * std::sqrt(rep.delta_hat_upper);
            check(out, label + " cheating within soundness bound", r.cheat.p_pass <= bound + 1e-6,
                  num(r.cheat.p_pass) + " <= " + num(bound));
            check(out, label + " purifier fidelities", r.orth <= obound + 1e-9, num(r.orth) + " <= " + num(obound));
            j.update({{"cheat", r.cheat.p_pass},
                      {"ablation", r.cheat.ablation_p_pass},
                      {"cheat_bound", bound},
                      {"cheat_rounds", r.cheat.rounds},
                      {"cheat_converged", r.cheat.converged},
                      {"m_support", r.cheat.m_support},
                      {"m_prime_support", r.cheat.m_prime_support},
                      {"product_restricted", r.cheat.product_restricted},
                      {"orthogonality", r.orth},
                      {"orthogonality_bound", obound}});
            row.insert(row.end(), {"", "", "", num(r.cheat.p_pass), num(r.cheat.ablation_p_pass), num(bound),
                                   num(r.orth), num(obound), flag(r.cheat.product_restricted)});
        }
        row.insert(row.end(), {num(r.cost.communication), num(r.cost.bound)});
        out.records.push_back(std::move(j));
        out.rows.push_back(std::move(row));
    }
    return out;
}

SuiteOutput suite_complementary(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"protocol", "x", "y", "achieved_error", "bound", "delta_hat_upper", "converged"};
    for (const auto& t : select(c, toy_cdqs())) {
        const auto rep = cdqs_verify(t.p, t.f, {c.workers});
        const bool perfect = rep.delta_hat_upper <= 1e-12;
        const double bound = perfect ? 1e-6 : 2.0 * std::sqrt(rep.delta_hat_upper) + 1e-6;
        const auto zeros = t.f.inputs_with(FValue::zero);
        std::vector<ComplementaryDecode> d(zeros.size());
        parallel_for(zeros.size(), c.workers,
                     [&](std::size_t i) { d[i] = complementary_decode_check(t.p, t.f, zeros[i].x, zeros[i].y); });
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            check(out, t.p.name + " " + pair_label(zeros[i].x, zeros[i].y) + " decodes from the environment",
                  d[i].achieved_error <= bound, num(d[i].achieved_error) + " <= " + num(bound));
            out.records.push_back({{"protocol", t.p.name},
                                   {"x", zeros[i].x},
                                   {"y", zeros[i].y},
                                   {"achieved_error", d[i].achieved_error},
                                   {"bound", bound},
                                   {"delta_hat_upper", rep.delta_hat_upper},
                                   {"rounds", d[i].rounds},
                                   {"converged", d[i].converged}});
            out.rows.push_back({t.p.name, num(zeros[i].x), num(zeros[i].y), num(d[i].achieved_error), num(bound),
                                num(rep.delta_hat_upper), flag(d[i].converged)});
        }
    }
    return out;
}

DensityMatrix random_state(std::mt19937_64& rng, std::size_t d, std::size_t rank) {
    std::normal_distribution<double> g(0.0, 1.0);
    const auto di = static_cast<Eigen::Index>(d);
    Matrix m(di, static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = cplx(g(rng), g(rng));
    Matrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()), Layout{{"S", d}});
}

SuiteOutput suite_qtools(const SuiteConfig& c) {
    SuiteOutput out;
    out.columns = {"test", "instance", "dim", "lhs", "rhs", "second_lhs", "second_rhs"};
    const int count = c.reps.value_or(100);
    std::mt19937_64 rng(derive_seed(c.seed, 0));
    for (int t = 0; t < count; ++t) {
        const std::size_t d = 2 + uniform_below(rng, 7);
        const auto r = random_state(rng, d, 1 + uniform_below(rng, d));
        const auto s = random_state(rng, d, 1 + uniform_below(rng, d));
        const double f = fidelity(r, s);
        const double td = 0.5 * trace_norm(r.matrix() - s.matrix());
        const bool ok = 1.0 - std::sqrt(f) <= td + 1e-9 && td <= std::sqrt(1.0 - f) + 1e-9;
        check(out, "Fuchs-van de Graaf instance " + num(t), ok);
        out.records.push_back({{"test", "fuchs_van_de_graaf"},
                               {"instance", t},
                               {"dim", d},
                               {"one_minus_sqrt_f", 1.0 - std::sqrt(f)},
                               {"trace_distance", td},
                               {"sqrt_one_minus_f", std::sqrt(std::max(0.0, 1.0 - f))}});
        out.rows.push_back({"fuchs_van_de_graaf", num(t), num(static_cast<u64>(d)), num(1.0 - std::sqrt(f)), num(td),
                            num(td), num(std::sqrt(std::max(0.0, 1.0 - f)))});
    }
    std::mt19937_64 rng2(derive_seed(c.seed, 1));
    for (int t = 0; t < count; ++t) {
        const std::size_t d = 2 + uniform_below(rng2, 7);
        const int m = 2 + static_cast<int>(uniform_below(rng2, 3));
        std::vector<std::pair<double, DensityMatrix>> ens;
        std::vector<DensityMatrix> cands;
        std::vector<double> w(static_cast<std::size_t>(m));
        double total = 0.0;
        for (auto& x : w) total += (x = uniform_unit(rng2) + 1e-3);
        for (int i = 0; i < m; ++i) {
            ens.emplace_back(w[static_cast<std::size_t>(i)] / total, random_state(rng2, d, 1 + uniform_below(rng2, d)));
            cands.push_back(ens.back().second);
        }
        for (int k = 0; k < 5; ++k) cands.push_back(random_state(rng2, d, d));
        cands.push_back(DensityMatrix::maximally_mixed(Layout{{"S", d}}));
        const auto r = ensemble_sqrt_fidelity_check(ens, cands);
        check(out, "ensemble fidelity bound instance " + num(t), r.max_lhs <= r.rhs + 1e-9,
              num(r.max_lhs) + " <= " + num(r.rhs));
        out.records.push_back(
            {{"test", "ensemble_fidelity"}, {"instance", t}, {"dim", d}, {"max_lhs", r.max_lhs}, {"rhs", r.rhs}});
        out.rows.push_back({"ensemble_fidelity", num(t), num(static_cast<u64>(d)), num(r.max_lhs), num(r.rhs), "", ""});
    }
    return out;
}

using SuiteFn = SuiteOutput (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"neq-classical", suite_neq_classical},
        {"and-cds", suite_and_cds},
        {"ip-psm", suite_ip_psm},
        {"hybrid", suite_hybrid},
        {"dj-shorten", suite_dj_shorten},
        {"bhm", suite_bhm},
        {"forrelation", suite_forrelation},
        {"forrelation-calibration", suite_forrelation_calibration},
        {"cdqs", suite_cdqs_verify},
        {"productness", suite_productness},
        {"one-way", suite_one_way},
        {"two-prover", suite_two_prover},
        {"complementary", suite_complementary},
        {"qtools", suite_qtools},
    };
    return r;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

bool SuiteOutput::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

SuiteOutput run_suite(const SuiteConfig& config) {
    if (config.workers < 1) throw DomainError("workers must be at least 1");
    if (config.n && *config.n < 1) throw DomainError("n must be positive");
    if (config.k && *config.k < 1) throw DomainError("k must be positive");
    if (config.reps && *config.reps < 1) throw DomainError("reps must be positive");
    for (const auto& [name, fn] : registry())
        if (name == config.suite) return fn(config);
    throw DomainError("unknown suite '" + config.suite + "'");
}

std::string format_json(const SuiteOutput& out) { return out.records.dump(2) + "\n"; }

std::string format_csv(const SuiteOutput& out) {
    std::ostringstream os;
    for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << csv_field(out.columns[i]);
    if (!out.columns.empty()) os << "\n";
    for (const auto& row : out.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << "\n";
    }
    return os.str();
}

}  // namespace cdslab
