#include "cdslab/forrelation.hpp"

#include <cmath>
#include <sstream>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

using Idx = Eigen::Index;

void check_signs(const SignVector& z, const char* what) {
    for (int v : z)
        if (v != 1 && v != -1) throw DomainError(std::string(what) + ": entries must be +1 or -1");
}

// Unnormalized Walsh-Hadamard transform, exact on integers.
std::vector<long long> walsh(const SignVector& v, std::size_t begin, std::size_t len) {
    std::vector<long long> s(v.begin() + static_cast<std::ptrdiff_t>(begin),
                             v.begin() + static_cast<std::ptrdiff_t>(begin + len));
    for (std::size_t h = 1; h < len; h <<= 1)
        for (std::size_t i = 0; i < len; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const long long a = s[j], b = s[j + h];
                s[j] = a + b;
                s[j + h] = a - b;
            }
    return s;
}

SignVector random_signs(std::mt19937_64& rng, std::size_t n) {
    SignVector v(n);
    for (auto& e : v) e = (rng() >> 63) ? -1 : 1;
    return v;
}

int bit_position(int wires, int wire) { return wires - 1 - wire; }

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CH: return "CH";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "TDG";
        case GateKind::P: return "P";
        case GateKind::Pdg: return "PDG";
        case GateKind::Oracle: return "ORACLE";
        case GateKind::Measure: return "MEASURE";
    }
    return "?";
}

std::size_t arity(GateKind k) { return k == GateKind::CNOT || k == GateKind::CH ? 2 : 1; }

// Applies one gate to every column of `m` (rows index the basis).
void apply_gate(Matrix& m, int wires, const Gate& g, const SignVector& x, const SignVector& y) {
    const Idx dim = m.rows();
    const double r = 1.0 / std::sqrt(2.0);
    auto one_qubit = [&](int wire, cplx a, cplx b, cplx c, cplx d, int control) {
        const Idx mask = Idx{1} << bit_position(wires, wire);
        const Idx cmask = control < 0 ? 0 : Idx{1} << bit_position(wires, control);
        for (Idx i = 0; i < dim; ++i) {
            if (i & mask) continue;
            if (cmask && !(i & cmask)) continue;
            const Idx j = i | mask;
            for (Idx col = 0; col < m.cols(); ++col) {
                const cplx u = m(i, col), v = m(j, col);
                m(i, col) = a * u + b * v;
                m(j, col) = c * u + d * v;
            }
        }
    };
    const cplx t_phase = std::polar(1.0, M_PI / 4);
    switch (g.kind) {
        case GateKind::H: one_qubit(g.wires[0], r, r, r, -r, -1); break;
        case GateKind::X: one_qubit(g.wires[0], 0, 1, 1, 0, -1); break;
        case GateKind::CNOT: one_qubit(g.wires[1], 0, 1, 1, 0, g.wires[0]); break;
        case GateKind::CH: one_qubit(g.wires[1], r, r, r, -r, g.wires[0]); break;
        case GateKind::T: one_qubit(g.wires[0], 1, 0, 0, t_phase, -1); break;
        case GateKind::Tdg: one_qubit(g.wires[0], 1, 0, 0, std::conj(t_phase), -1); break;
        case GateKind::P: one_qubit(g.wires[0], 1, 0, 0, cplx(0, 1), -1); break;
        case GateKind::Pdg: one_qubit(g.wires[0], 1, 0, 0, cplx(0, -1), -1); break;
        case GateKind::Oracle: {
            const SignVector& v = g.oracle == 0 ? x : y;
            const std::size_t len = g.wires.size();
            if (v.size() != (std::size_t{1} << len)) {
                throw DomainError("oracle input length does not match its register");
            }
            for (Idx i = 0; i < dim; ++i) {
                std::size_t reg = 0;
                for (std::size_t w = 0; w < len; ++w)
                    reg = (reg << 1) | static_cast<std::size_t>((i >> bit_position(wires, g.wires[w])) & 1);
                if (v[reg] < 0) m.row(i) *= -1.0;
            }
            break;
        }
        case GateKind::Measure: break;
    }
}

}  // namespace

double forr_value(const SignVector& z) {
    if (z.size() < 2 || !is_power_of_two(z.size())) throw DomainError("forr_value: length must be a power of 2, at least 2");
    check_signs(z, "forr_value");
    const std::size_t m = z.size() / 2;
    const auto h2 = walsh(z, m, m);
    long long dot = 0;
    for (std::size_t i = 0; i < m; ++i) dot += z[i] * h2[i];
    return static_cast<double>(dot) / (static_cast<double>(z.size()) * std::sqrt(static_cast<double>(m)));
}

SignVector pointwise_product(const SignVector& x, const SignVector& y) {
    if (x.size() != y.size()) throw DomainError("pointwise product of vectors of different lengths");
    SignVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
    return z;
}

ForrelationInstance forrelation_instance(int n, ForrSide side, u64 seed) {
    if (n < 4 || n > 64 || !is_power_of_two(static_cast<u64>(n))) {
        throw DomainError("forrelation instances need n a power of 2 in [4, 64]");
    }
    std::mt19937_64 rng(seed);
    const std::size_t m = static_cast<std::size_t>(n) / 2;
    for (int attempt = 0; attempt < kForrResampleBudget; ++attempt) {
        SignVector z;
        if (side == ForrSide::high) {
            z = random_signs(rng, m);
            const auto h = walsh(z, 0, m);
            for (std::size_t i = 0; i < m; ++i) z.push_back(h[i] >= 0 ? 1 : -1);
        } else {
            z = random_signs(rng, static_cast<std::size_t>(n));
        }
        const double f = forr_value(z);
        if (side == ForrSide::high ? f < kForrAlpha : f > kForrBeta) continue;
        ForrelationInstance inst;
        inst.side = side;
        inst.x = random_signs(rng, static_cast<std::size_t>(n));
        inst.y = pointwise_product(z, inst.x);
        return inst;
    }
    throw BudgetError("forrelation instance: resampling budget exhausted");
}

std::string format_forrelation_instance(const ForrelationInstance& inst) {
    std::ostringstream os;
    os << "# n=" << inst.x.size() << " side=" << (inst.side == ForrSide::high ? "high" : "low")
       << " alpha=" << inst.alpha << " beta=" << inst.beta << "\n";
    for (const SignVector* row : {&inst.x, &inst.y}) {
        for (std::size_t i = 0; i < row->size(); ++i) os << (i ? "," : "") << (*row)[i];
        os << "\n";
    }
    return os.str();
}

ForrelationInstance parse_forrelation_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    ForrelationInstance inst;
    std::vector<SignVector> rows;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                try {
                    if (key == "side") {
                        if (val != "high" && val != "low") throw FormatError("bad side");
                        inst.side = val == "high" ? ForrSide::high : ForrSide::low;
                    } else if (key == "alpha") {
                        inst.alpha = std::stod(val);
                    } else if (key == "beta") {
                        inst.beta = std::stod(val);
                    }
                } catch (const std::exception&) {
                    throw FormatError("line " + std::to_string(line_no) + ": bad header field '" + tok + "'");
                }
            }
            header = true;
            continue;
        }
        SignVector row;
        std::istringstream rs(line);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            if (cell == "1" || cell == "+1") {
                row.push_back(1);
            } else if (cell == "-1") {
                row.push_back(-1);
            } else {
                throw FormatError("line " + std::to_string(line_no) + ": expected +1 or -1, got '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (!header || rows.size() != 2 || rows[0].size() != rows[1].size() || rows[0].empty()) {
        throw FormatError("expected a header line and two rows of equal length");
    }
    inst.x = rows[0];
    inst.y = rows[1];
    return inst;
}

void validate_circuit(const Circuit& c) {
    if (c.wire_count < 1) throw DomainError("circuit needs at least one wire");
    std::vector<bool> measured(static_cast<std::size_t>(c.wire_count), false);
    for (const auto& g : c.gates) {
        if (g.kind != GateKind::Oracle && g.wires.size() != arity(g.kind)) {
            throw DomainError(std::string("wrong wire count for ") + gate_name(g.kind));
        }
        if (g.kind == GateKind::Oracle && (g.wires.empty() || (g.oracle != 0 && g.oracle != 1))) {
            throw DomainError("oracle needs a register and oracle id 0 or 1");
        }
        for (std::size_t i = 0; i < g.wires.size(); ++i) {
            const int w = g.wires[i];
            if (w < 0 || w >= c.wire_count) throw DomainError("wire index out of range");
            for (std::size_t j = 0; j < i; ++j)
                if (g.wires[j] == w) throw DomainError("gate uses a wire twice");
            if (measured[static_cast<std::size_t>(w)]) throw DomainError("gate after measurement on its wire");
        }
        if (g.kind == GateKind::Measure) measured[static_cast<std::size_t>(g.wires[0])] = true;
    }
}

Circuit forrelation_circuit(int n) {
    if (n < 2 || !is_power_of_two(static_cast<u64>(n))) throw DomainError("forrelation circuit needs n a power of 2");
    const int k = ceil_log2(static_cast<u64>(n));
    Circuit c;
    c.wire_count = 2 * k;
    std::vector<int> alice, bob;
    for (int i = 0; i < k; ++i) {
        alice.push_back(i);
        bob.push_back(k + i);
    }
    for (int i = 0; i < k; ++i) c.gates.push_back({GateKind::H, {i}});
    for (int i = 0; i < k; ++i) c.gates.push_back({GateKind::CNOT, {i, k + i}});
    c.gates.push_back({GateKind::Oracle, alice, 0});
    c.gates.push_back({GateKind::Oracle, bob, 1});
    for (int i = 0; i < k; ++i) c.gates.push_back({GateKind::CNOT, {i, k + i}});
    c.gates.push_back({GateKind::X, {0}});
    for (int i = 1; i < k; ++i) c.gates.push_back({GateKind::CH, {0, i}});
    c.gates.push_back({GateKind::H, {0}});
    c.gates.push_back({GateKind::Measure, {0}});
    validate_circuit(c);
    return c;
}

Circuit compile_clifford_t(const Circuit& c) {
    validate_circuit(c);
    Circuit out;
    out.wire_count = c.wire_count;
    for (const auto& g : c.gates) {
        if (g.kind != GateKind::CH) {
            out.gates.push_back(g);
            continue;
        }
        const int ctl = g.wires[0], t = g.wires[1];
        for (GateKind k : {GateKind::P, GateKind::H, GateKind::T}) out.gates.push_back({k, {t}});
        out.gates.push_back({GateKind::CNOT, {ctl, t}});
        for (GateKind k : {GateKind::Tdg, GateKind::H, GateKind::Pdg}) out.gates.push_back({k, {t}});
    }
    return out;
}

std::vector<std::vector<std::size_t>> schedule_layers(const Circuit& c) {
    validate_circuit(c);
    std::vector<std::size_t> wire_layer(static_cast<std::size_t>(c.wire_count), 0);
    std::vector<std::vector<std::size_t>> layers;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        std::size_t layer = 0;
        for (int w : c.gates[i].wires) layer = std::max(layer, wire_layer[static_cast<std::size_t>(w)]);
        if (layers.size() <= layer) layers.resize(layer + 1);
        layers[layer].push_back(i);
        for (int w : c.gates[i].wires) wire_layer[static_cast<std::size_t>(w)] = layer + 1;
    }
    return layers;
}

int t_depth(const Circuit& c) {
    validate_circuit(c);
    std::vector<int> depth(static_cast<std::size_t>(c.wire_count), 0);
    int best = 0;
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::CH) throw DomainError("t_depth needs a Clifford+T circuit; compile controlled-H first");
        int d = 0;
        for (int w : g.wires) d = std::max(d, depth[static_cast<std::size_t>(w)]);
        if (g.kind == GateKind::T || g.kind == GateKind::Tdg) ++d;
        for (int w : g.wires) depth[static_cast<std::size_t>(w)] = d;
        best = std::max(best, d);
    }
    return best;
}

Vector simulate_circuit(const Circuit& c, const SignVector& x, const SignVector& y) {
    validate_circuit(c);
    if (c.wire_count > 24) throw BudgetError("statevector simulation above 24 wires");
    Matrix state = Matrix::Zero(Idx{1} << c.wire_count, 1);
    state(0, 0) = 1.0;
    for (const auto& g : c.gates) apply_gate(state, c.wire_count, g, x, y);
    return state.col(0);
}

Matrix circuit_unitary(const Circuit& c, const SignVector& x, const SignVector& y) {
    validate_circuit(c);
    if (c.wire_count > 12) throw BudgetError("dense circuit unitary above 12 wires");
    const Idx d = Idx{1} << c.wire_count;
    Matrix u = Matrix::Identity(d, d);
    for (const auto& g : c.gates) apply_gate(u, c.wire_count, g, x, y);
    return u;
}

double acceptance_probability(const Circuit& c, const SignVector& x, const SignVector& y) {
    const Vector v = simulate_circuit(c, x, y);
    const Idx half = v.size() / 2;
    return v.head(half).squaredNorm();
}

namespace {

int decision_threshold(int reps) {
    const double tau = 0.5 + (kForrAlpha + kForrBeta) / 2.0;
    return static_cast<int>(std::ceil(tau * reps - 1e-12));
}

double binomial_tail_at_least(int reps, int t, double p) {
    double total = 0.0;
    for (int j = t; j <= reps; ++j) {
        total += std::exp(std::lgamma(reps + 1.0) - std::lgamma(j + 1.0) - std::lgamma(reps - j + 1.0)) *
                 std::pow(p, j) * std::pow(1.0 - p, reps - j);
    }
    return std::min(1.0, total);
}

}  // namespace

int forrelation_decision(const SignVector& x, const SignVector& y, int reps, std::mt19937_64& rng) {
    if (reps < 1) throw DomainError("forrelation decision needs at least one repetition");
    const Circuit c = forrelation_circuit(static_cast<int>(x.size()));
    const double p0 = acceptance_probability(c, x, y);
    int zeros = 0;
    for (int i = 0; i < reps; ++i)
        if (uniform_unit(rng) < p0) ++zeros;
    return zeros >= decision_threshold(reps) ? -1 : 1;
}

double decision_success_probability(const ForrelationInstance& inst, int reps) {
    if (reps < 1) throw DomainError("forrelation decision needs at least one repetition");
    const Circuit c = forrelation_circuit(static_cast<int>(inst.x.size()));
    const double p0 = acceptance_probability(c, inst.x, inst.y);
    const double high = binomial_tail_at_least(reps, decision_threshold(reps), p0);
    return inst.side == ForrSide::high ? high : 1.0 - high;
}

ForrelationCalibration calibrate_forrelation(u64 seed, int instances_per_side, int reps) {
    ForrelationCalibration cal;
    cal.reps = reps;
    for (int n : {4, 8}) {
        const Circuit c = forrelation_circuit(n);
        const SignVector ones(static_cast<std::size_t>(n), 1);
        std::vector<double> fs, ps;
        for (u64 bits = 0; bits < (u64{1} << n); ++bits) {
            SignVector z(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = bit(bits, i) ? -1 : 1;
            fs.push_back(forr_value(z));
            ps.push_back(acceptance_probability(c, z, ones));
        }
        const double k = static_cast<double>(fs.size());
        double sf = 0, sp = 0, sff = 0, sfp = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            sf += fs[i];
            sp += ps[i];
            sff += fs[i] * fs[i];
            sfp += fs[i] * ps[i];
        }
        ForrelationCalibration::Fit fit;
        fit.n = n;
        fit.points = fs.size();
        fit.slope = (k * sfp - sf * sp) / (k * sff - sf * sf);
        fit.intercept = (sp - fit.slope * sf) / k;
        for (std::size_t i = 0; i < fs.size(); ++i)
            fit.max_residual = std::max(fit.max_residual, std::abs(ps[i] - fit.intercept - fit.slope * fs[i]));
        cal.fits.push_back(fit);
    }
    double e1h = 0, e1l = 0, erh = 0, erl = 0;
    int count = 0;
    u64 task = 0;
    for (int n : {4, 8, 16, 32, 64}) {
        for (int i = 0; i < instances_per_side; ++i) {
            const auto hi = forrelation_instance(n, ForrSide::high, derive_seed(seed, task++));
            const auto lo = forrelation_instance(n, ForrSide::low, derive_seed(seed, task++));
            e1h += 1.0 - decision_success_probability(hi, 1);
            e1l += 1.0 - decision_success_probability(lo, 1);
            erh += 1.0 - decision_success_probability(hi, reps);
            erl += 1.0 - decision_success_probability(lo, reps);
            ++count;
        }
    }
    cal.single_shot_error_high = e1h / count;
    cal.single_shot_error_low = e1l / count;
    cal.decision_error_high = erh / count;
    cal.decision_error_low = erl / count;
    return cal;
}

std::string format_calibration(const ForrelationCalibration& cal) {
    std::ostringstream os;
    os.precision(12);
    for (const auto& f : cal.fits) {
        os << "n: " << f.n << "\n"
           << "points: " << f.points << "\n"
           << "slope: " << f.slope << "\n"
           << "intercept: " << f.intercept << "\n"
           << "max_residual: " << f.max_residual << "\n";
    }
    os << "alpha: " << cal.alpha << "\n"
       << "beta: " << cal.beta << "\n"
       << "reps: " << cal.reps << "\n"
       << "single_shot_error_high: " << cal.single_shot_error_high << "\n"
       << "single_shot_error_low: " << cal.single_shot_error_low << "\n"
       << "decision_error_high: " << cal.decision_error_high << "\n"
       << "decision_error_low: " << cal.decision_error_low << "\n";
    return os.str();
}

std::string format_circuit(const Circuit& c) {
    std::ostringstream os;
    os << "wires " << c.wire_count << "\n";
    for (const auto& g : c.gates) {
        os << gate_name(g.kind);
        if (g.kind == GateKind::Oracle) os << " " << (g.oracle == 0 ? "A" : "B");
        for (int w : g.wires) os << " " << w;
        os << "\n";
    }
    return os.str();
}

Circuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Circuit c;
    int line_no = 0;
    bool have_wires = false;
    auto fail = [&](const std::string& why) { throw FormatError("line " + std::to_string(line_no) + ": " + why); };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name) || name[0] == '#') continue;
        if (!have_wires) {
            if (name != "wires" || !(ls >> c.wire_count)) fail("expected 'wires N'");
            have_wires = true;
            continue;
        }
        Gate g;
        static const std::pair<const char*, GateKind> kinds[] = {
            {"H", GateKind::H},     {"X", GateKind::X},       {"CNOT", GateKind::CNOT},     {"CH", GateKind::CH},
            {"T", GateKind::T},     {"TDG", GateKind::Tdg},   {"P", GateKind::P},           {"PDG", GateKind::Pdg},
            {"ORACLE", GateKind::Oracle}, {"MEASURE", GateKind::Measure}};
        bool known = false;
        for (const auto& [s, k] : kinds) {
            if (name == s) {
                g.kind = k;
                known = true;
            }
        }
        if (!known) fail("unknown gate '" + name + "'");
        if (g.kind == GateKind::Oracle) {
            std::string who;
            if (!(ls >> who) || (who != "A" && who != "B")) fail("oracle needs A or B");
            g.oracle = who == "A" ? 0 : 1;
        }
        int w;
        while (ls >> w) g.wires.push_back(w);
        if (!ls.eof()) fail("bad wire index");
        c.gates.push_back(std::move(g));
    }
    if (!have_wires) throw FormatError("missing 'wires N' line");
    try {
        validate_circuit(c);
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
    return c;
}

}  // namespace cdslab
