#include "cdslab/cds.hpp"

#include <algorithm>
#include <memory>

#include "cdslab/error.hpp"

namespace cdslab {

namespace {

void check_randomness(int bits) {
    if (bits < 0 || bits > kEnumerationBudgetBits) {
        throw BudgetError("enumeration over " + std::to_string(bits) + " random bits exceeds the budget of " +
                          std::to_string(kEnumerationBudgetBits));
    }
}

MessageDistribution collect(std::vector<std::pair<u64, u64>> raw, u64 denominator, int b_bits) {
    std::sort(raw.begin(), raw.end());
    MessageDistribution d;
    d.denominator = denominator;
    d.message_b_bits = b_bits;
    for (const auto& [k, w] : raw) {
        if (!d.entries.empty() && d.entries.back().first == k) {
            d.entries.back().second += w;
        } else {
            d.entries.emplace_back(k, w);
        }
    }
    if (d.total() != denominator) {
        throw Error("message distribution weights sum to " + std::to_string(d.total()) + ", expected " +
                    std::to_string(denominator));
    }
    return d;
}

template <class Protocol, class Fa, class Fb>
void visit_shares(const Protocol& p, u64 x, u64 y, Fa&& ma, Fb&& mb,
                  const std::function<void(u64, u64, u64)>& fn) {
    if (p.correlated) {
        p.correlated->visit(x, y, [&](u64 ra, u64 rb, u64 w) {
            if (w) fn(ma(ra), mb(rb), w);
        });
        return;
    }
    check_randomness(p.randomness_bits);
    const u64 n = u64{1} << p.randomness_bits;
    for (u64 r = 0; r < n; ++r) fn(ma(r), mb(r), 1);
}

}  // namespace

u64 MessageDistribution::count_of(u64 a, u64 b) const {
    const u64 key = (a << message_b_bits) | b;
    auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(key, u64{0}));
    return it != entries.end() && it->first == key ? it->second : 0;
}

u64 MessageDistribution::total() const {
    u64 t = 0;
    for (const auto& e : entries) t += e.second;
    return t;
}

u64 transcript_denominator(const CdsProtocol& p) {
    if (p.correlated) return p.correlated->denominator;
    check_randomness(p.randomness_bits);
    return u64{1} << p.randomness_bits;
}

u64 transcript_denominator(const PsmProtocol& p) {
    if (p.correlated) return p.correlated->denominator;
    check_randomness(p.randomness_bits);
    return u64{1} << p.randomness_bits;
}

void for_each_transcript(const CdsProtocol& p, u64 x, u64 y, u64 s,
                         const std::function<void(u64 m_a, u64 m_b, u64 weight)>& fn) {
    if (s >= p.secret_alphabet) throw DomainError("secret out of range");
    visit_shares(
        p, x, y, [&](u64 r) { return p.message_a(x, s, r); }, [&](u64 r) { return p.message_b(y, r); }, fn);
}

void for_each_transcript(const PsmProtocol& p, u64 x, u64 y,
                         const std::function<void(u64 m_a, u64 m_b, u64 weight)>& fn) {
    visit_shares(
        p, x, y, [&](u64 r) { return p.message_a(x, r); }, [&](u64 r) { return p.message_b(y, r); }, fn);
}

MessageDistribution enumerate_message_distribution(const CdsProtocol& p, u64 x, u64 y, u64 s) {
    const u64 denom = transcript_denominator(p);
    std::vector<std::pair<u64, u64>> raw;
    for_each_transcript(p, x, y, s, [&](u64 a, u64 b, u64 w) { raw.emplace_back((a << p.message_b_bits) | b, w); });
    return collect(std::move(raw), denom, p.message_b_bits);
}

MessageDistribution enumerate_message_distribution(const PsmProtocol& p, u64 x, u64 y) {
    const u64 denom = transcript_denominator(p);
    std::vector<std::pair<u64, u64>> raw;
    for_each_transcript(p, x, y, [&](u64 a, u64 b, u64 w) { raw.emplace_back((a << p.message_b_bits) | b, w); });
    return collect(std::move(raw), denom, p.message_b_bits);
}

CostReport protocol_cost(const CdsProtocol& p) {
    CostReport c;
    c.communication_bits = p.message_a_bits + p.message_b_bits;
    c.randomness_bits = p.randomness_bits + (p.correlated ? p.correlated->randomness_bits : 0);
    c.entanglement_pairs = p.correlated ? p.correlated->entanglement_pairs : 0;
    return c;
}

CostReport protocol_cost(const PsmProtocol& p) {
    CostReport c;
    c.communication_bits = p.message_a_bits + p.message_b_bits;
    c.randomness_bits = p.randomness_bits + (p.correlated ? p.correlated->randomness_bits : 0);
    c.entanglement_pairs = p.correlated ? p.correlated->entanglement_pairs : 0;
    return c;
}

CdsProtocol parallel_extend(const CdsProtocol& p, int copies) {
    if (copies < 1) throw DomainError("copy count must be at least 1");
    if (copies == 1) return p;
    if (p.correlated) throw DomainError("parallel extension of a protocol with a correlated resource");
    if (copies * (p.message_a_bits + p.message_b_bits) > 64 || copies * p.randomness_bits > 64) {
        throw BudgetError("parallel extension does not fit in 64-bit messages");
    }
    u64 alphabet = 1;
    for (int i = 0; i < copies; ++i) alphabet *= p.secret_alphabet;
    CdsProtocol q;
    q.name = p.name + "^" + std::to_string(copies);
    q.nx = p.nx;
    q.ny = p.ny;
    q.randomness_bits = copies * p.randomness_bits;
    q.secret_alphabet = alphabet;
    q.message_a_bits = copies * p.message_a_bits;
    q.message_b_bits = copies * p.message_b_bits;
    const u64 base = p.secret_alphabet;
    const int ra = p.randomness_bits, wa = p.message_a_bits, wb = p.message_b_bits;
    q.message_a = [p, copies, base, ra, wa](u64 x, u64 s, u64 r) {
        u64 m = 0;
        for (int i = 0; i < copies; ++i, s /= base) {
            m |= p.message_a(x, s % base, (r >> (i * ra)) & low_mask(ra)) << (i * wa);
        }
        return m;
    };
    q.message_b = [p, copies, ra, wb](u64 y, u64 r) {
        u64 m = 0;
        for (int i = 0; i < copies; ++i) {
            m |= p.message_b(y, (r >> (i * ra)) & low_mask(ra)) << (i * wb);
        }
        return m;
    };
    q.decode = [p, copies, base, wa, wb](u64 ma, u64 x, u64 mb, u64 y) {
        u64 s = 0, scale = 1;
        for (int i = 0; i < copies; ++i, scale *= base) {
            s += scale * p.decode((ma >> (i * wa)) & low_mask(wa), x, (mb >> (i * wb)) & low_mask(wb), y);
        }
        return s;
    };
    return q;
}

PromiseFunction secret_gated_function(const PromiseFunction& f) {
    PromiseFunction h;
    h.name = f.name + "-gated";
    h.nx = f.nx + 1;
    h.ny = f.ny;
    const int nx = f.nx;
    h.evaluate = [f, nx](u64 xs, u64 y) {
        const u64 s = (xs >> nx) & 1u;
        return s && f(xs & low_mask(nx), y) == FValue::one ? FValue::one : FValue::zero;
    };
    for (u64 s = 0; s < 2; ++s) {
        for (const auto& p : f.domain) h.domain.push_back({p.x | (s << nx), p.y});
    }
    h.exhaustive = f.exhaustive;
    return h;
}

CdsProtocol psm_to_cds(const PsmFamily& family, const PromiseFunction& f) {
    const PromiseFunction h = secret_gated_function(f);
    std::optional<PsmProtocol> psm = family(h);
    if (!psm) {
        throw DomainError("PSM family has no protocol for " + h.name);
    }
    if (psm->correlated) {
        throw DomainError("psm_to_cds needs a PSM with plain shared randomness");
    }
    CdsProtocol c;
    c.name = "cds-from-" + psm->name;
    c.nx = f.nx;
    c.ny = f.ny;
    c.randomness_bits = psm->randomness_bits;
    c.secret_alphabet = 2;
    c.message_a_bits = psm->message_a_bits;
    c.message_b_bits = psm->message_b_bits;
    const int nx = f.nx;
    auto shared = std::make_shared<PsmProtocol>(std::move(*psm));
    c.message_a = [shared, nx](u64 x, u64 s, u64 r) { return shared->message_a(x | (s << nx), r); };
    c.message_b = [shared](u64 y, u64 r) { return shared->message_b(y, r); };
    c.decode = [shared](u64 ma, u64, u64 mb, u64) { return shared->decode(ma, mb); };
    return c;
}

std::optional<PsmProtocol> table_psm(const PromiseFunction& h) {
    if (h.ny > 4 || h.nx > 32) return std::nullopt;
    const int ny = h.ny;
    const u64 n = u64{1} << ny;
    PsmProtocol p;
    p.name = "table-psm(" + h.name + ")";
    p.nx = h.nx;
    p.ny = ny;
    p.randomness_bits = ny + static_cast<int>(n);
    p.output_alphabet = 2;
    p.message_a_bits = static_cast<int>(n);
    p.message_b_bits = ny + 1;
    auto value = [h](u64 x, u64 y) -> u64 { return h(x, y) == FValue::one ? 1 : 0; };
    p.message_a = [value, ny, n](u64 x, u64 r) {
        const u64 t = r & low_mask(ny);
        const u64 c = r >> ny;
        u64 row = 0;
        for (u64 j = 0; j < n; ++j) row |= (value(x, j ^ t) ^ static_cast<u64>(bit(c, static_cast<int>(j)))) << j;
        return row;
    };
    p.message_b = [ny](u64 y, u64 r) {
        const u64 pos = (y ^ r) & low_mask(ny);
        return pos | (static_cast<u64>(bit(r >> ny, static_cast<int>(pos))) << ny);
    };
    p.decode = [ny](u64 ma, u64 mb) {
        const u64 pos = mb & low_mask(ny);
        return static_cast<u64>(bit(ma, static_cast<int>(pos)) ^ bit(mb, ny));
    };
    return p;
}

}  // namespace cdslab
