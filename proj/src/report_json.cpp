#include "cdslab/report_json.hpp"

namespace cdslab {

nlohmann::json to_json(const CostReport& c) {
    return {{"communication_bits", c.communication_bits},
            {"communication_qubits", c.communication_qubits},
            {"randomness_bits", c.randomness_bits},
            {"entanglement_pairs", c.entanglement_pairs}};
}

nlohmann::json to_json(const InputDiagnostic& d) {
    nlohmann::json j = {{"x", d.x}, {"y", d.y}, {"value", d.value == FValue::one ? 1 : 0}};
    if (d.value == FValue::one) {
        j["correctness"] = d.correctness;
        j["correctness_upper"] = d.correctness_upper;
    } else {
        j["security"] = d.security;
        j["security_upper"] = d.security_upper;
    }
    if (d.pauli_spread) j["pauli_spread"] = *d.pauli_spread;
    return j;
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& d : r.inputs) inputs.push_back(to_json(d));
    nlohmann::json j = {{"protocol", r.protocol},
                        {"kind", r.kind},
                        {"function", r.function},
                        {"n", r.n},
                        {"exhaustive", r.exhaustive},
                        {"epsilon_hat", r.epsilon_hat},
                        {"epsilon_upper", r.epsilon_upper},
                        {"delta_hat_lower", r.delta_hat_lower},
                        {"delta_hat_upper", r.delta_hat_upper},
                        {"inputs", std::move(inputs)},
                        {"cost", to_json(r.cost)},
                        {"notes", r.notes},
                        {"seed", r.seed}};
    j["wall_time_ms"] = r.wall_time_ms ? nlohmann::json(*r.wall_time_ms) : nlohmann::json(nullptr);
    return j;
}

}  // namespace cdslab
