#pragma once

#include "json.hpp"

#include "cdslab/verifier.hpp"

namespace cdslab {

nlohmann::json to_json(const CostReport& c);
nlohmann::json to_json(const InputDiagnostic& d);
/// Field names: protocol, n, epsilon_hat, delta_hat_lower, delta_hat_upper,
/// inputs, cost, seed, wall_time_ms (null unless measured), plus kind,
/// function, exhaustive, epsilon_upper and notes.
nlohmann::json to_json(const VerificationReport& r);

}  // namespace cdslab
