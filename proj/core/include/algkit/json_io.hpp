#pragma once

#include <variant>

#include <json.hpp>

#include "algkit/limits.hpp"
#include "algkit/mechanics.hpp"

namespace algkit {

// Expressions travel as prefix s-expression strings against the owning
// object's coordinate names (x1..xn for bases, mu1..mum for momenta).
// Structure/component indices are 1-based in JSON.

nlohmann::json algebroid_to_json(const AlgebroidSpec& a);
AlgebroidSpec algebroid_from_json(const nlohmann::json& j);

nlohmann::json qform_to_json(const QForm& omega);
QForm qform_from_json(const nlohmann::json& j, int rank);

nlohmann::json system_to_json(const DirectSystemSpec& sys);
DirectSystemSpec system_from_json(const nlohmann::json& j);

nlohmann::json hamiltonian_to_json(const HamiltonianSystem& sys);
HamiltonianSystem hamiltonian_from_json(const nlohmann::json& j);

using Family = std::variant<SectionFamily, FieldFamily, FunctionTower>;
Family family_from_json(const nlohmann::json& j, const DirectSystemSpec& sys);

nlohmann::json report_to_json(const VerificationReport& report);

/// Parses with ParseError on malformed JSON.
nlohmann::json load_json_file(const std::string& path);

}  // namespace algkit
