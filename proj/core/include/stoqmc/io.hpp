#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"

namespace stoqmc {

using nlohmann::json;

/// Reads and parses a JSON file. Missing files and syntax errors raise
/// ValidationError with the path in the message.
json load_json_file(const std::filesystem::path& path);

/// {"n": 2, "terms": [{"qubits": [0, 1], "matrix": [[...], ...]}, ...]}
StoquasticHamiltonian hamiltonian_from_json(const json& j);
json to_json(const StoquasticHamiltonian& h);

/// {"n": 2, "couplings": [[0, 1, 1.0]], "fields": [1.0, 1.0]}
TimModel tim_from_json(const json& j);
json to_json(const TimModel& tim);

/// {"N": 2, "edges": [[0, 1, 1.0]], "log_prefactor": 0.0}
ClassicalIsingModel ising_from_json(const json& j);
json to_json(const ClassicalIsingModel& model);

enum class ModelFormat { hamiltonian, tim, ising };

/// Decides by the keys present: "terms", "fields" or "edges".
ModelFormat detect_format(const json& j);

/// A generic Hamiltonian file, or a TIM file converted with tim_to_local.
StoquasticHamiltonian any_hamiltonian_from_json(const json& j);

}  // namespace stoqmc
