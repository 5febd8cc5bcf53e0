#pragma once

#include <string>

#include <json.hpp>

#include "qcfilter/filters.hpp"
#include "qcfilter/noise.hpp"
#include "qcfilter/sequence.hpp"

namespace qcf::cli {

using nlohmann::json;

// Built-in run configurations; every paper-figure curve is one preset.
json preset_config(const std::string& name);
std::vector<std::string> preset_names();

// The "sequence" config section: {"segments": [...]}, {"dd": {...}} or
// {"gate": {...}}. Bang-bang dd specs have no piecewise realization and
// are returned via the DDSpec route only.
struct SequenceSource {
    json resolved;  // canonical form, reusable as a config section
    std::optional<DDSpec> dd;
    std::optional<ControlSequence> seq;
    double tau = 0.0;
    double fit_scale = 0.0;  // dimensionless-frequency scale for alpha fits
};

SequenceSource sequence_from_json(const json& j);
NoiseSpectrum noise_from_json(const json& j, std::string* convention_note = nullptr);

std::uint64_t sequence_hash(const json& resolved_sequence);

// exit codes: 0 success, 2 config error, 3 numerical-validity error
int run(int argc, char** argv);

}  // namespace qcf::cli
