#pragma once

// JSON model files.
//
//   {
//     "source_alphabet": ["0", "1"],
//     "reproduction_alphabet": ["0", "1"],   // optional, defaults to the source alphabet
//     "P": [0.6, 0.4],
//     "M": [0.6, 0.4],                        // or "counting", or "P"
//     "rho": "hamming",                       // or a |A| x |A^| matrix
//     "auto_normalize_rho": false             // optional
//   }

#include <filesystem>
#include <string>
#include <string_view>

#include "spherecover/model.hpp"

namespace spherecover {

/// Parses and validates a model. `origin` names the source in error messages.
Model parse_model(std::string_view text, std::string_view origin = "<model>");
Model load_model(const std::filesystem::path& path);

/// Fully resolved model as JSON with sorted keys and shortest round-trip numbers.
std::string canonical_json(const Model& model);

/// First 16 hex digits of the SHA-256 of canonical_json(model).
std::string model_hash(const Model& model);

/// First 16 hex digits of the SHA-256 of `bytes`.
std::string sha256_prefix(std::string_view bytes);

}  // namespace spherecover
