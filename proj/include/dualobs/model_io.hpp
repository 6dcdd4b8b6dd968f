#pragma once

#include "dualobs/model.hpp"

#include <iosfwd>
#include <string>

namespace dualobs {

// Model files are JSON objects:
//   { "s1_size": 3, "s2_size": 4,
//     "f0": [ ...row-major, y outer... ], "f1": [ ... ],
//     "p0": 0.4,
//     "costs": { "center":    {"c10": 1, "c01": 1},
//                "observer1": {"c10": 1, "c01": 1},
//                "observer2": {"c10": 1, "c01": 1} } }
// "costs" and each of its members are optional and default to 1.
// Unknown keys are ignored, so annotated output can be read back.
JointModelSpec parse_model_spec(const std::string& text);
JointModelSpec read_model_file(const std::string& path);

std::string model_to_json(const JointModelSpec& spec, int indent = 2);

// FNV-1a over the canonical JSON serialization.
std::uint64_t model_hash(const JointModelSpec& spec);
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace dualobs
