#pragma once
// JSON problem descriptions. Schema:
//   {
//     "name":  "my-system",            (optional)
//     "dim":   3,
//     "H":     [ {"coef": 1.0, "powers": [2,0,0]}, ... ],
//     "log_terms": [ {"coef": 1.0, "index": 1}, ... ],   (optional)
//     "S":     "canonical"
//            | {"constant":   [[...], ...]}
//            | {"polynomial": [[ [ {"coef":..,"powers":..}, ... ], ... ], ...]},
//     "x0":    [ ... ]
//   }
// "canonical" is the symplectic block matrix [[0, I], [-I, 0]] (even dim
// required). Antisymmetry of constant and polynomial S is validated
// structurally; violations are rejected at load time.

#include <string>

#include "dgflow/system.hpp"

namespace dgflow {

Problem load_problem_json(const std::string& path);

// Accepts a built-in name or a path to a .json description.
Problem resolve_problem(const std::string& name_or_path);

} // namespace dgflow
