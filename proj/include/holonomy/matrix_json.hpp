#pragma once

// Shared wire format for complex matrices:
//   {"rows": r, "cols": c, "re": [...], "im": [...]}   (row-major, im optional on input)

#include <json.hpp>

#include "holonomy/pseudo_unitary.hpp"

namespace holonomy {

nlohmann::json matrix_to_json(const ComplexMatrix& a);

/// Throws Error(invalid_input) on malformed documents or non-finite entries.
ComplexMatrix matrix_from_json(const nlohmann::json& doc);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace holonomy
