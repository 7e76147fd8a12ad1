#include "holonomy/matrix_json.hpp"

#include <cmath>
#include <string>

namespace holonomy {

nlohmann::json matrix_to_json(const ComplexMatrix& a) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      re.push_back(a(i, j).real());
      im.push_back(a(i, j).imag());
    }
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::invalid_input, "matrix: " + why); };
  if (!doc.is_object()) fail("expected an object");
  if (!doc.contains("rows") || !doc.contains("cols") || !doc.contains("re")) {
    fail("fields rows, cols, re are required");
  }
  if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer()) {
    fail("rows and cols must be integers");
  }
  const auto rows = doc["rows"].get<long long>();
  const auto cols = doc["cols"].get<long long>();
  if (rows < 1 || cols < 1) fail("rows and cols must be >= 1");
  const auto count = static_cast<std::size_t>(rows * cols);

  const auto& re = doc["re"];
  if (!re.is_array() || re.size() != count) fail("re must hold rows*cols numbers");
  const bool has_im = doc.contains("im");
  if (has_im && (!doc["im"].is_array() || doc["im"].size() != count)) {
    fail("im must hold rows*cols numbers");
  }

  ComplexMatrix out(rows, cols);
  for (std::size_t k = 0; k < count; ++k) {
    if (!re[k].is_number() || (has_im && !doc["im"][k].is_number())) fail("entries must be numbers");
    const double x = re[k].get<double>();
    const double y = has_im ? doc["im"][k].get<double>() : 0.0;
    if (!std::isfinite(x) || !std::isfinite(y)) fail("entries must be finite");
    out(static_cast<Index>(k) / cols, static_cast<Index>(k) % cols) = Complex(x, y);
  }
  return out;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace holonomy
