#pragma once

// JSON <-> Eigen/Signal helpers shared by the instance reader, report
// writers and the CLI. Not installed: it pulls in the vendored nlohmann/json.

#include <string>

#include <json.hpp>

#include "robustpr/errors.hpp"
#include "robustpr/signal.hpp"

namespace robustpr::detail {

inline nlohmann::json scalar_to_json(double v) { return v; }
inline nlohmann::json scalar_to_json(const Complex& v) { return nlohmann::json::array({v.real(), v.imag()}); }

template <class Derived>
nlohmann::json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  auto out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
  return out;
}

template <class Scalar>
nlohmann::json matrix_to_json(const Mat<Scalar>& a) {
  auto out = nlohmann::json::array();
  for (Index i = 0; i < a.rows(); ++i) out.push_back(vector_to_json(a.row(i)));
  return out;
}

inline nlohmann::json signal_to_json(const Signal& x) {
  if (x.is_real()) return vector_to_json(x.real_values());
  return vector_to_json(x.complex_values());
}

inline Index require_index(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field: ") + key);
  const auto& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(std::string("bad value for key: ") + key);
  return static_cast<Index>(v.get<long long>());
}

inline double real_from_json(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ParseError("bad value for key: " + key);
  return v.get<double>();
}

template <class Scalar>
Scalar scalar_from_json(const nlohmann::json& v, const std::string& key) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return real_from_json(v, key);
  } else {
    if (!v.is_array() || v.size() != 2) throw ParseError("bad value for key: " + key + " (expected [re, im])");
    return {real_from_json(v[0], key), real_from_json(v[1], key)};
  }
}

template <class Scalar>
Vec<Scalar> vector_from_json(const nlohmann::json& v, const std::string& key, Index expected) {
  if (!v.is_array()) throw ParseError("bad value for key: " + key + " (expected array)");
  if (expected >= 0 && static_cast<Index>(v.size()) != expected)
    throw ParseError("bad value for key: " + key + " (expected " + std::to_string(expected) + " entries)");
  Vec<Scalar> out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) out[i] = scalar_from_json<Scalar>(v[static_cast<std::size_t>(i)], key);
  return out;
}

inline RealVector real_vector_from_json(const nlohmann::json& v, const std::string& key, Index expected) {
  return vector_from_json<double>(v, key, expected);
}

template <class Scalar>
Mat<Scalar> matrix_from_json(const nlohmann::json& v, const std::string& key, Index rows, Index cols) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows)
    throw ParseError("bad value for key: " + key + " (expected " + std::to_string(rows) + " rows)");
  Mat<Scalar> out(rows, cols);
  for (Index i = 0; i < rows; ++i) out.row(i) = vector_from_json<Scalar>(v[static_cast<std::size_t>(i)], key, cols);
  return out;
}

inline Signal signal_from_json(const nlohmann::json& v, const std::string& key, FieldTag field, Index expected) {
  try {
    if (field == FieldTag::Real) return Signal(vector_from_json<double>(v, key, expected));
    return Signal(vector_from_json<Complex>(v, key, expected));
  } catch (const InvalidArgument& err) {
    throw ParseError("bad value for key: " + key + " (" + err.what() + ")");
  }
}

}  // namespace robustpr::detail
