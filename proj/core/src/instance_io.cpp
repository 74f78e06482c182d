#include "robustpr/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "robustpr/errors.hpp"
#include "robustpr/detail/json_convert.hpp"

namespace robustpr {

using nlohmann::json;

std::string serialize_instance(const MeasurementEnsemble& e) {
  json doc;
  doc["field"] = std::string(to_string(e.field()));
  doc["p"] = e.p();
  doc["n"] = e.n();
  doc["seed"] = e.seed();
  if (e.field() == FieldTag::Real)
    doc["a"] = detail::matrix_to_json(e.sampling<double>());
  else
    doc["a"] = detail::matrix_to_json(e.sampling<Complex>());
  doc["b"] = detail::vector_to_json(e.observations());
  if (e.ground_truth()) doc["x_true"] = detail::signal_to_json(*e.ground_truth());
  if (e.noise_record()) doc["eps"] = detail::vector_to_json(*e.noise_record());
  return doc.dump() + "\n";
}

MeasurementEnsemble deserialize_instance(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("malformed JSON: ") + err.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");

  const auto p = detail::require_index(doc, "p");
  const auto n = detail::require_index(doc, "n");
  if (!doc.contains("field")) throw ParseError("missing field: field");
  if (!doc["field"].is_string()) throw ParseError("bad value for key: field");
  FieldTag field;
  try {
    field = parse_field(doc["field"].get<std::string>());
  } catch (const InvalidArgument&) {
    throw ParseError("bad value for key: field");
  }
  if (!doc.contains("seed")) throw ParseError("missing field: seed");
  if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
    throw ParseError("bad value for key: seed");
  const auto seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("a")) throw ParseError("missing field: a");
  if (!doc.contains("b")) throw ParseError("missing field: b");

  RealVector b = detail::real_vector_from_json(doc["b"], "b", n);
  std::optional<RealVector> eps;
  if (doc.contains("eps")) eps = detail::real_vector_from_json(doc["eps"], "eps", n);
  std::optional<Signal> x_true;
  if (doc.contains("x_true")) x_true = detail::signal_from_json(doc["x_true"], "x_true", field, p);

  if (field == FieldTag::Real)
    return MeasurementEnsemble(detail::matrix_from_json<double>(doc["a"], "a", n, p), std::move(b), std::move(x_true),
                               std::move(eps), seed);
  return MeasurementEnsemble(detail::matrix_from_json<Complex>(doc["a"], "a", n, p), std::move(b), std::move(x_true),
                             std::move(eps), seed);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_instance(const std::filesystem::path& path, const MeasurementEnsemble& e) {
  write_text_file(path, serialize_instance(e));
}

MeasurementEnsemble read_instance(const std::filesystem::path& path) {
  return deserialize_instance(read_text_file(path));
}

}  // namespace robustpr
