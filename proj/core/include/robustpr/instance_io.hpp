#pragma once

#include <filesystem>
#include <string>

#include "robustpr/ensemble.hpp"

namespace robustpr {

/// Instance document: {field, p, n, seed, a, b, x_true?, eps?}.
/// `a` is an array of n rows of p entries; complex scalars are [re, im]
/// pairs. Doubles are written in shortest round-trip form, so
/// deserialize(serialize(e)) == e bit for bit.
std::string serialize_instance(const MeasurementEnsemble& e);

/// Throws ParseError naming the offending key ("missing field: p", ...).
/// Consistency violations surface as InvalidArgument from the ensemble.
MeasurementEnsemble deserialize_instance(const std::string& document);

/// File wrappers; I/O failures throw IoError.
void write_instance(const std::filesystem::path& path, const MeasurementEnsemble& e);
MeasurementEnsemble read_instance(const std::filesystem::path& path);

/// Shared by result files: signals as JSON arrays (complex entries [re, im]).
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace robustpr
