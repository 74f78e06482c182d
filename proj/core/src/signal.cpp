#include "robustpr/signal.hpp"

#include "robustpr/errors.hpp"

#include <string>
#include <type_traits>

namespace robustpr {

namespace {

template <class Scalar>
void check_values(const Vec<Scalar>& v) {
  if (v.size() < 1) throw InvalidArgument("signal length must be >= 1");
  if (!v.allFinite()) throw InvalidArgument("signal entries must be finite");
}

}  // namespace

std::string_view to_string(FieldTag field) noexcept { return field == FieldTag::Real ? "real" : "complex"; }

FieldTag parse_field(std::string_view text) {
  if (text == "real") return FieldTag::Real;
  if (text == "complex") return FieldTag::Complex;
  throw InvalidArgument("unknown field '" + std::string(text) + "' (expected real or complex)");
}

Signal::Signal(RealVector values) : values_(std::move(values)) { check_values(std::get<RealVector>(values_)); }

Signal::Signal(ComplexVector values) : values_(std::move(values)) { check_values(std::get<ComplexVector>(values_)); }

Signal Signal::zeros(FieldTag field, Index p) {
  if (field == FieldTag::Real) return Signal(RealVector(RealVector::Zero(p)));
  return Signal(ComplexVector(ComplexVector::Zero(p)));
}

Index Signal::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, values_);
}

template <class Scalar>
const Vec<Scalar>& Signal::values() const {
  if (const auto* v = std::get_if<Vec<Scalar>>(&values_)) return *v;
  throw InvalidArgument(std::string("signal is ") + std::string(to_string(field())) + ", requested " +
                        std::string(to_string(field_of<Scalar>())));
}

template const Vec<double>& Signal::values<double>() const;
template const Vec<Complex>& Signal::values<Complex>() const;

ComplexVector Signal::as_complex() const {
  return std::visit([](const auto& v) -> ComplexVector { return v.template cast<Complex>(); }, values_);
}

double Signal::norm() const {
  return std::visit([](const auto& v) { return v.norm(); }, values_);
}

std::vector<Index> Signal::support() const {
  std::vector<Index> out;
  std::visit(
      [&](const auto& v) {
        for (Index j = 0; j < v.size(); ++j)
          if (v[j] != typename std::decay_t<decltype(v)>::Scalar(0)) out.push_back(j);
      },
      values_);
  return out;
}

Index Signal::support_size() const { return static_cast<Index>(support().size()); }

bool operator==(const Signal& a, const Signal& b) {
  if (a.field() != b.field() || a.size() != b.size()) return false;
  if (a.is_real()) return a.real_values() == b.real_values();
  return a.complex_values() == b.complex_values();
}

}  // namespace robustpr
