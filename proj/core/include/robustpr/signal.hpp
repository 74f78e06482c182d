#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace robustpr {

using Complex = std::complex<double>;
using Index = Eigen::Index;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealVector = Vec<double>;
using ComplexVector = Vec<Complex>;
using RealMatrix = Mat<double>;
using ComplexMatrix = Mat<Complex>;

enum class FieldTag { Real, Complex };

std::string_view to_string(FieldTag field) noexcept;
/// Accepts "real" / "complex" (case-sensitive). Throws InvalidArgument.
FieldTag parse_field(std::string_view text);

template <class Scalar>
constexpr FieldTag field_of() noexcept {
  return std::is_same_v<Scalar, double> ? FieldTag::Real : FieldTag::Complex;
}

/// A length-p vector over R or C with finite entries. Real signals store
/// real values only, so their imaginary parts are zero by construction.
class Signal {
 public:
  explicit Signal(RealVector values);
  explicit Signal(ComplexVector values);

  static Signal zeros(FieldTag field, Index p);

  FieldTag field() const noexcept { return std::holds_alternative<RealVector>(values_) ? FieldTag::Real : FieldTag::Complex; }
  bool is_real() const noexcept { return field() == FieldTag::Real; }
  Index size() const noexcept;

  /// Typed access; throws InvalidArgument when Scalar does not match the field.
  template <class Scalar>
  const Vec<Scalar>& values() const;

  const RealVector& real_values() const { return values<double>(); }
  const ComplexVector& complex_values() const { return values<Complex>(); }

  /// Entries widened to complex (copy).
  ComplexVector as_complex() const;

  double norm() const;
  /// Indices j with x_j != 0, ascending.
  std::vector<Index> support() const;
  Index support_size() const;

  friend bool operator==(const Signal& a, const Signal& b);

 private:
  std::variant<RealVector, ComplexVector> values_;
};

/// Dispatches `fn(const Vec<S>&)` on the stored scalar type.
template <class Fn>
decltype(auto) visit(const Signal& x, Fn&& fn) {
  if (x.is_real()) return fn(x.values<double>());
  return fn(x.values<Complex>());
}

}  // namespace robustpr
