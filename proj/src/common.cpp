#include "elastic_tops/common.hpp"

namespace etop {

Curvature curvature_from_int(int k) {
  switch (k) {
    case -1:
      return Curvature::Hyperbolic;
    case 0:
      return Curvature::Flat;
    case 1:
      return Curvature::Elliptic;
    default:
      throw std::invalid_argument("curvature must be -1, 0 or 1, got " + std::to_string(k));
  }
}

std::string to_string(Curvature k) { return std::to_string(value(k)); }

Complex continue_sqrt(Complex square, Complex previous) {
  const Complex root = std::sqrt(square);
  return std::abs(root - previous) <= std::abs(root + previous) ? root : -root;
}

}  // namespace etop
