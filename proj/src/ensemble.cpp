#include "ginibre/ensemble.hpp"

#include "ginibre/error.hpp"

namespace ginibre {

std::string_view to_string(Ensemble e) {
  return e == Ensemble::complex ? "complex" : "quaternion";
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "complex") return Ensemble::complex;
  if (name == "quaternion") return Ensemble::quaternion;
  detail::domain_fail("unknown ensemble '" + std::string(name) + "'");
}

GammaSumLaw modulus_law(Ensemble e, int n, int ell) {
  if (n < 1 || ell < 1 || ell > n) detail::domain_fail("modulus_law: need 1 <= ell <= N");
  if (e == Ensemble::complex) return {static_cast<double>(ell), static_cast<double>(n)};
  return {2.0 * ell, 2.0 * n};
}

}  // namespace ginibre
