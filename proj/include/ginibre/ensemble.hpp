#pragma once

#include <string>
#include <string_view>

namespace ginibre {

enum class Ensemble { complex, quaternion };

std::string_view to_string(Ensemble e);

/// Accepts "complex" or "quaternion"; throws DomainError otherwise.
Ensemble parse_ensemble(std::string_view name);

/// The law of one squared modulus: r² = s / scale with s ~ Gamma(shape, 1).
struct GammaSumLaw {
  double shape = 1.0;
  double scale = 1.0;
};

/// Law of the ℓ-th squared modulus (ℓ = 1..N). The complex ensemble uses
/// Gamma(ℓ) scaled by N; the quaternion ensemble uses Gamma(2ℓ) scaled by 2N.
GammaSumLaw modulus_law(Ensemble e, int n, int ell);

}  // namespace ginibre
