#pragma once

#include <cstdint>

#include "aswt/poly.hpp"

namespace aswt {

// The unique reduced monomial x^nu y^a (a_j < p) of pole order w at the given level.
// Throws a domain error when no such monomial exists.
Monomial monomial_with_pole_order(std::uint64_t w, const PoleProfile& prof, int level);

struct StandardForm {
  ReducedPoly f;      // f' = f - Z^p + Z
  ReducedPoly shift;  // Z, so that y = y' + Z
  unsigned steps = 0;
};

// Cancels p-divisible leading pole orders of f (level L, reduced w.r.t. ring) with
// Artin-Schreier substitutions until the pole order equals `target`.
StandardForm to_standard_form(const TowerRing& ring, const ReducedPoly& f, const PoleProfile& prof,
                              std::uint64_t target);

}  // namespace aswt
