#pragma once

#include <vector>

#include "cone/algebra.hpp"

namespace cone::testing {

inline std::vector<Algebra> algebras() {
  return {Algebra::real_line(), Algebra::symr(2), Algebra::symr(3), Algebra::hermc(2),
          Algebra::hermc(3),    Algebra::spin(3), Algebra::spin(4), Algebra::spin(5)};
}

}  // namespace cone::testing
