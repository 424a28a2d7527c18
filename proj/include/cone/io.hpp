#pragma once

#include "json.hpp"

#include "cone/algebra.hpp"

namespace cone {

nlohmann::json algebra_to_json(const Algebra& a);
Algebra algebra_from_json(const nlohmann::json& j);

// {algebra:{family,r,n}, re:[...], im:[...]}
nlohmann::json element_to_json(const ComplexElement& z);
ComplexElement element_from_json(const nlohmann::json& j);
// Also accepts a bare number (scalar multiple of e) or a list of eigenvalues.
ComplexElement element_from_json(const Algebra& a, const nlohmann::json& j);

}  // namespace cone
