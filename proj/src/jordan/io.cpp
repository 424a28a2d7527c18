#include "cone/io.hpp"

#include "cone/error.hpp"

namespace cone {

using nlohmann::json;

json algebra_to_json(const Algebra& a) {
  return {{"family", family_name(a.family)}, {"r", a.r}, {"n", a.n}};
}

Algebra algebra_from_json(const json& j) {
  if (j.is_string()) return Algebra::parse(j.get<std::string>());
  const std::string f = j.at("family").get<std::string>();
  Algebra a;
  if (f == "SymR") a = Algebra::symr(j.at("r").get<int>());
  else if (f == "HermC") a = Algebra::hermc(j.at("r").get<int>());
  else if (f == "Spin") a = Algebra::spin(j.at("n").get<int>());
  else throw MathError(ErrorCode::UnsupportedAlgebra, "unknown family " + f);
  if (j.contains("n") && j.at("n").get<int>() != a.n)
    throw MathError(ErrorCode::AlgebraMismatch, "n does not match family and rank");
  if (j.contains("r") && j.at("r").get<int>() != a.r)
    throw MathError(ErrorCode::AlgebraMismatch, "r does not match family");
  return a;
}

json element_to_json(const ComplexElement& z) {
  json re = json::array(), im = json::array();
  for (int k = 0; k < z.c.size(); ++k) {
    re.push_back(z.c(k).real());
    im.push_back(z.c(k).imag());
  }
  return {{"algebra", algebra_to_json(z.alg)}, {"re", re}, {"im", im}};
}

ComplexElement element_from_json(const json& j) {
  return element_from_json(algebra_from_json(j.at("algebra")), j);
}

ComplexElement element_from_json(const Algebra& a, const json& j) {
  auto as_complex = [](const json& v) -> cd {
    if (v.is_number()) return cd(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2) return cd(v[0].get<double>(), v[1].get<double>());
    if (v.is_object()) return cd(v.value("re", 0.0), v.value("im", 0.0));
    throw std::invalid_argument("expected a number, [re,im] or {re,im}");
  };
  if (j.is_number() || (j.is_object() && !j.contains("algebra") && !j.contains("eig"))) {
    cd s = as_complex(j);
    return s * ComplexElement(Element::unit(a));
  }
  if (j.is_object() && j.contains("eig")) {
    const json& e = j.at("eig");
    if (!e.is_array() || int(e.size()) != a.r)
      throw std::invalid_argument("eig needs r entries");
    Eigen::VectorXcd t(a.r);
    for (int i = 0; i < a.r; ++i) t(i) = as_complex(e[i]);
    return diagonal(a, t);
  }
  if (j.is_object()) {
    Algebra ja = algebra_from_json(j.at("algebra"));
    require_same(a, ja);
    const json& re = j.at("re");
    if (!re.is_array() || int(re.size()) != a.n)
      throw std::invalid_argument("re needs n entries");
    Eigen::VectorXcd c(a.n);
    for (int k = 0; k < a.n; ++k) c(k) = cd(re[k].get<double>(), 0.0);
    if (j.contains("im")) {
      const json& im = j.at("im");
      if (!im.is_array() || int(im.size()) != a.n)
        throw std::invalid_argument("im needs n entries");
      for (int k = 0; k < a.n; ++k) c(k) += cd(0.0, im[k].get<double>());
    }
    return ComplexElement(a, c);
  }
  if (j.is_array()) {
    if (int(j.size()) != a.r) throw std::invalid_argument("eigenvalue list needs r entries");
    Eigen::VectorXcd t(a.r);
    for (int i = 0; i < a.r; ++i) t(i) = as_complex(j[i]);
    return diagonal(a, t);
  }
  throw std::invalid_argument("cannot parse element");
}

}  // namespace cone
