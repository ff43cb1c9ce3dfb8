#include "warpcrit/tolerances.hpp"

namespace warpcrit {

namespace {

template <class T, class F>
auto table(T& t, F&& visit) {
  return visit(std::vector<std::pair<std::string, decltype(&t.rtol)>>{
      {"rtol", &t.rtol},
      {"atol", &t.atol},
      {"conservation", &t.conservation},
      {"lambda_identity", &t.lambda_identity},
      {"critical", &t.critical},
      {"scalar", &t.scalar},
      {"weyl", &t.weyl},
      {"einstein", &t.einstein},
      {"fiber", &t.fiber},
      {"root", &t.root},
      {"matching", &t.matching},
      {"lambda_floor", &t.lambda_floor},
      {"positivity_floor", &t.positivity_floor},
      {"constant_detect", &t.constant_detect},
      {"degenerate", &t.degenerate},
      {"quadrature", &t.quadrature},
      {"tail", &t.tail},
  });
}

}  // namespace

bool Tolerances::set(const std::string& name, double value) {
  return table(*this, [&](const auto& fields) {
    for (const auto& [key, ptr] : fields) {
      if (key == name) {
        *ptr = value;
        return true;
      }
    }
    return false;
  });
}

std::vector<std::pair<std::string, double>> Tolerances::entries() const {
  return table(*this, [](const auto& fields) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(fields.size());
    for (const auto& [key, ptr] : fields) out.emplace_back(key, *ptr);
    return out;
  });
}

}  // namespace warpcrit
