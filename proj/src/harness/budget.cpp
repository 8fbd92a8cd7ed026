#include <cmath>

#include <json.hpp>

#include "dpt/errors.hpp"
#include "dpt/harness.hpp"

namespace dpt::harness {

BudgetReport budget(const BudgetInput& in) {
  if (!(in.n_atoms > 0.0) || !(in.cooperativity > 0.0) || !(in.gamma_i > 0.0))
    throw InvalidParameter("budget needs N > 0, C > 0 and gamma_i > 0");
  if (!(in.prefactor > 0.0) || !std::isfinite(in.exponent)) throw InvalidParameter("bad scaling law");
  BudgetReport r;
  r.prefactor = in.prefactor;
  r.exponent = in.exponent;
  r.gamma_c = in.n_atoms * in.cooperativity * in.gamma_i;
  r.xi2_0 = in.prefactor * std::pow(in.n_atoms, in.exponent);
  r.correction = 2.0 / (in.n_atoms * in.cooperativity * r.xi2_0);
  r.xi2_total = r.xi2_0 + r.correction;
  // Stored as the difference so that xi2_total - xi2_0 reproduces it exactly.
  r.correction = r.xi2_total - r.xi2_0;
  // At the optimum 1 - 4 Omega^2/gc^2 = xi2_0^2 (Vx = 0), or (2 xi2_0)^2 for large Vx.
  const double rate = in.large_vx ? r.gamma_c * r.xi2_0 : 0.5 * r.gamma_c * r.xi2_0;
  r.tau = 1.0 / rate;
  r.omega_c = 0.5 * r.gamma_c;
  r.gamma_i_tau = in.gamma_i * r.tau;
  r.regime_warning = r.gamma_i_tau > 0.1;
  return r;
}

std::string to_json(const BudgetInput& in, const BudgetReport& r) {
  nlohmann::ordered_json j;
  j["input"] = {{"n_atoms", in.n_atoms},
                {"cooperativity", in.cooperativity},
                {"gamma_i", in.gamma_i},
                {"large_vx", in.large_vx}};
  j["scaling_law"] = {{"prefactor", r.prefactor},
                      {"exponent", r.exponent},
                      {"default_prefactor", 1.70},
                      {"default_exponent", -0.29}};
  j["gamma_c"] = r.gamma_c;
  j["xi2_0"] = r.xi2_0;
  j["correction"] = r.correction;
  j["xi2_total"] = r.xi2_total;
  j["tau"] = r.tau;
  j["omega_c"] = r.omega_c;
  j["gamma_i_tau"] = r.gamma_i_tau;
  j["regime_warning"] = r.regime_warning;
  j["units"] = "rates in the units of gamma_i; tau in their inverse";
  return j.dump(2);
}

}  // namespace dpt::harness
