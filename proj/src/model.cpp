#include "dpt/model.hpp"

#include <cmath>

#include "dpt/errors.hpp"

namespace dpt {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::IndependentXY: return "independent_xy";
    case Model::CollectiveXY: return "collective_xy";
    case Model::Driven: return "driven";
    case Model::General: return "general";
  }
  return "general";
}

Model model_from_string(std::string_view s) {
  if (s == "independent_xy" || s == "independent") return Model::IndependentXY;
  if (s == "collective_xy" || s == "collective") return Model::CollectiveXY;
  if (s == "driven") return Model::Driven;
  if (s == "general") return Model::General;
  throw InvalidParameter("unknown model '" + std::string(s) + "'");
}

ModelParams ModelParams::independent_xy(double v, double gamma_i, int n_atoms) {
  ModelParams p;
  p.model = Model::IndependentXY;
  p.vx = v;
  p.vy = -v;
  p.gamma_i = gamma_i;
  p.n_atoms = n_atoms;
  p.validate();
  return p;
}

ModelParams ModelParams::collective_xy(double v, double gamma_c, int n_atoms) {
  ModelParams p;
  p.model = Model::CollectiveXY;
  p.vx = v;
  p.vy = -v;
  p.gamma_c = gamma_c;
  p.n_atoms = n_atoms;
  p.validate();
  return p;
}

ModelParams ModelParams::driven(double vx, double omega, double gamma_c, int n_atoms) {
  ModelParams p;
  p.model = Model::Driven;
  p.vx = vx;
  p.omega = omega;
  p.gamma_c = gamma_c;
  p.n_atoms = n_atoms;
  p.validate();
  return p;
}

ModelParams ModelParams::general(double vx, double vy, double omega, double gamma_c,
                                 int n_atoms) {
  ModelParams p;
  p.model = Model::General;
  p.vx = vx;
  p.vy = vy;
  p.omega = omega;
  p.gamma_c = gamma_c;
  p.n_atoms = n_atoms;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  for (double v : {vx, vy, omega, gamma_i, gamma_c}) {
    if (!std::isfinite(v)) throw InvalidParameter("model parameters must be finite");
  }
  if (gamma_i < 0.0 || gamma_c < 0.0) throw InvalidParameter("decay rates must be non-negative");
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be >= 1");
  switch (model) {
    case Model::IndependentXY:
      if (vy != -vx) throw InvalidParameter("independent_xy requires vy = -vx");
      if (gamma_c != 0.0) throw InvalidParameter("independent_xy requires gamma_c = 0");
      if (omega != 0.0) throw InvalidParameter("independent_xy has no drive");
      break;
    case Model::CollectiveXY:
      if (vy != -vx) throw InvalidParameter("collective_xy requires vy = -vx");
      if (gamma_i != 0.0) throw InvalidParameter("collective_xy requires gamma_i = 0");
      if (omega != 0.0) throw InvalidParameter("collective_xy has no drive");
      break;
    case Model::Driven:
      if (vy != 0.0) throw InvalidParameter("driven model requires vy = 0");
      if (gamma_i != 0.0) throw InvalidParameter("driven model requires gamma_i = 0");
      break;
    case Model::General:
      break;
  }
}

}  // namespace dpt
