#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "dpt/errors.hpp"
#include "dpt/observables.hpp"

namespace dpt::obs {
namespace {

using lindblad::cplx;

// Orthonormal associated Legendre values pbar[k][q] (Condon-Shortley phase, q >= 0),
// so that Y_kq = pbar[k][q] e^{i q phi}.
void legendre_table(int kmax, double theta, std::vector<std::vector<double>>& pbar) {
  const double x = std::cos(theta), s = std::sin(theta);
  pbar.assign(kmax + 1, std::vector<double>(kmax + 1, 0.0));
  pbar[0][0] = 0.5 / std::sqrt(std::numbers::pi);
  for (int q = 1; q <= kmax; ++q) {
    pbar[q][q] = -std::sqrt((2.0 * q + 1.0) / (2.0 * q)) * s * pbar[q - 1][q - 1];
  }
  for (int q = 0; q < kmax; ++q) pbar[q + 1][q] = std::sqrt(2.0 * q + 3.0) * x * pbar[q][q];
  for (int q = 0; q <= kmax; ++q) {
    for (int k = q + 2; k <= kmax; ++k) {
      const double a = std::sqrt((4.0 * k * k - 1.0) / (double(k) * k - double(q) * q));
      const double a_prev = std::sqrt((4.0 * (k - 1.0) * (k - 1.0) - 1.0) / ((k - 1.0) * (k - 1.0) - double(q) * q));
      pbar[k][q] = a * (x * pbar[k - 1][q] - pbar[k - 2][q] / a_prev);
    }
  }
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

WignerGrid wigner(const lindblad::DensityMatrix& rho, const std::vector<double>& theta,
                  const std::vector<double>& phi, bool plot_normalize) {
  if (rho.tag != lindblad::BasisTag::Dicke) throw BasisMismatch("the Wigner function needs a Dicke-basis state");
  const HalfInt j = rho.spins.front();
  const int tj = j.twice;
  const lindblad::Matrix& r = rho.blocks.front();
  const int d = static_cast<int>(r.rows());

  // rho_kq = Tr(rho T_kq^dag), T_kq = sum sqrt((2k+1)/(2j+1)) <j m'; k q | j m> |m><m'|.
  const int kmax = tj;
  std::vector<std::vector<cplx>> rkq(kmax + 1, std::vector<cplx>(2 * kmax + 1, 0.0));
  for (int k = 0; k <= kmax; ++k) {
    const double norm = std::sqrt((2.0 * k + 1.0) / (tj + 1.0));
    for (int q = -k; q <= k; ++q) {
      cplx acc = 0.0;
      for (int ip = 0; ip < d; ++ip) {
        const int i = ip + q;
        if (i < 0 || i >= d) continue;
        const HalfInt mp(2 * ip - tj), m(2 * i - tj);
        const double cg = spin::coupling_coefficient(j, mp, HalfInt(2 * k), HalfInt(2 * q), j, m);
        if (cg != 0.0) acc += r(i, ip) * cg;
      }
      rkq[k][q + kmax] = norm * acc;
    }
  }

  WignerGrid g;
  g.theta = theta;
  g.phi = phi;
  g.values.resize(static_cast<Eigen::Index>(theta.size()), static_cast<Eigen::Index>(phi.size()));
  std::vector<std::vector<double>> pbar;
  std::vector<cplx> a(kmax + 1), b(kmax + 1);
  double imag = 0.0;
  for (std::size_t it = 0; it < theta.size(); ++it) {
    legendre_table(kmax, theta[it], pbar);
    for (int q = 0; q <= kmax; ++q) {
      cplx sa = 0.0, sb = 0.0;
      const double sign = (q % 2 == 0) ? 1.0 : -1.0;
      for (int k = q; k <= kmax; ++k) {
        sa += rkq[k][q + kmax] * pbar[k][q];
        if (q > 0) sb += rkq[k][-q + kmax] * sign * pbar[k][q];
      }
      a[q] = sa;
      b[q] = sb;
    }
    for (std::size_t ip = 0; ip < phi.size(); ++ip) {
      cplx w = a[0];
      for (int q = 1; q <= kmax; ++q) {
        const cplx e = std::polar(1.0, q * phi[ip]);
        w += a[q] * e + b[q] * std::conj(e);
      }
      g.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(ip)) = w.real();
      imag = std::max(imag, std::abs(w.imag()));
    }
  }
  const double scale = g.values.size() ? g.values.cwiseAbs().maxCoeff() : 0.0;
  g.max_imag_residue = scale > 0.0 ? imag / scale : imag;
  if (g.max_imag_residue > 1e-6) throw ConsistencyError("Wigner function has a large imaginary part");
  if (plot_normalize) {
    const double mx = g.values.maxCoeff();
    if (mx > 0.0) g.values /= mx;
    g.normalization = "plot";
  }
  return g;
}

double angular_distance(double t1, double p1, double t2, double p2) {
  const double c = std::sin(t1) * std::sin(t2) * std::cos(p1 - p2) + std::cos(t1) * std::cos(t2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

std::vector<Peak> local_maxima(const WignerGrid& g) {
  const int nt = static_cast<int>(g.theta.size());
  int np = static_cast<int>(g.phi.size());
  std::vector<Peak> out;
  if (nt == 0 || np == 0) return out;
  const double two_pi = 2.0 * std::numbers::pi;
  const double dphi = np > 1 ? g.phi[1] - g.phi[0] : two_pi;
  // Periodic either with an open grid or with the last column repeating the first.
  bool periodic = np > 1 && std::abs(g.phi.back() + dphi - g.phi.front() - two_pi) < 1e-9;
  if (np > 2 && std::abs(g.phi.back() - g.phi.front() - two_pi) < 1e-9) {
    periodic = true;
    --np;
  }
  auto is_pole = [&](int i) { return std::abs(std::sin(g.theta[i])) < 1e-12; };
  for (int i = 0; i < nt; ++i) {
    for (int k = 0; k < np; ++k) {
      if (is_pole(i) && k > 0) continue;
      const double v = g.values(i, k);
      // Not below any neighbour and above at least one, so flat regions do not count.
      bool best = true, above = false;
      auto visit = [&](double w) {
        if (w > v) best = false;
        if (w < v) above = true;
      };
      for (int di = -1; di <= 1 && best; ++di) {
        const int ii = i + di;
        if (ii < 0 || ii >= nt) continue;
        // A pole row borders every phi column of its neighbour row.
        if (is_pole(i) && di != 0) {
          for (int kk = 0; kk < np; ++kk) visit(g.values(ii, kk));
          continue;
        }
        for (int dk = -1; dk <= 1; ++dk) {
          if (di == 0 && dk == 0) continue;
          int kk = k + dk;
          if (periodic) kk = (kk + np) % np;
          else if (kk < 0 || kk >= np) continue;
          visit(g.values(ii, is_pole(ii) ? 0 : kk));
        }
      }
      if (best && above) out.push_back({g.theta[i], g.phi[k], v});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  // Plateaus produce neighbouring duplicates; keep the first of each cluster.
  std::vector<Peak> kept;
  const double cell = std::max(dphi, nt > 1 ? std::abs(g.theta[1] - g.theta[0]) : 0.0) * 1.5;
  for (const Peak& p : out) {
    bool dup = false;
    for (const Peak& q : kept) dup = dup || angular_distance(p.theta, p.phi, q.theta, q.phi) <= cell;
    if (!dup) kept.push_back(p);
  }
  return kept;
}

void write_wigner_csv(std::ostream& os, const WignerGrid& g) {
  os << "theta,phi,W\n";
  os.precision(17);
  for (std::size_t i = 0; i < g.theta.size(); ++i)
    for (std::size_t k = 0; k < g.phi.size(); ++k)
      os << g.theta[i] << ',' << g.phi[k] << ',' << g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) << '\n';
}

void write_wigner_matrix(std::ostream& os, const WignerGrid& g) {
  os.precision(17);
  os << "# wigner " << g.theta.size() << ' ' << g.phi.size() << ' ' << g.normalization << '\n';
  os << "# phi";
  for (double p : g.phi) os << ' ' << p;
  os << '\n';
  for (std::size_t i = 0; i < g.theta.size(); ++i) {
    os << g.theta[i];
    for (std::size_t k = 0; k < g.phi.size(); ++k) os << ' ' << g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    os << '\n';
  }
}

}  // namespace dpt::obs
