#pragma once

// Brute-force minimizer for the 2-element 1D inner problem with both ends
// clamped: unknowns (u_1, c_0, c_1, c_2) on a box, searched on a grid that
// is shrunk around the best point each round.
#include "porofick/materials.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace oracle {

using namespace porofick;

struct TwoElementProblem {
  const FreeEnergy* model = nullptr;
  double h = 0.5;              // element length
  std::array<double, 3> mu{};  // mu~ at the nodes
  double f = 0.0;              // body force

  // sum_K sum_{i in K} h/2 phi(e_K, c_i) - sum_i m_i mu_i c_i - sum_i m_i f u_i
  double value(const std::array<double, 4>& x) const {
    const double u1 = x[0];
    const double e0 = u1 / h, e1 = -u1 / h;
    const double m[3] = {h / 2, h, h / 2};
    auto phi = [&](double e, double c) {
      return model->energy(Voigt::Constant(1, e), Conc::Constant(1, c));
    };
    double v = h / 2 * (phi(e0, x[1]) + phi(e0, x[2]) + phi(e1, x[2]) + phi(e1, x[3]));
    for (int i = 0; i < 3; ++i) v -= m[i] * mu[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 1)];
    v -= m[1] * f * u1;
    return v;
  }
};

inline std::array<double, 4> grid_search(const TwoElementProblem& p, std::array<double, 4> lo,
                                         std::array<double, 4> hi, int points = 21, int rounds = 40) {
  std::array<double, 4> best{};
  for (int r = 0; r < rounds; ++r) {
    double fbest = std::numeric_limits<double>::infinity();
    std::array<double, 4> step{};
    for (int k = 0; k < 4; ++k) step[static_cast<size_t>(k)] = (hi[static_cast<size_t>(k)] - lo[static_cast<size_t>(k)]) / (points - 1);
    std::array<double, 4> x{};
    for (int a = 0; a < points; ++a)
      for (int b = 0; b < points; ++b)
        for (int c = 0; c < points; ++c)
          for (int d = 0; d < points; ++d) {
            x = {lo[0] + a * step[0], lo[1] + b * step[1], lo[2] + c * step[2], lo[3] + d * step[3]};
            const double v = p.value(x);
            if (v < fbest) {
              fbest = v;
              best = x;
            }
          }
    // keep two cells on each side so a ridge between grid points is not lost
    for (size_t k = 0; k < 4; ++k) {
      double l = best[k] - 2 * step[k], u = best[k] + 2 * step[k];
      if (k > 0) l = std::max(l, 1e-12);
      lo[k] = l;
      hi[k] = u;
    }
    if (step[0] < 1e-7 && step[1] < 1e-7) break;
  }
  return best;
}

}  // namespace oracle
