#pragma once

#include <Eigen/Dense>

#include "fbl/grid.hpp"
#include "fbl/jets.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// Symbols p in S(1) with holomorphic extensions on a strip
// |Im z| <= a, |Im zeta| <= b, |p| <= M, and their quantizations
//
//   standard:  p(x, hD) u(x) = (2 pi h)^{-n} int int p(x, xi)
//                              e^{i <x-y, xi> / h} u(y) dy dxi
//   weyl:      p((x+y)/2, xi) in place of p(x, xi)
//
// xi-integration runs over the grid's momentum box; callers declare the
// bandwidth of the functions the operator will act on so the box truncation
// and quadrature ghosts stay harmless.
// ---------------------------------------------------------------------------

struct Symbol {
  std::string name;
  std::function<cplx(cplx, cplx)> eval;              // holomorphic extension
  std::function<cplx(cplx, cplx)> subprincipal;      // p1; null = 0
  double strip_a = 0.5, strip_b = 0.5, bound_M = 1.0;
  bool xi_decaying = false;  // kernel decays like e^{-b|x-y|/h}: quantization may
                             // truncate its kernel at that radius
  std::function<Jet(double, double, int)> taylor;    // exact jets at real points; null = FD

  cplx at(double x, double xi) const { return eval(cplx{x, 0}, cplx{xi, 0}); }

  Jet taylor_jet(double x0, double xi0, int K) const {
    if (taylor) return taylor(x0, xi0, K);
    auto f = [this](const double* p) { return eval(cplx{p[0], 0}, cplx{p[1], 0}); };
    return jet_from_fd(f, {x0, xi0}, K);
  }
  Jet subprincipal_jet(double x0, double xi0, int K) const {
    if (!subprincipal) return Jet::constant(2, K, {cplx{x0, 0}, cplx{xi0, 0}}, 0.0);
    auto f = [this](const double* p) { return subprincipal(cplx{p[0], 0}, cplx{p[1], 0}); };
    return jet_from_fd(f, {x0, xi0}, K);
  }
};

// evaluate the holomorphic extension at a (possibly complex) phase-space
// point, enforcing the declared strip
inline cplx symbol_deformed_eval(const Symbol& p, cplx z, cplx zeta) {
  if (std::abs(z.imag()) > p.strip_a)
    throw domain_error("symbol '" + p.name + "': |Im z| = " + std::to_string(std::abs(z.imag())) +
                       " exceeds the declared strip a = " + std::to_string(p.strip_a));
  if (std::abs(zeta.imag()) > p.strip_b)
    throw domain_error("symbol '" + p.name + "': |Im zeta| = " +
                       std::to_string(std::abs(zeta.imag())) +
                       " exceeds the declared strip b = " + std::to_string(p.strip_b));
  return p.eval(z, zeta);
}

enum class Quantization { standard, weyl };

class QuantizedOperator {
 public:
  QuantizedOperator(const Symbol& p, Quantization flavor, const PhaseSpaceGrid& g,
                    double band = -1.0)
      : grid_(&g), flavor_(flavor), h_(g.h()) {
    if (g.dim() != 1) throw capability_error("quantize: realized for n = 1 only");
    if (band < 0) band = 10.0 * std::sqrt(h_);
    if (g.momentum_headroom(band) < 0.0)
      throw config_error("quantize: momentum box [-" + std::to_string(g.half_width_xi()) + "," +
                         std::to_string(g.half_width_xi()) +
                         "] too small: quadrature ghost at 2*pi*h/dx = " +
                         std::to_string(2 * PI * h_ / g.dx()) +
                         " clips the declared band " + std::to_string(band));
    int Nx = g.points_x(), Nxi = g.points_xi();
    const auto& xs = g.x_nodes();
    const auto& xis = g.xi_nodes();
    M_.resize(Nx, Nx);
    M_.setZero();
    double dy = g.dx();

    // Kernel radius for symbols with momentum decay.  Strip analyticity gives
    // |K(x, x-y)| <= C e^{-b|x-y|/h}; beyond 2 pi h / dxi the xi-quadrature
    // cannot resolve the oscillation at all, so the kernel is cut off (with a
    // smooth taper) before that limit.  Polynomial-type symbols keep their
    // full discrete kernel: its sinc tails are interpolation structure.
    double r_ker = 4.0 * g.half_width_x(), taper_w = 1.0;
    if (p.xi_decaying) {
      double r_resolve = 0.9 * 2 * PI * h_ / g.dxi();
      double r_decay = std::max(36.8 * h_ / std::min(p.strip_b, 2.0), 20.0 * std::sqrt(h_));
      taper_w = std::max(0.4, 6.0 * std::sqrt(h_));
      r_ker = std::min(r_decay, r_resolve - taper_w);
      if (r_ker < 10.0 * std::sqrt(h_))
        throw config_error("quantize: momentum step dxi = " + std::to_string(g.dxi()) +
                           " cannot resolve the kernel of symbol '" + p.name +
                           "' out to its decay radius");
    }
    auto taper = [r_ker, taper_w](double t) {
      if (t <= r_ker) return 1.0;
      if (t >= r_ker + taper_w) return 0.0;
      double s = std::cos(0.5 * PI * (t - r_ker) / taper_w);
      return s * s;
    };
    int B = static_cast<int>(std::ceil((r_ker + taper_w) / dy)) + 1;

    if (flavor == Quantization::standard) {
      // row i: sum_k p(x_i, xi_k) wxi_k e^{i (x_i - y_j) xi_k / h} wy_j / (2 pi h)
      parallel_for(static_cast<std::size_t>(Nx), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          int j0 = std::max<int>(0, static_cast<int>(i) - B);
          int j1 = std::min<int>(Nx - 1, static_cast<int>(i) + B);
          for (int k = 0; k < Nxi; ++k) {
            cplx v = p.at(xs[i], xis[k]) * g.xi_weights()[k] / (2 * PI * h_);
            cplx ph = std::exp(cplx{0.0, (xs[i] - xs[j0]) * xis[k] / h_});
            cplx mult = std::exp(cplx{0.0, -dy * xis[k] / h_});
            for (int j = j0; j <= j1; ++j) {
              M_(i, j) += v * ph * g.x_weights()[j];
              ph *= mult;
            }
          }
          for (int j = j0; j <= j1; ++j) M_(i, j) *= taper(std::abs(xs[i] - xs[j]));
        }
      });
    } else {
      // midpoints (x_i + y_j)/2 take 2 Nx - 1 distinct values
      Eigen::MatrixXcd pmid(2 * Nx - 1, Nxi);
      parallel_for(static_cast<std::size_t>(2 * Nx - 1), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
          double xm = xs[0] + 0.5 * static_cast<double>(m) * dy;
          for (int k = 0; k < Nxi; ++k) pmid(m, k) = p.at(xm, xis[k]);
        }
      });
      double dxi = g.dxi();
      parallel_for(static_cast<std::size_t>(Nx), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          int j0 = std::max<int>(0, static_cast<int>(i) - B);
          int j1 = std::min<int>(Nx - 1, static_cast<int>(i) + B);
          for (int j = j0; j <= j1; ++j) {
            double d = xs[i] - xs[j];
            double rho = taper(std::abs(d));
            if (rho == 0.0) continue;
            cplx ph = std::exp(cplx{0.0, d * xis[0] / h_});
            cplx mult = std::exp(cplx{0.0, d * dxi / h_});
            cplx acc{0, 0};
            for (int k = 0; k < Nxi; ++k) {
              acc += pmid(i + j, k) * g.xi_weights()[k] * ph;
              ph *= mult;
            }
            M_(i, j) = acc * g.x_weights()[j] * rho / (2 * PI * h_);
          }
        }
      });
    }
  }

  const Eigen::MatrixXcd& matrix() const { return M_; }
  Quantization flavor() const { return flavor_; }
  const PhaseSpaceGrid& grid() const { return *grid_; }

  GridFunction apply(const GridFunction& u) const {
    if (u.grid == nullptr || !(*u.grid == *grid_) || u.tag != Tag::base)
      throw structural_error("quantized operator: base function on a different grid");
    GridFunction r(*grid_, Tag::base);
    Eigen::Map<const Eigen::VectorXcd> uv(u.v.data(), u.v.size());
    Eigen::VectorXcd rv = M_ * uv;
    for (std::size_t j = 0; j < r.size(); ++j) r.v[j] = rv(j);
    return r;
  }

 private:
  const PhaseSpaceGrid* grid_;
  Quantization flavor_;
  double h_;
  Eigen::MatrixXcd M_;
};

// ---------------------------------------------------------------------------
// Built-in analytic symbol library.  All carry exact jet builders.
// ---------------------------------------------------------------------------

namespace detail {

inline Jet coord_jets_x(double x0, double xi0, int K) {
  return Jet::coordinate(2, K, {cplx{x0, 0}, cplx{xi0, 0}}, 0);
}
inline Jet coord_jets_xi(double x0, double xi0, int K) {
  return Jet::coordinate(2, K, {cplx{x0, 0}, cplx{xi0, 0}}, 1);
}

}  // namespace detail

inline Symbol symbol_one() {
  Symbol s;
  s.name = "one";
  s.eval = [](cplx, cplx) { return cplx{1, 0}; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 1.0;
  s.taylor = [](double x0, double xi0, int K) {
    return Jet::constant(2, K, {cplx{x0, 0}, cplx{xi0, 0}}, 1.0);
  };
  return s;
}

inline Symbol symbol_coordinate_x(double box = 6.0) {
  Symbol s;
  s.name = "x";
  s.eval = [](cplx z, cplx) { return z; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = box + 10.0;  // box-relative bound; x is not in S(1) globally
  s.taylor = [](double x0, double xi0, int K) { return detail::coord_jets_x(x0, xi0, K); };
  return s;
}

inline Symbol symbol_momentum() {
  Symbol s;
  s.name = "xi";
  s.eval = [](cplx, cplx zeta) { return zeta; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 16.0;
  s.taylor = [](double x0, double xi0, int K) { return detail::coord_jets_xi(x0, xi0, K); };
  return s;
}

// p = exp(-x^2 - xi^2)
inline Symbol symbol_gauss_iso() {
  Symbol s;
  s.name = "gauss_iso";
  s.eval = [](cplx z, cplx zeta) { return std::exp(-z * z - zeta * zeta); };
  s.strip_a = 0.5;
  s.strip_b = 0.5;
  s.xi_decaying = true;
  s.bound_M = std::exp(0.5);  // sup at x = xi = 0, |Im| = strip
  s.taylor = [](double x0, double xi0, int K) {
    Jet x = detail::coord_jets_x(x0, xi0, K), xi = detail::coord_jets_xi(x0, xi0, K);
    return jet_exp((jet_mul(x, x) + jet_mul(xi, xi)) * cplx{-1.0, 0.0});
  };
  return s;
}

// p = cos(x) exp(-xi^2)
inline Symbol symbol_cos_gauss() {
  Symbol s;
  s.name = "cos_gauss";
  s.eval = [](cplx z, cplx zeta) { return std::cos(z) * std::exp(-zeta * zeta); };
  s.strip_a = 0.5;
  s.strip_b = 0.5;
  s.xi_decaying = true;
  s.bound_M = std::cosh(0.5) * std::exp(0.25);
  s.taylor = [](double x0, double xi0, int K) {
    Jet x = detail::coord_jets_x(x0, xi0, K), xi = detail::coord_jets_xi(x0, xi0, K);
    // cos as (e^{ix} + e^{-ix})/2
    Jet c = (jet_exp(x * I) + jet_exp(x * (-I))) * cplx{0.5, 0.0};
    return jet_mul(c, jet_exp(jet_mul(xi, xi) * cplx{-1.0, 0.0}));
  };
  return s;
}

// p = 1 / (1 + x^2 + xi^2), strip a = b = 0.3
inline Symbol symbol_lorentz() {
  Symbol s;
  s.name = "lorentz";
  s.eval = [](cplx z, cplx zeta) { return 1.0 / (1.0 + z * z + zeta * zeta); };
  s.strip_a = 0.3;
  s.strip_b = 0.3;
  s.xi_decaying = true;
  s.bound_M = 1.0 / 0.82;  // Re(1 + z^2 + zeta^2) >= 1 - a^2 - b^2 on the strip
  s.taylor = [](double x0, double xi0, int K) {
    Jet x = detail::coord_jets_x(x0, xi0, K), xi = detail::coord_jets_xi(x0, xi0, K);
    Jet den = jet_mul(x, x) + jet_mul(xi, xi);
    den.raw(0) += 1.0;
    return jet_reciprocal(den);
  };
  return s;
}

// quasimode models: zero at the origin, {Re p, Im p}(0) = -c^2
inline Symbol symbol_model_annihilation() {  // p = xi - i x
  Symbol s;
  s.name = "model_annihilation";
  s.eval = [](cplx z, cplx zeta) { return zeta - I * z; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 32.0;
  s.taylor = [](double x0, double xi0, int K) {
    return detail::coord_jets_xi(x0, xi0, K) + detail::coord_jets_x(x0, xi0, K) * (-I);
  };
  return s;
}

inline Symbol symbol_model_creation() {  // p = xi + i x: hypothesis violated
  Symbol s;
  s.name = "model_creation";
  s.eval = [](cplx z, cplx zeta) { return zeta + I * z; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 32.0;
  s.taylor = [](double x0, double xi0, int K) {
    return detail::coord_jets_xi(x0, xi0, K) + detail::coord_jets_x(x0, xi0, K) * I;
  };
  return s;
}

inline Symbol symbol_model_perturbed(double beta = 0.1) {  // p = xi - i x + beta x^2
  Symbol s;
  s.name = "model_perturbed";
  s.eval = [beta](cplx z, cplx zeta) { return zeta - I * z + beta * z * z; };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 64.0;
  s.taylor = [beta](double x0, double xi0, int K) {
    Jet x = detail::coord_jets_x(x0, xi0, K);
    return detail::coord_jets_xi(x0, xi0, K) + x * (-I) + jet_mul(x, x) * cplx{beta, 0};
  };
  return s;
}

// the annihilation model conjugated by a rotation in phase space
inline Symbol symbol_model_rotated(double theta) {
  Symbol s;
  s.name = "model_rotated";
  double ct = std::cos(theta), st = std::sin(theta);
  // kappa^{-1}(x, xi) = (ct x + st xi, -st x + ct xi); p = (new xi) - i (new x)
  s.eval = [ct, st](cplx z, cplx zeta) {
    cplx xn = ct * z + st * zeta, xin = -st * z + ct * zeta;
    return xin - I * xn;
  };
  s.strip_a = s.strip_b = 10.0;
  s.bound_M = 32.0;
  s.taylor = [ct, st](double x0, double xi0, int K) {
    Jet x = detail::coord_jets_x(x0, xi0, K), xi = detail::coord_jets_xi(x0, xi0, K);
    Jet xn = x * cplx{ct, 0} + xi * cplx{st, 0};
    Jet xin = x * cplx{-st, 0} + xi * cplx{ct, 0};
    return xin + xn * (-I);
  };
  return s;
}

inline Symbol symbol_by_name(const std::string& name) {
  if (name == "one") return symbol_one();
  if (name == "x") return symbol_coordinate_x();
  if (name == "xi") return symbol_momentum();
  if (name == "gauss_iso") return symbol_gauss_iso();
  if (name == "cos_gauss") return symbol_cos_gauss();
  if (name == "lorentz") return symbol_lorentz();
  if (name == "model_annihilation") return symbol_model_annihilation();
  if (name == "model_creation") return symbol_model_creation();
  if (name == "model_perturbed") return symbol_model_perturbed();
  throw config_error("unknown symbol '" + name + "'");
}

inline std::vector<std::string> symbol_library_names() {
  return {"one", "x", "xi", "gauss_iso", "cos_gauss", "lorentz", "model_annihilation",
          "model_creation", "model_perturbed"};
}

// sampled strip-honesty check: |p| over a 20^4 sample of the strip within 5%
inline void check_strip_honesty(const Symbol& p, double x_range = 3.0) {
  double worst = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      for (int k = 0; k < 20; ++k)
        for (int l = 0; l < 20; ++l) {
          double x = -x_range + 2 * x_range * i / 19.0;
          double xi = -x_range + 2 * x_range * j / 19.0;
          double a = -p.strip_a + 2 * p.strip_a * k / 19.0;
          double b = -p.strip_b + 2 * p.strip_b * l / 19.0;
          worst = std::max(worst, std::abs(p.eval(cplx{x, a}, cplx{xi, b})));
        }
  if (worst > p.bound_M * 1.05)
    throw domain_error("symbol '" + p.name + "': sampled strip sup " + std::to_string(worst) +
                       " exceeds the declared M = " + std::to_string(p.bound_M));
}

}  // namespace fbl
