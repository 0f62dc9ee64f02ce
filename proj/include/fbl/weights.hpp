#pragma once

#include "fbl/fbi.hpp"
#include "fbl/symbols.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// Compactly supported real weights phi on phase space, the weighted spaces
// L^2_phi = L^2(T*R^n, e^{-2 phi/h} dx dxi), the deformed symbol
//   p_phi(x, xi) = p(x + 2 d_z phi, xi - 2 i d_z phi),   z = x - i xi,
// and the residual functionals behind the Cordoba-Fefferman / Sjostrand /
// weighted-conjugation estimates.
// ---------------------------------------------------------------------------

class Weight {
 public:
  std::string name;
  std::function<double(double, double)> eval;
  std::function<Jet(double, double, int)> taylor;  // exact Taylor jets at real points
  double support_radius = 0.0;                     // 0 = unknown
  double center_x = 0.0, center_xi = 0.0;
  double scale_eps = 0.0;

  double operator()(double x, double xi) const { return eval(x, xi); }

  Jet taylor_jet(double x, double xi, int K) const {
    if (taylor) return taylor(x, xi, K);
    auto f = [this](const double* p) { return eval(p[0], p[1]); };
    return jet_from_fd(f, {x, xi}, K);
  }

  // gradient (phi_x, phi_xi)
  std::array<double, 2> gradient(double x, double xi) const {
    Jet j = taylor_jet(x, xi, 1);
    return {j.coeff({1, 0}).real(), j.coeff({0, 1}).real()};
  }

  // sup over the grid of |phi|, |d phi|, |d^2 phi| (component-wise)
  double c2_norm(const PhaseSpaceGrid& g) const {
    double worst = 0.0;
    std::size_t P = g.phase_count();
    std::vector<double> partial(P, 0.0);
    parallel_for(P, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t a = lo; a < hi; ++a) {
        double x, xi;
        g.phase_point(a, &x, &xi);
        if (support_radius > 0) {
          double r = std::hypot(x - center_x, xi - center_xi);
          if (r > support_radius + g.dx()) continue;
        }
        Jet j = taylor_jet(x, xi, 2);
        double m = std::abs(j.coeff({0, 0}).real());
        m = std::max(m, std::abs(j.coeff({1, 0}).real()));
        m = std::max(m, std::abs(j.coeff({0, 1}).real()));
        m = std::max(m, std::abs(j.coeff({2, 0}).real()) * 2.0);
        m = std::max(m, std::abs(j.coeff({0, 2}).real()) * 2.0);
        m = std::max(m, std::abs(j.coeff({1, 1}).real()));
        partial[a] = m;
      }
    });
    for (double m : partial) worst = std::max(worst, m);
    return worst;
  }

  void require_inside_box(const PhaseSpaceGrid& g) const {
    if (support_radius <= 0) return;
    if (std::abs(center_x) + support_radius >= g.half_width_x() ||
        std::abs(center_xi) + support_radius >= g.half_width_xi())
      throw config_error("weight '" + name + "': support leaves the phase-space box");
  }
};

// standard bump phi = eps * exp(1 - 1/(1 - r^2/R^2)) on r < R
inline Weight bump_weight(double eps, double R = 2.0, double cx = 0.0, double cxi = 0.0) {
  Weight w;
  w.name = "bump";
  w.scale_eps = eps;
  w.support_radius = R;
  w.center_x = cx;
  w.center_xi = cxi;
  w.eval = [eps, R, cx, cxi](double x, double xi) {
    double s = ((x - cx) * (x - cx) + (xi - cxi) * (xi - cxi)) / (R * R);
    if (s >= 1.0) return 0.0;
    return eps * std::exp(1.0 - 1.0 / (1.0 - s));
  };
  w.taylor = [eps, R, cx, cxi](double x, double xi, int K) {
    std::vector<cplx> pt{cplx{x, 0}, cplx{xi, 0}};
    double s0 = ((x - cx) * (x - cx) + (xi - cxi) * (xi - cxi)) / (R * R);
    if (s0 >= 1.0 - 1e-12) return Jet(2, K, pt);  // identically 0 outside
    // s(x, xi) jet (exact quadratic)
    Jet X = Jet::coordinate(2, K, pt, 0), XI = Jet::coordinate(2, K, pt, 1);
    Jet dx = X;
    dx.raw(0) -= cx;
    Jet dxi = XI;
    dxi.raw(0) -= cxi;
    Jet s = (jet_mul(dx, dx) + jet_mul(dxi, dxi)) * cplx{1.0 / (R * R), 0};
    // w(s) = 1 - 1/(1-s): derivatives w^{(k)}(s0) = -k! (1-s0)^{-(k+1)}, k >= 1
    Jet ws(1, K, {cplx{s0, 0}});
    ws.set_coeff({0}, 1.0 - 1.0 / (1.0 - s0));
    double fac = 1.0;
    for (int k = 1; k <= K; ++k) {
      fac *= k;
      double wk = -fac * std::pow(1.0 - s0, -(k + 1));
      std::vector<int> e{k};
      ws.set_coeff(e, wk / fac);  // Taylor coefficient = w^{(k)}/k!
    }
    Jet g = jet_exp(jet_compose(ws, {s}));
    return g * cplx{eps, 0};
  };
  return w;
}

// d_z phi = (phi_x + i phi_xi)/2 (z = x - i xi convention)
inline cplx dz_weight(const Weight& w, double x, double xi) {
  auto gr = w.gradient(x, xi);
  return 0.5 * cplx{gr[0], gr[1]};
}

// e^{-2 phi/h} per phase node
inline std::vector<double> weight_field(const Weight& w, const PhaseSpaceGrid& g) {
  std::vector<double> f(g.phase_count());
  for (std::size_t a = 0; a < f.size(); ++a) {
    double x, xi;
    g.phase_point(a, &x, &xi);
    f[a] = std::exp(-2.0 * w.eval(x, xi) / g.h());
  }
  return f;
}

inline void require_small_weight(const Weight& w, const PhaseSpaceGrid& g, double eps0 = 0.1) {
  w.require_inside_box(g);
  double c2 = w.c2_norm(g);
  if (!(c2 < eps0))
    throw precondition_error("weight '" + w.name + "': ||phi||_C2 = " + std::to_string(c2) +
                             " violates the smallness gate eps0 = " + std::to_string(eps0));
}

// deformed evaluator p_phi at one real point
inline cplx deformed_symbol_eval(const Symbol& p, const Weight& w, double x, double xi) {
  cplx dz = dz_weight(w, x, xi);
  return symbol_deformed_eval(p, cplx{x, 0} + 2.0 * dz, cplx{xi, 0} - 2.0 * I * dz);
}

// p_phi sampled on the grid; checks the strip condition 2|d_z phi| < (a, b)
// and names the worst node on failure
inline GridFunction deformed_symbol_field(const Symbol& p, const Weight& w,
                                          const PhaseSpaceGrid& g) {
  GridFunction f(g, Tag::phase);
  double worst_a = 0, worst_b = 0, wx = 0, wxi = 0;
  for (std::size_t a = 0; a < f.size(); ++a) {
    double x, xi;
    g.phase_point(a, &x, &xi);
    auto gr = w.gradient(x, xi);
    if (std::abs(gr[1]) > worst_a) {
      worst_a = std::abs(gr[1]);
      wx = x;
      wxi = xi;
    }
    worst_b = std::max(worst_b, std::abs(gr[0]));
  }
  if (worst_a > p.strip_a || worst_b > p.strip_b)
    throw domain_error("deformed_symbol: 2|d_z phi| leaves the strip of '" + p.name +
                       "' (worst node x = " + std::to_string(wx) +
                       ", xi = " + std::to_string(wxi) + ")");
  for (std::size_t a = 0; a < f.size(); ++a) {
    double x, xi;
    g.phase_point(a, &x, &xi);
    f.v[a] = deformed_symbol_eval(p, w, x, xi);
  }
  return f;
}

// symbol values on the phase grid (undeformed)
inline GridFunction symbol_field(const Symbol& p, const PhaseSpaceGrid& g) {
  GridFunction f(g, Tag::phase);
  for (std::size_t a = 0; a < f.size(); ++a) {
    double x, xi;
    g.phase_point(a, &x, &xi);
    f.v[a] = p.at(x, xi);
  }
  return f;
}

inline GridFunction multiply(const GridFunction& field, const GridFunction& F) {
  require_same_grid(field, F);
  GridFunction r = F;
  for (std::size_t a = 0; a < r.size(); ++a) r.v[a] *= field.v[a];
  return r;
}

// |<T P u, T v> - <p T u, T v>| / (||u|| ||v||), flat inner products
inline double cofe_residual(const FbiOperator& T, const QuantizedOperator& P, const Symbol& p,
                            const GridFunction& u, const GridFunction& v) {
  double nu = norm(u), nv = norm(v);
  if (nu < 1e-12 || nv < 1e-12) throw degenerate_input_error("cofe_residual: zero-norm input");
  GridFunction Tu = T.forward(u), Tv = T.forward(v);
  GridFunction TPu = T.forward(P.apply(u));
  GridFunction pTu = multiply(symbol_field(p, T.grid()), Tu);
  cplx lhs = inner_product(TPu, Tv);
  cplx rhs = inner_product(pTu, Tv);
  return std::abs(lhs - rhs) / (nu * nv);
}

// ||T P u - p T u|| / ||u||
inline double sjostrand_residual(const FbiOperator& T, const QuantizedOperator& P, const Symbol& p,
                                 const GridFunction& u) {
  double nu = norm(u);
  if (nu < 1e-12) throw degenerate_input_error("sjostrand_residual: zero-norm input");
  GridFunction TPu = T.forward(P.apply(u));
  GridFunction pTu = multiply(symbol_field(p, T.grid()), T.forward(u));
  for (std::size_t a = 0; a < TPu.size(); ++a) TPu.v[a] -= pTu.v[a];
  return norm(TPu) / nu;
}

// |<T P u, T v>_phi - <p_phi T u, T v>_phi| / (||Tu||_phi ||Tv||_phi).
// phi == nullptr delegates to cofe_residual (the weightless code path).
// set deform = false for the control run that keeps the undeformed symbol.
inline double t2_residual(const FbiOperator& T, const QuantizedOperator& P, const Symbol& p,
                          const Weight* phi, const GridFunction& u, const GridFunction& v,
                          double eps0 = 0.1, bool deform = true) {
  if (phi == nullptr) return cofe_residual(T, P, p, u, v);
  const PhaseSpaceGrid& g = T.grid();
  require_small_weight(*phi, g, eps0);
  std::vector<double> wf = weight_field(*phi, g);
  GridFunction Tu = T.forward(u), Tv = T.forward(v);
  GridFunction TPu = T.forward(P.apply(u));
  GridFunction field = deform ? deformed_symbol_field(p, *phi, g) : symbol_field(p, g);
  GridFunction pTu = multiply(field, Tu);
  double ntu = norm(Tu, &wf), ntv = norm(Tv, &wf);
  if (ntu < 1e-12 || ntv < 1e-12) throw degenerate_input_error("t2_residual: zero-norm input");
  cplx lhs = inner_product(TPu, Tv, &wf);
  cplx rhs = inner_product(pTu, Tv, &wf);
  return std::abs(lhs - rhs) / (ntu * ntv);
}

}  // namespace fbl
