#pragma once

#include <optional>

#include "fbl/common.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// PhaseSpaceGrid: uniform tensor grid on [-Lx,Lx]^n (base space) and
// [-Lx,Lx]^n x [-Lxi,Lxi]^n (phase space) with trapezoid weights.  The two
// axis families carry independent point counts.
//
// Resolution rule: dx <= kappa*sqrt(h), kappa <= 1/4 (coherent states have
// width sqrt(h); the default kappa = 1/5 keeps five nodes per width).
//
// Aliasing: a uniform y-grid periodizes momentum at 2*pi*h/dx.  The first
// ghost must clear the momentum box, which bounds Lxi from above; the helpers
// below pick the largest safe Lxi for a given h.
// ---------------------------------------------------------------------------

struct GridSpec {
  int dim = 1;                 // n, 1 or 2
  double half_width_x = 6.0;   // Lx
  double half_width_xi = 6.0;  // Lxi
  int points = 0;              // N for the base axes; 0 = derive from the kappa rule
  int points_xi = 0;           // N for the momentum axes; 0 = derive
  double h = 0.1;
  double kappa = 0.2;
  bool validate_tails = true;  // check the built-in Gaussian family fits the box
};

// largest momentum half-width such that the first quadrature ghost clears the
// box: full_band guards arbitrary phase-space data, the default guards the
// sqrt(h)-band-limited test family
inline double safe_momentum_halfwidth(double h, double kappa = 0.2, bool full_band = false) {
  double spacing = 2.0 * PI * h / (kappa * std::sqrt(h));  // = 2 pi sqrt(h) / kappa
  return (full_band ? 0.45 : 0.55) * spacing;
}

inline GridSpec experiment_grid_spec(double h, double Lx = 6.0, double kappa = 0.2,
                                     bool full_band = false) {
  GridSpec s;
  s.h = h;
  s.kappa = kappa;
  s.half_width_x = Lx;
  s.half_width_xi = std::min(Lx, safe_momentum_halfwidth(h, kappa, full_band));
  return s;
}

class PhaseSpaceGrid {
 public:
  explicit PhaseSpaceGrid(const GridSpec& spec) : n_(spec.dim), h_(spec.h) {
    if (n_ != 1 && n_ != 2) throw config_error("grid: dim must be 1 or 2");
    if (!(h_ > 0.0 && h_ <= 1.0)) throw config_error("grid: need 0 < h <= 1");
    if (spec.kappa > 0.25)
      throw config_error("grid: resolution factor kappa = " + std::to_string(spec.kappa) +
                         " exceeds 1/4");
    Lx_ = spec.half_width_x;
    Lxi_ = spec.half_width_xi;
    double max_dx = spec.kappa * std::sqrt(h_);
    Nx_ = spec.points ? spec.points : static_cast<int>(std::ceil(2.0 * Lx_ / max_dx)) + 1;
    Nxi_ = spec.points_xi ? spec.points_xi
                          : static_cast<int>(std::ceil(2.0 * Lxi_ / max_dx)) + 1;
    if (Nx_ < 8 || Nxi_ < 8) throw config_error("grid: N too small");
    dx_ = 2.0 * Lx_ / (Nx_ - 1);
    dxi_ = 2.0 * Lxi_ / (Nxi_ - 1);
    if (std::max(dx_, dxi_) > max_dx * (1.0 + 1e-12))
      throw config_error("grid: step " + std::to_string(std::max(dx_, dxi_)) +
                         " violates dx <= kappa*sqrt(h) = " + std::to_string(max_dx));
    if (spec.validate_tails) {
      // mass of exp(-y^2/(2h)) outside [-Lx,Lx], relative to the total
      double tail = std::erfc(Lx_ / std::sqrt(2.0 * h_));
      if (tail > 1e-10)
        throw config_error("grid: Gaussian family tail mass " + std::to_string(tail) +
                           " outside the box exceeds 1e-10; enlarge half_width_x");
    }
    x_nodes_.resize(Nx_);
    x_w_.resize(Nx_);
    for (int i = 0; i < Nx_; ++i) {
      x_nodes_[i] = -Lx_ + i * dx_;
      x_w_[i] = ((i == 0 || i == Nx_ - 1) ? 0.5 : 1.0) * dx_;
    }
    xi_nodes_.resize(Nxi_);
    xi_w_.resize(Nxi_);
    for (int i = 0; i < Nxi_; ++i) {
      xi_nodes_[i] = -Lxi_ + i * dxi_;
      xi_w_[i] = ((i == 0 || i == Nxi_ - 1) ? 0.5 : 1.0) * dxi_;
    }
  }

  int dim() const { return n_; }
  int points_per_axis() const { return Nx_; }
  int points_x() const { return Nx_; }
  int points_xi() const { return Nxi_; }
  double h() const { return h_; }
  double dx() const { return dx_; }
  double dxi() const { return dxi_; }
  double half_width_x() const { return Lx_; }
  double half_width_xi() const { return Lxi_; }

  std::size_t base_count() const { return ipow(Nx_, n_); }
  std::size_t phase_count() const { return ipow(Nx_, n_) * ipow(Nxi_, n_); }

  // base node i -> y coordinates
  void base_point(std::size_t i, double* y) const {
    for (int a = 0; a < n_; ++a) {
      y[a] = x_nodes_[i % Nx_];
      i /= Nx_;
    }
  }
  double base_weight(std::size_t i) const {
    double w = 1.0;
    for (int a = 0; a < n_; ++a) {
      w *= x_w_[i % Nx_];
      i /= Nx_;
    }
    return w;
  }
  // phase node a -> (x, xi) coordinates; layout: x axes first (radix Nx),
  // then xi axes (radix Nxi)
  void phase_point(std::size_t a, double* x, double* xi) const {
    for (int k = 0; k < n_; ++k) {
      x[k] = x_nodes_[a % Nx_];
      a /= Nx_;
    }
    for (int k = 0; k < n_; ++k) {
      xi[k] = xi_nodes_[a % Nxi_];
      a /= Nxi_;
    }
  }
  double phase_weight(std::size_t a) const {
    double w = 1.0;
    for (int k = 0; k < n_; ++k) {
      w *= x_w_[a % Nx_];
      a /= Nx_;
    }
    for (int k = 0; k < n_; ++k) {
      w *= xi_w_[a % Nxi_];
      a /= Nxi_;
    }
    return w;
  }

  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& xi_nodes() const { return xi_nodes_; }
  const std::vector<double>& x_weights() const { return x_w_; }
  const std::vector<double>& xi_weights() const { return xi_w_; }

  double base_volume() const { return ipowd(2.0 * Lx_, n_); }
  double phase_volume() const { return ipowd(2.0 * Lx_, n_) * ipowd(2.0 * Lxi_, n_); }

  // distance from the quadrature ghost to the band edge; positive = safe
  double momentum_headroom(double band) const { return 2.0 * PI * h_ / dx_ - Lxi_ - band; }

  bool operator==(const PhaseSpaceGrid& o) const {
    return n_ == o.n_ && Nx_ == o.Nx_ && Nxi_ == o.Nxi_ && h_ == o.h_ && Lx_ == o.Lx_ &&
           Lxi_ == o.Lxi_;
  }

 private:
  static std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
  }
  static double ipowd(double b, int e) {
    double r = 1;
    while (e-- > 0) r *= b;
    return r;
  }

  int n_;
  double h_, Lx_, Lxi_, dx_, dxi_;
  int Nx_, Nxi_;
  std::vector<double> x_nodes_, xi_nodes_, x_w_, xi_w_;
};

enum class Tag { base, phase };

struct GridFunction {
  const PhaseSpaceGrid* grid = nullptr;
  Tag tag = Tag::base;
  std::vector<cplx> v;

  GridFunction() = default;
  GridFunction(const PhaseSpaceGrid& g, Tag t)
      : grid(&g), tag(t), v(t == Tag::base ? g.base_count() : g.phase_count(), cplx{0.0, 0.0}) {}

  std::size_t size() const { return v.size(); }

  void check_finite() const {
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw domain_error("grid function has non-finite entries");
  }
};

inline void require_same_grid(const GridFunction& F, const GridFunction& G) {
  if (F.grid == nullptr || G.grid == nullptr || !(*F.grid == *G.grid) || F.tag != G.tag)
    throw structural_error("grid functions live on different grids or carry different tags");
}

// weight field w (positive, finite) is optional; absent = flat L^2
inline cplx inner_product(const GridFunction& F, const GridFunction& G,
                          const std::vector<double>* w = nullptr) {
  require_same_grid(F, G);
  if (w && w->size() != F.size()) throw structural_error("weight field size mismatch");
  const PhaseSpaceGrid& g = *F.grid;
  std::size_t m = F.size();
  std::vector<cplx> terms(m);
  for (std::size_t i = 0; i < m; ++i) {
    double wi = w ? (*w)[i] : 1.0;
    if (w && !(wi > 0.0 && std::isfinite(wi)))
      throw domain_error("inner_product: weight field not positive/finite at node " +
                         std::to_string(i));
    double qw = (F.tag == Tag::base) ? g.base_weight(i) : g.phase_weight(i);
    terms[i] = F.v[i] * std::conj(G.v[i]) * wi * qw;
  }
  return pairwise_sum(terms);
}

inline double norm(const GridFunction& F, const std::vector<double>* w = nullptr) {
  return std::sqrt(std::max(0.0, inner_product(F, F, w).real()));
}

// slope of log(residual) vs log(h); see common.hpp for the contract
inline SlopeFit slope_fit(std::span<const double> h, std::span<const double> r) {
  return fit_loglog(h, r);
}

inline SlopeFit slope_fit(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> h, r;
  h.reserve(pairs.size());
  r.reserve(pairs.size());
  for (auto& [hh, rr] : pairs) {
    h.push_back(hh);
    r.push_back(rr);
  }
  return fit_loglog(h, r);
}

}  // namespace fbl
