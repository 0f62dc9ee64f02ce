#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "fbl/common.hpp"

namespace fbl {

// ---------------------------------------------------------------------------
// Jet: truncated multivariate power series with complex coefficients about a
// complex expansion point.  All arithmetic is closed under the truncation
// order: coefficients beyond |alpha| <= K are never formed or consulted.
// ---------------------------------------------------------------------------

namespace detail {

struct JetTable {
  int m, K;
  std::vector<std::vector<int>> expo;      // graded multi-indices, |alpha| <= K
  std::vector<int> degree;                 // |alpha| per entry
  std::vector<int> lut;                    // mixed-radix (K+1)^m -> entry or -1
  std::vector<std::vector<int>> prod;      // prod[i][j] = entry of expo_i+expo_j or -1

  int lookup(const std::vector<int>& a) const {
    std::size_t key = 0;
    for (int i = m - 1; i >= 0; --i) {
      if (a[i] < 0 || a[i] > K) return -1;
      key = key * (K + 1) + a[i];
    }
    return lut[key];
  }
};

inline const JetTable* jet_table(int m, int K) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({m, K});
  if (it != cache.end()) return it->second.get();

  auto t = std::make_unique<JetTable>();
  t->m = m;
  t->K = K;
  std::vector<int> a(m, 0);
  // enumerate by total degree
  for (int d = 0; d <= K; ++d) {
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == m - 1) {
        a[pos] = left;
        t->expo.push_back(a);
        t->degree.push_back(d);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, d);
  }
  std::size_t lut_size = 1;
  for (int i = 0; i < m; ++i) lut_size *= (K + 1);
  t->lut.assign(lut_size, -1);
  for (std::size_t e = 0; e < t->expo.size(); ++e) {
    std::size_t key = 0;
    for (int i = m - 1; i >= 0; --i) key = key * (K + 1) + t->expo[e][i];
    t->lut[key] = static_cast<int>(e);
  }
  std::size_t T = t->expo.size();
  t->prod.assign(T, std::vector<int>(T, -1));
  std::vector<int> s(m);
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j) {
      if (t->degree[i] + t->degree[j] > K) continue;
      for (int v = 0; v < m; ++v) s[v] = t->expo[i][v] + t->expo[j][v];
      t->prod[i][j] = t->lookup(s);
    }
  const JetTable* raw = t.get();
  cache[{m, K}] = std::move(t);
  return raw;
}

}  // namespace detail

class Jet {
 public:
  Jet() = default;
  Jet(int m, int K, std::vector<cplx> x0)
      : tab_(detail::jet_table(m, K)), x0_(std::move(x0)), c_(tab_->expo.size(), cplx{0, 0}) {
    if (static_cast<int>(x0_.size()) != m) throw structural_error("jet: expansion point size");
  }

  static Jet constant(int m, int K, std::vector<cplx> x0, cplx value) {
    Jet j(m, K, std::move(x0));
    j.c_[0] = value;
    return j;
  }
  // the coordinate function x_axis as a jet
  static Jet coordinate(int m, int K, std::vector<cplx> x0, int axis) {
    Jet j(m, K, x0);
    j.c_[0] = x0[axis];
    std::vector<int> e(m, 0);
    e[axis] = 1;
    j.c_[j.tab_->lookup(e)] = 1.0;
    return j;
  }

  int vars() const { return tab_->m; }
  int order() const { return tab_->K; }
  const std::vector<cplx>& point() const { return x0_; }
  std::size_t terms() const { return c_.size(); }

  cplx coeff(const std::vector<int>& alpha) const {
    int i = tab_->lookup(alpha);
    if (i < 0) throw structural_error("jet: multi-index outside truncation");
    return c_[i];
  }
  void set_coeff(const std::vector<int>& alpha, cplx v) {
    int i = tab_->lookup(alpha);
    if (i < 0) throw structural_error("jet: multi-index outside truncation");
    c_[i] = v;
  }
  cplx& raw(std::size_t i) { return c_[i]; }
  const cplx& raw(std::size_t i) const { return c_[i]; }
  const std::vector<int>& exponent(std::size_t i) const { return tab_->expo[i]; }
  int degree_of(std::size_t i) const { return tab_->degree[i]; }

  cplx value() const { return c_[0]; }  // evaluation at the expansion point

  cplx eval(std::span<const cplx> p) const {
    if (static_cast<int>(p.size()) != vars()) throw structural_error("jet: eval arity");
    int m = vars();
    std::vector<cplx> d(m);
    for (int i = 0; i < m; ++i) d[i] = p[i] - x0_[i];
    // powers per axis
    std::vector<std::vector<cplx>> pw(m, std::vector<cplx>(order() + 1, cplx{1, 0}));
    for (int i = 0; i < m; ++i)
      for (int k = 1; k <= order(); ++k) pw[i][k] = pw[i][k - 1] * d[i];
    std::vector<cplx> terms(c_.size());
    for (std::size_t e = 0; e < c_.size(); ++e) {
      cplx t = c_[e];
      for (int i = 0; i < m; ++i) t *= pw[i][tab_->expo[e][i]];
      terms[e] = t;
    }
    return pairwise_sum(terms);
  }
  cplx eval(std::initializer_list<cplx> p) const { return eval(std::span<const cplx>(p.begin(), p.size())); }

  Jet& operator+=(const Jet& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }

  void require_compatible(const Jet& o) const {
    if (tab_ != o.tab_) throw structural_error("jet: incompatible variable count or order");
    for (std::size_t i = 0; i < x0_.size(); ++i)
      if (x0_[i] != o.x0_[i]) throw structural_error("jet: expansion points differ");
  }

  const detail::JetTable* table() const { return tab_; }

 private:
  const detail::JetTable* tab_ = nullptr;
  std::vector<cplx> x0_;
  std::vector<cplx> c_;
};

// truncated Cauchy product
inline Jet jet_mul(const Jet& a, const Jet& b) {
  a.require_compatible(b);
  Jet r(a.vars(), a.order(), a.point());
  const auto* t = a.table();
  std::size_t T = a.terms();
  for (std::size_t i = 0; i < T; ++i) {
    if (a.raw(i) == cplx{0, 0}) continue;
    for (std::size_t j = 0; j < T; ++j) {
      int k = t->prod[i][j];
      if (k < 0) continue;
      r.raw(k) += a.raw(i) * b.raw(j);
    }
  }
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }

// d/dx_axis, result truncated at order K-1 (the honest order of the derivative)
inline Jet jet_derivative(const Jet& a, int axis) {
  if (a.order() == 0) throw capability_error("jet: derivative of an order-0 jet");
  Jet r(a.vars(), a.order() - 1, a.point());
  const auto* tr = r.table();
  std::vector<int> e(a.vars());
  for (std::size_t i = 0; i < r.terms(); ++i) {
    e = tr->expo[i];
    e[axis] += 1;
    r.raw(i) = a.coeff(e) * static_cast<double>(e[axis]);
  }
  return r;
}

// antiderivative in the single variable, vanishing at the expansion point
inline Jet jet_integrate_1var(const Jet& a) {
  if (a.vars() != 1) throw structural_error("jet: integrate expects one variable");
  Jet r(1, a.order() + 1, a.point());
  for (std::size_t i = 0; i < a.terms(); ++i) {
    int d = a.degree_of(i);
    std::vector<int> e{d + 1};
    r.set_coeff(e, a.raw(i) / static_cast<double>(d + 1));
  }
  return r;
}

inline Jet jet_truncate(const Jet& a, int K) {
  if (K > a.order()) throw capability_error("jet: cannot extend truncation order");
  Jet r(a.vars(), K, a.point());
  for (std::size_t i = 0; i < r.terms(); ++i) r.raw(i) = a.coeff(r.exponent(i));
  return r;
}

// f(g_1,...,g_q): f has q variables; inner jets share variables/order/point
// and their constant terms must equal f's expansion point.
inline Jet jet_compose(const Jet& f, const std::vector<Jet>& g) {
  if (static_cast<int>(g.size()) != f.vars())
    throw structural_error("jet_compose: inner jet count != outer arity");
  for (std::size_t i = 1; i < g.size(); ++i) g[0].require_compatible(g[i]);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i].value() - f.point()[i]) > 1e-12)
      throw domain_error("jet_compose: inner jet constant term does not match outer expansion point");
  int m = g[0].vars(), K = g[0].order();
  // deltas with zero constant term
  std::vector<Jet> d;
  d.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Jet di = g[i];
    di.raw(0) -= f.point()[i];
    d.push_back(std::move(di));
  }
  // cached powers d_i^k
  std::vector<std::vector<Jet>> pw(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    pw[i].push_back(Jet::constant(m, K, g[0].point(), 1.0));
    for (int k = 1; k <= f.order(); ++k) pw[i].push_back(jet_mul(pw[i].back(), d[i]));
  }
  Jet r(m, K, g[0].point());
  for (std::size_t e = 0; e < f.terms(); ++e) {
    cplx cf = f.raw(e);
    if (cf == cplx{0, 0}) continue;
    Jet term = Jet::constant(m, K, g[0].point(), cf);
    for (int i = 0; i < f.vars(); ++i) {
      int p = f.exponent(e)[i];
      if (p > 0) term = jet_mul(term, pw[i][p]);
    }
    r += term;
  }
  return r;
}

// exp of a jet
inline Jet jet_exp(const Jet& a) {
  cplx a0 = a.value();
  Jet u = a;
  u.raw(0) = 0.0;
  Jet r = Jet::constant(a.vars(), a.order(), a.point(), 1.0);
  Jet pw = r;
  double fact = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    pw = jet_mul(pw, u);
    fact *= k;
    r += pw * cplx{1.0 / fact, 0.0};
  }
  return r * std::exp(a0);
}

// 1/u, requires u(x0) != 0
inline Jet jet_reciprocal(const Jet& a) {
  cplx a0 = a.value();
  if (std::abs(a0) < 1e-300) throw degenerate_input_error("jet: reciprocal of vanishing constant term");
  Jet v = a;  // v = a/a0 - 1, zero constant term
  for (std::size_t i = 0; i < v.terms(); ++i) v.raw(i) /= a0;
  v.raw(0) = 0.0;
  Jet r = Jet::constant(a.vars(), a.order(), a.point(), 1.0);
  Jet pw = r;
  double sign = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    pw = jet_mul(pw, v);
    sign = -sign;
    r += pw * cplx{sign, 0.0};
  }
  for (std::size_t i = 0; i < r.terms(); ++i) r.raw(i) /= a0;
  return r;
}

// ---------------------------------------------------------------------------
// aa_extend: finite-order almost-analytic extension.  Given the Taylor jet of
// a smooth f(x, xi) about a real point mu, produce g(z, w) in the doubled
// holomorphic variables, z = x - i xi, with g(z, zbar) = f and
// d_w g|_{w = zbar} = d_zbar f through the jet order.
// ---------------------------------------------------------------------------

inline Jet aa_extend(const Jet& f_taylor, double mu_x, double mu_xi) {
  if (f_taylor.vars() != 2) throw structural_error("aa_extend: expects a 2-variable jet in (x, xi)");
  if (std::abs(f_taylor.point()[0] - mu_x) > 1e-12 || std::abs(f_taylor.point()[1] - mu_xi) > 1e-12)
    throw structural_error("aa_extend: Taylor jet is not centered at the requested real point");
  int K = f_taylor.order();
  cplx muz{mu_x, -mu_xi};
  cplx muzb{mu_x, mu_xi};
  std::vector<cplx> pt{muz, muzb};
  // x = mu_x + (dz + dw)/2 ; xi = mu_xi + i (dz - dw)/2
  Jet zc = Jet::coordinate(2, K, pt, 0);
  Jet wc = Jet::coordinate(2, K, pt, 1);
  Jet dz = zc;
  dz.raw(0) -= muz;
  Jet dw = wc;
  dw.raw(0) -= muzb;
  Jet gx = (dz + dw) * cplx{0.5, 0.0};
  gx.raw(0) += mu_x;
  Jet gxi = (dz - dw) * (I * 0.5);
  gxi.raw(0) += mu_xi;
  return jet_compose(f_taylor, {gx, gxi});
}

// ---------------------------------------------------------------------------
// Finite-difference Taylor jet of a callable (4th-order stencils, default
// step 1e-4 per axis).  Practical through order 3; beyond that rounding wins
// and a capability error is raised.
// ---------------------------------------------------------------------------

template <class F>  // F: (const double* x) -> double or cplx
Jet jet_from_fd(const F& f, std::vector<double> mu, int K, double step = 1e-4) {
  int m = static_cast<int>(mu.size());
  if (K > 3) throw capability_error("jet_from_fd: finite differences support order <= 3");
  std::vector<cplx> pt(mu.begin(), mu.end());
  Jet j(m, K, pt);
  // 1D 4th-order stencils for derivative order 0..3
  static const std::vector<std::vector<std::pair<int, double>>> stencil = {
      {{0, 1.0}},
      {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}},
      {{-2, -1.0 / 12}, {-1, 16.0 / 12}, {0, -30.0 / 12}, {1, 16.0 / 12}, {2, -1.0 / 12}},
      {{-3, 1.0 / 8}, {-2, -1.0}, {-1, 13.0 / 8}, {1, -13.0 / 8}, {2, 1.0}, {3, -1.0 / 8}}};
  std::vector<double> x(m);
  std::vector<int> off(m, 0);
  for (std::size_t e = 0; e < j.terms(); ++e) {
    const auto& alpha = j.exponent(e);
    // tensor product of 1D stencils
    cplx acc = 0.0;
    std::function<void(int, double, std::vector<double>&)> rec = [&](int axis, double w,
                                                                     std::vector<double>& pos) {
      if (axis == m) {
        acc += w * cplx(f(pos.data()));
        return;
      }
      int d = alpha[axis];
      double hstep = (d >= 3) ? step * 20 : (d == 2 ? step * 10 : step);
      for (auto& [o, c] : stencil[d]) {
        double save = pos[axis];
        pos[axis] = mu[axis] + o * hstep;
        rec(axis + 1, w * c / std::pow(hstep, d), pos);
        pos[axis] = save;
      }
    };
    std::vector<double> pos(mu);
    rec(0, 1.0, pos);
    double fact = 1.0;
    for (int i = 0; i < m; ++i)
      for (int k = 2; k <= alpha[i]; ++k) fact *= k;
    j.raw(e) = acc / fact;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Linear first-order jet ODE in one variable: v y' + b y = f, y(x0) = y0.
// Solvable iff v(x0) != 0; coefficients determined order by order.
// ---------------------------------------------------------------------------

inline Jet jet_ode_solve(const Jet& v, const Jet& b, const Jet& f, cplx y0) {
  if (v.vars() != 1) throw structural_error("jet_ode_solve: one variable expected");
  v.require_compatible(b);
  v.require_compatible(f);
  int K = v.order();
  cplx v0 = v.raw(0);
  if (std::abs(v0) < 1e-12)
    throw degenerate_input_error("jet_ode_solve: vector field coefficient vanishes at the base point");
  std::vector<cplx> y(K + 1, 0.0);
  y[0] = y0;
  for (int k = 0; k + 1 <= K; ++k) {
    // coefficient k of v*y' + b*y = f
    cplx rhs = f.raw(k);
    for (int i = 0; i <= k; ++i) rhs -= b.raw(i) * y[k - i];
    for (int i = 1; i <= k; ++i) rhs -= v.raw(i) * static_cast<double>(k - i + 1) * y[k - i + 1];
    y[k + 1] = rhs / (v0 * static_cast<double>(k + 1));
  }
  Jet r(1, K, v.point());
  for (int k = 0; k <= K; ++k) r.set_coeff({k}, y[k]);
  return r;
}

}  // namespace fbl
