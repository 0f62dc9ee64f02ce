#include <catch2/catch_amalgamated.hpp>

#include "fbl/jets.hpp"

using namespace fbl;

namespace {

Jet poly1(int K, std::initializer_list<cplx> coeffs) {  // 1-var jet at 0
  Jet j(1, K, {cplx{0, 0}});
  int k = 0;
  for (cplx c : coeffs) j.set_coeff({k++}, c);
  return j;
}

}  // namespace

TEST_CASE("jet_mul: polynomial identity and unit") {
  Jet a = poly1(2, {1.0, 1.0});   // 1 + x
  Jet b = poly1(2, {1.0, -1.0});  // 1 - x
  Jet p = jet_mul(a, b);
  REQUIRE(std::abs(p.coeff({0}) - 1.0) < 1e-15);
  REQUIRE(std::abs(p.coeff({1})) < 1e-15);
  REQUIRE(std::abs(p.coeff({2}) + 1.0) < 1e-15);

  Jet one = Jet::constant(1, 2, {cplx{0, 0}}, 1.0);
  Jet q = jet_mul(a, one);
  for (std::size_t i = 0; i < q.terms(); ++i) REQUIRE(std::abs(q.raw(i) - a.raw(i)) < 1e-15);
}

TEST_CASE("jet_mul: exp(x) * exp(-x) = 1 to series accuracy") {
  int K = 6;
  Jet ex(1, K, {cplx{0, 0}}), emx(1, K, {cplx{0, 0}});
  double fact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= k;
    ex.set_coeff({k}, 1.0 / fact);
    emx.set_coeff({k}, (k % 2 ? -1.0 : 1.0) / fact);
  }
  Jet p = jet_mul(ex, emx);
  REQUIRE(std::abs(p.coeff({0}) - 1.0) < 1e-12);
  for (int k = 1; k <= K; ++k) REQUIRE(std::abs(p.coeff({k})) < 1e-12);
}

TEST_CASE("jet_mul: commutative, associative up to truncation") {
  Rng rng(3);
  int K = 5;
  Jet a(2, K, {cplx{0.3, 0}, cplx{-0.2, 0}});
  Jet b = a, c = a;
  for (std::size_t i = 0; i < a.terms(); ++i) {
    a.raw(i) = rng.cnormal();
    b.raw(i) = rng.cnormal();
    c.raw(i) = rng.cnormal();
  }
  Jet ab = jet_mul(a, b), ba = jet_mul(b, a);
  for (std::size_t i = 0; i < ab.terms(); ++i) REQUIRE(std::abs(ab.raw(i) - ba.raw(i)) < 1e-13);
  Jet l = jet_mul(jet_mul(a, b), c), r = jet_mul(a, jet_mul(b, c));
  for (std::size_t i = 0; i < l.terms(); ++i) REQUIRE(std::abs(l.raw(i) - r.raw(i)) < 1e-12);
}

TEST_CASE("incompatible jets are rejected") {
  Jet a(1, 3, {cplx{0, 0}}), b(1, 4, {cplx{0, 0}}), c(1, 3, {cplx{1, 0}});
  REQUIRE_THROWS_AS(jet_mul(a, b), structural_error);
  REQUIRE_THROWS_AS(jet_mul(a, c), structural_error);
}

TEST_CASE("jet_compose: hand expansion f(t)=t^2, g(x)=x+x^2") {
  Jet f(1, 3, {cplx{0, 0}});
  f.set_coeff({2}, 1.0);
  Jet g = poly1(3, {0.0, 1.0, 1.0});
  Jet r = jet_compose(f, {g});
  // (x + x^2)^2 = x^2 + 2x^3 + O(x^4)
  REQUIRE(std::abs(r.coeff({0})) < 1e-15);
  REQUIRE(std::abs(r.coeff({1})) < 1e-15);
  REQUIRE(std::abs(r.coeff({2}) - 1.0) < 1e-15);
  REQUIRE(std::abs(r.coeff({3}) - 2.0) < 1e-15);
}

TEST_CASE("jet_compose: f of identity is f") {
  Rng rng(11);
  Jet f(1, 5, {cplx{0.4, 0.1}});
  for (std::size_t i = 0; i < f.terms(); ++i) f.raw(i) = rng.cnormal();
  Jet id = Jet::coordinate(1, 5, {cplx{0.4, 0.1}}, 0);
  Jet r = jet_compose(f, {id});
  for (std::size_t i = 0; i < f.terms(); ++i) REQUIRE(std::abs(r.raw(i) - f.raw(i)) < 1e-13);
}

TEST_CASE("jet_compose: sin of arcsin jet is the identity to 1e-12") {
  int K = 7;
  // sin: 0,1,0,-1/6,0,1/120,0,-1/5040 ; arcsin: 0,1,0,1/6,0,3/40,0,15/336
  Jet s = poly1(K, {0.0, 1.0, 0.0, -1.0 / 6, 0.0, 1.0 / 120, 0.0, -1.0 / 5040});
  Jet as = poly1(K, {0.0, 1.0, 0.0, 1.0 / 6, 0.0, 3.0 / 40, 0.0, 15.0 / 336});
  Jet r = jet_compose(s, {as});
  REQUIRE(std::abs(r.coeff({1}) - 1.0) < 1e-12);
  for (int k : {0, 2, 3, 4, 5, 6, 7})
    REQUIRE(std::abs(r.coeff({k})) < 1e-12);
}

TEST_CASE("jet_compose: offset mismatch is a domain error") {
  Jet f(1, 3, {cplx{1.0, 0}});
  Jet g = poly1(3, {0.0, 1.0});  // constant term 0 != 1
  REQUIRE_THROWS_AS(jet_compose(f, {g}), domain_error);
}

TEST_CASE("Leibniz rule holds coefficient-wise up to order K-1") {
  Rng rng(5);
  Jet f(1, 6, {cplx{0, 0}}), g(1, 6, {cplx{0, 0}});
  for (std::size_t i = 0; i < f.terms(); ++i) {
    f.raw(i) = rng.cnormal();
    g.raw(i) = rng.cnormal();
  }
  Jet lhs = jet_derivative(jet_mul(f, g), 0);
  Jet rhs = jet_mul(jet_derivative(f, 0), jet_truncate(g, 5)) +
            jet_mul(jet_truncate(f, 5), jet_derivative(g, 0));
  for (std::size_t i = 0; i < lhs.terms(); ++i) REQUIRE(std::abs(lhs.raw(i) - rhs.raw(i)) < 1e-12);
}

TEST_CASE("aa_extend: polynomial in (x, xi) is extended exactly") {
  // q(x, xi) = 2 + x^2 - xi^2 + 3 x xi ; its (z, zbar) polynomial is unique
  int K = 3;
  double mx = 0.3, mxi = -0.5;
  Jet q(2, K, {cplx{mx, 0}, cplx{mxi, 0}});
  auto qv = [](double x, double xi) { return 2.0 + x * x - xi * xi + 3.0 * x * xi; };
  // Taylor at (mx, mxi)
  q.set_coeff({0, 0}, qv(mx, mxi));
  q.set_coeff({1, 0}, 2 * mx + 3 * mxi);
  q.set_coeff({0, 1}, -2 * mxi + 3 * mx);
  q.set_coeff({2, 0}, 1.0);
  q.set_coeff({0, 2}, -1.0);
  q.set_coeff({1, 1}, 3.0);
  Jet g = aa_extend(q, mx, mxi);
  // g(z, zbar) must reproduce q at sampled real points
  for (double x : {0.1, 0.45, -0.2})
    for (double xi : {-0.7, -0.4, 0.1}) {
      cplx z{x, -xi}, zb{x, xi};
      cplx got = g.eval({z, zb});
      REQUIRE(std::abs(got - qv(x, xi)) < 1e-12);
    }
  // and g is genuinely holomorphic in its two slots: sample complex args
  cplx z{0.2, 0.1}, w{0.5, -0.3};
  (void)g.eval({z, w});
}

TEST_CASE("aa_extend of a constant is that constant") {
  Jet c(2, 3, {cplx{0, 0}, cplx{0, 0}});
  c.set_coeff({0, 0}, cplx{2.5, 0});
  Jet g = aa_extend(c, 0, 0);
  REQUIRE(std::abs(g.value() - 2.5) < 1e-15);
  for (std::size_t i = 1; i < g.terms(); ++i) REQUIRE(std::abs(g.raw(i)) < 1e-15);
}

TEST_CASE("aa_extend: d_w g on the antidiagonal equals d_zbar f (FD oracle)") {
  // bump-like smooth f
  auto f = [](const double* p) {
    double s = (p[0] * p[0] + p[1] * p[1]) / 4.0;
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  };
  double mx = 0.4, mxi = 0.6;
  Jet tf = jet_from_fd(f, {mx, mxi}, 3);
  Jet g = aa_extend(tf, mx, mxi);
  Jet gw = jet_derivative(g, 1);
  cplx z{mx, -mxi}, zb{mx, mxi};
  cplx got = gw.eval({z, zb});
  // independent central differences of f for d_zbar f = (f_x - i f_xi)/2
  auto fx = [&](double x) {
    double p[2] = {x, mxi};
    return f(p);
  };
  auto fxi = [&](double xi) {
    double p[2] = {mx, xi};
    return f(p);
  };
  cplx want = 0.5 * (fd_d1(fx, mx) - I * fd_d1(fxi, mxi));
  REQUIRE(std::abs(got - want) < 1e-6);
}

TEST_CASE("aa_extend rejects orders beyond the available derivatives") {
  auto f = [](const double* p) { return p[0] * p[1]; };
  REQUIRE_THROWS_AS(jet_from_fd(f, {0.0, 0.0}, 4), capability_error);
}

TEST_CASE("jet_exp and jet_reciprocal") {
  Jet x = poly1(5, {0.5, 1.0});
  Jet e = jet_exp(x);
  // exp(0.5 + t): coefficients e^{0.5}/k!
  double fact = 1;
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) fact *= k;
    REQUIRE(std::abs(e.coeff({k}) - std::exp(0.5) / fact) < 1e-12);
  }
  Jet r = jet_reciprocal(x);
  Jet prod = jet_mul(r, x);
  REQUIRE(std::abs(prod.coeff({0}) - 1.0) < 1e-13);
  for (int k = 1; k <= 5; ++k) REQUIRE(std::abs(prod.coeff({k})) < 1e-13);
}

TEST_CASE("jet_ode_solve: v y' + b y = f matches a closed form") {
  // y' + y = 1, y(0) = 0  =>  y = 1 - e^{-t}
  int K = 8;
  Jet v = Jet::constant(1, K, {cplx{0, 0}}, 1.0);
  Jet b = Jet::constant(1, K, {cplx{0, 0}}, 1.0);
  Jet f = Jet::constant(1, K, {cplx{0, 0}}, 1.0);
  Jet y = jet_ode_solve(v, b, f, 0.0);
  double fact = 1;
  for (int k = 1; k <= K; ++k) {
    fact *= k;
    double want = (k % 2 ? 1.0 : -1.0) / fact;  // -(-1)^k/k!
    REQUIRE(std::abs(y.coeff({k}) - want) < 1e-12);
  }
  Jet vz = Jet::constant(1, K, {cplx{0, 0}}, 0.0);
  REQUIRE_THROWS_AS(jet_ode_solve(vz, b, f, 0.0), degenerate_input_error);
}
