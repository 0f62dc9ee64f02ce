#include <catch2/catch_amalgamated.hpp>

#include "fbl/family.hpp"
#include "fbl/fbi.hpp"

using namespace fbl;

namespace {

PhaseSpaceGrid make_grid(double h, int points = 0, bool full_band = true) {
  GridSpec s = experiment_grid_spec(h, 6.0, 0.2, full_band);
  s.points = points;
  if (points) s.points_xi = std::max(8, static_cast<int>(points * s.half_width_xi / 6.0) + 1);
  return PhaseSpaceGrid(s);
}

}  // namespace

TEST_CASE("normalization constant matches the fine-grid calibration") {
  // enforce ||Tu|| = ||u|| for the standard Gaussian at h = 0.1 and solve for c
  PhaseSpaceGrid g = make_grid(0.1);
  FbiOperator T(g);
  GridFunction u = hermite_state(g, 0);
  GridFunction F = T.forward(u);
  double ratio = norm(F) / norm(u);
  double c_cal = T.normalization() / ratio;
  REQUIRE_THAT(c_cal, Catch::Matchers::WithinRel(std::pow(2.0, -0.5) * std::pow(PI, -0.75), 1e-6));
}

TEST_CASE("fbi_forward: zero input, Gaussian closed form, isometry") {
  PhaseSpaceGrid g = make_grid(0.1);
  FbiOperator T(g);

  SECTION("u = 0 maps to 0") {
    GridFunction u(g, Tag::base);
    GridFunction F = T.forward(u);
    for (auto& z : F.v) REQUIRE(z == cplx{0, 0});
  }

  SECTION("|Tu| for the standard Gaussian matches (2 pi h)^{-1/2} e^{-(x^2+xi^2)/(4h)}") {
    double h = g.h();
    GridFunction u = hermite_state(g, 0);
    GridFunction F = T.forward(u);
    int N = g.points_per_axis();
    double c_expected = std::pow(2 * PI * h, -0.5);
    for (std::size_t a = 0; a < g.phase_count(); a += 137) {
      double x, xi;
      g.phase_point(a, &x, &xi);
      double want = c_expected * std::exp(-(x * x + xi * xi) / (4 * h));
      REQUIRE_THAT(std::abs(F.v[a]), Catch::Matchers::WithinAbs(want, 1e-8));
    }
  }

  SECTION("isometry on a random band-limited function") {
    Rng rng(42);
    GridFunction u = random_band_limited(g, rng);
    GridFunction F = T.forward(u);
    REQUIRE_THAT(norm(F), Catch::Matchers::WithinRel(norm(u), 1e-6));
  }

  SECTION("isometry across the Hermite family at h in {0.1, 0.05}") {
    for (double h : {0.1, 0.05}) {
      PhaseSpaceGrid gh = make_grid(h);
      FbiOperator Th(gh);
      for (int k = 0; k <= 4; ++k) {
        GridFunction u = hermite_state(gh, k);
        double defect = std::abs(norm(Th.forward(u)) - norm(u)) / norm(u);
        REQUIRE(defect < 1e-6);
      }
    }
  }
}

TEST_CASE("fbi_adjoint: T*T = I on the family and the discrete adjoint identity") {
  PhaseSpaceGrid g = make_grid(0.1);
  FbiOperator T(g);

  SECTION("T*T u = u on the Gaussian family") {
    for (int k : {0, 2, 4}) {
      GridFunction u = hermite_state(g, k);
      GridFunction v = T.adjoint(T.forward(u));
      double num = 0, den = 0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        num += std::norm(v.v[j] - u.v[j]) * g.base_weight(j);
        den += std::norm(u.v[j]) * g.base_weight(j);
      }
      REQUIRE(std::sqrt(num / den) < 1e-6);
    }
  }

  SECTION("<Tu, F> = <u, T*F> to round-off on random pairs") {
    Rng rng(9);
    GridFunction u = random_band_limited(g, rng);
    GridFunction F = random_phase_vector(g, rng);
    cplx lhs = inner_product(T.forward(u), F);
    cplx rhs = inner_product(u, T.adjoint(F));
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
  }

  SECTION("T*F equals T* Pi0 F for F outside the range") {
    Rng rng(17);
    GridFunction F = random_phase_vector(g, rng);
    GridFunction a = T.adjoint(F);
    GridFunction b = T.adjoint(T.pi0(F));
    double num = 0, den = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      num += std::norm(a.v[j] - b.v[j]) * g.base_weight(j);
      den += std::norm(a.v[j]) * g.base_weight(j);
    }
    REQUIRE(std::sqrt(num / den) < 1e-6);
  }
}

TEST_CASE("pi0: projector identities and kernel quadrature") {
  PhaseSpaceGrid g = make_grid(0.1);
  FbiOperator T(g);

  SECTION("Pi0(Tu) = Tu") {
    Rng rng(23);
    GridFunction u = random_band_limited(g, rng);
    GridFunction F = T.forward(u);
    GridFunction PF = T.pi0(F);
    double num = 0, den = 0;
    for (std::size_t a = 0; a < F.size(); ++a) {
      num += std::norm(PF.v[a] - F.v[a]) * g.phase_weight(a);
      den += std::norm(F.v[a]) * g.phase_weight(a);
    }
    REQUIRE(std::sqrt(num / den) < 1e-6);
  }

  SECTION("Pi0^2 = Pi0 and Pi0 = Pi0* on random vectors") {
    Rng rng(31);
    double worst_idem = 0, worst_sa = 0;
    for (int t = 0; t < 32; ++t) {
      GridFunction F = random_phase_vector(g, rng);
      GridFunction P1 = T.pi0(F);
      GridFunction P2 = T.pi0(P1);
      double num = 0;
      for (std::size_t a = 0; a < F.size(); ++a)
        num += std::norm(P2.v[a] - P1.v[a]) * g.phase_weight(a);
      worst_idem = std::max(worst_idem, std::sqrt(num));
      GridFunction G = random_phase_vector(g, rng);
      cplx d = inner_product(P1, G) - inner_product(F, T.pi0(G));
      worst_sa = std::max(worst_sa, std::abs(d));
    }
    REQUIRE(worst_idem < 1e-6);
    REQUIRE(worst_sa < 1e-6);
  }

  SECTION("TT*F matches the psi0 kernel quadrature, c0 matched at one point") {
    Rng rng(5);
    GridFunction u = random_band_limited(g, rng);
    GridFunction F = T.forward(u);
    GridFunction PF = T.pi0(F);
    int Nx = g.points_x(), Nxi = g.points_xi();
    std::vector<std::size_t> rows;
    for (int t = 0; t < 60; ++t) {
      int i = Nx / 4 + (t * 13) % (Nx / 2);
      int k = Nxi / 4 + (t * 29) % (Nxi / 2);
      rows.push_back(static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * Nx);
    }
    auto vals = T.pi0_kernel_rows(F, rows, 1.0);  // unnormalized
    // match c0 at the first sampled point, then cross-check the rest
    cplx c0_est = PF.v[rows[0]] / vals[0];
    REQUIRE_THAT(c0_est.real(), Catch::Matchers::WithinRel(1.0 / (2 * PI), 1e-3));
    REQUIRE(std::abs(c0_est.imag()) < 1e-6);
    double scale = norm(F);
    for (std::size_t r = 0; r < rows.size(); ++r)
      REQUIRE(std::abs(c0_est * vals[r] - PF.v[rows[r]]) < 1e-4 * scale);
  }
}

TEST_CASE("zj annihilation") {
  PhaseSpaceGrid g = make_grid(0.1);
  FbiOperator T(g);
  double h = g.h();

  SECTION("residual on Tu is discretization-limited and refines at order >= 2") {
    GridFunction u = hermite_state(g, 1);
    double r1 = T.zj_residual(T.forward(u));
    PhaseSpaceGrid g2 = make_grid(0.1, 2 * g.points_per_axis());
    FbiOperator T2(g2);
    GridFunction u2 = hermite_state(g2, 1);
    double r2 = T2.zj_residual(T2.forward(u2));
    REQUIRE(r1 < 5e-3);
    REQUIRE(r2 <= r1 / 4.0 * 1.25);  // order >= 2 with 25% slack
  }

  SECTION("exact-factorization states have discretization-level residuals") {
    // F = (polynomial in z) e^{-z^2/(4h)} e^{-xi^2/(2h)}: annihilated by Z
    // in the continuum, so only differencing error remains
    GridFunction F(g, Tag::phase);
    for (std::size_t a = 0; a < g.phase_count(); ++a) {
      double x, xi;
      g.phase_point(a, &x, &xi);
      cplx z{x, -xi};
      F.v[a] = (1.0 + z + 0.3 * z * z) * std::exp(-z * z / (4 * h)) *
               std::exp(-xi * xi / (2 * h));
    }
    REQUIRE(T.zj_residual(F) < 5e-3);
  }

  SECTION("anti-holomorphic contamination is bounded below") {
    // F = conj(z) e^{-|z|^2/(4h)}: Z F = -2ih * envelope, a fixed positive fraction
    auto mk = [&](const PhaseSpaceGrid& gr) {
      GridFunction F(gr, Tag::phase);
      for (std::size_t a = 0; a < gr.phase_count(); ++a) {
        double x, xi;
        gr.phase_point(a, &x, &xi);
        cplx zb{x, xi};
        F.v[a] = zb * std::exp(-(x * x + xi * xi) / (4 * gr.h()));
      }
      return F;
    };
    FbiOperator T1(g);
    double r1 = T1.zj_residual(mk(g));
    PhaseSpaceGrid g2 = make_grid(0.1, 2 * g.points_per_axis());
    FbiOperator T2(g2);
    double r2 = T2.zj_residual(mk(g2));
    // oracle: |ZF|/|F| = 2h ||e|| / ||zbar e||, analytic differentiation
    REQUIRE(r1 > 0.05);
    REQUIRE(r2 > 0.05);
    REQUIRE(std::abs(r1 - r2) < 0.1 * r1);  // stable under refinement: genuine obstruction
  }

  SECTION("zero input is rejected") {
    GridFunction F(g, Tag::phase);
    REQUIRE_THROWS_AS(T.zj_residual(F), degenerate_input_error);
  }
}

TEST_CASE("phase identity: -Im psi0 + |a-b|^2/4 = 0 exactly") {
  Pi0Kernel pk(0.07);
  Rng rng(77);
  for (int t = 0; t < 100000; ++t) {
    double x = 6 * (rng.uniform() - 0.5), xi = 6 * (rng.uniform() - 0.5);
    double xp = 6 * (rng.uniform() - 0.5), xip = 6 * (rng.uniform() - 0.5);
    double im = pk.psi0(x, xi, xp, xip).imag();
    double want = 0.25 * ((x - xp) * (x - xp) + (xi - xip) * (xi - xip));
    REQUIRE(im == want);
  }
}

TEST_CASE("psi0 derivative conditions at the diagonal (finite differences)") {
  Pi0Kernel pk(0.1);
  double x = 0.4, xi = -0.7;
  auto f_alpha_x = [&](double t) { return pk.psi0(t, xi, x, xi); };
  auto f_alpha_xi = [&](double t) { return pk.psi0(x, t, x, xi); };
  auto f_beta_x = [&](double t) { return pk.psi0(x, xi, t, xi); };
  auto f_beta_xi = [&](double t) { return pk.psi0(x, xi, x, t); };
  REQUIRE(std::abs(fd_d1_c(f_alpha_x, x) - xi) < 1e-9);
  REQUIRE(std::abs(fd_d1_c(f_alpha_xi, xi)) < 1e-9);
  REQUIRE(std::abs(fd_d1_c(f_beta_x, x) + xi) < 1e-9);
  REQUIRE(std::abs(fd_d1_c(f_beta_xi, xi)) < 1e-9);
  REQUIRE(std::abs(pk.psi0(x, xi, x, xi)) == 0.0);
}

TEST_CASE("fbi rejects n = 2 grids and mismatched functions") {
  GridSpec s;
  s.dim = 2;
  s.h = 0.8;
  s.points = 40;
  s.kappa = 0.25;
  s.half_width_x = 4.0;
  s.validate_tails = false;
  PhaseSpaceGrid g2(s);
  REQUIRE_THROWS_AS(FbiOperator(g2), capability_error);

  PhaseSpaceGrid g = make_grid(0.1);
  PhaseSpaceGrid gb = make_grid(0.05);
  FbiOperator T(g);
  GridFunction u(gb, Tag::base);
  REQUIRE_THROWS_AS(T.forward(u), structural_error);
}
