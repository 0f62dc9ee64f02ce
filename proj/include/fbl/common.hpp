#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fbl {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors.  Each class corresponds to a contract failure mode; messages name
// the offending quantity so harness reports stay actionable.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct structural_error : error {  // incompatible grids/jets/operands
  using error::error;
};
struct domain_error : error {  // value outside the declared domain (strip, weight, ...)
  using error::error;
};
struct degenerate_input_error : error {
  using error::error;
};
struct precondition_error : error {  // gate failures (smallness, resolution, ...)
  using error::error;
};
struct capability_error : error {  // asked for more than the object can provide
  using error::error;
};
struct config_error : error {
  using error::error;
};
struct hypothesis_error : error {  // mathematical hypothesis violated (e.g. bracket sign)
  using error::error;
};

// ---------------------------------------------------------------------------
// Deterministic reductions.  Pairwise (tree) summation: the result does not
// depend on thread count and carries O(log n) rounding growth.
// ---------------------------------------------------------------------------

template <class T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t m = n / 2;
  return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

// ---------------------------------------------------------------------------
// parallel_for: block-partitioned loop.  Writers own disjoint index ranges so
// results are bit-identical for any job count.
// ---------------------------------------------------------------------------

inline unsigned default_jobs() {
  if (const char* env = std::getenv("FBL_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return static_cast<unsigned>(j);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         unsigned jobs = 0) {
  if (jobs == 0) jobs = default_jobs();
  if (n == 0) return;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  std::size_t chunk = (n + jobs - 1) / jobs;
  for (unsigned t = 0; t < jobs; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Reproducible RNG.  mt19937_64 + explicit Box-Muller so streams are fully
// specified by the seed (std::normal_distribution is implementation-defined).
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  void reseed(std::uint64_t seed) {
    gen_.seed(seed);
    have_spare_ = false;
  }
  double uniform() {  // [0,1)
    return (gen_() >> 11) * 0x1.0p-53;
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0, u2;
    while (u1 == 0.0) u1 = uniform();
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * PI * u2);
  }
  cplx cnormal() {
    double re = normal(), im = normal();
    return {re, im};
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Least-squares slope of log(residual) vs log(h).
// ---------------------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double r2 = 0.0;
  double intercept = 0.0;
};

inline SlopeFit fit_loglog(std::span<const double> h, std::span<const double> r) {
  if (h.size() != r.size()) throw structural_error("slope_fit: length mismatch");
  if (h.size() < 4) throw degenerate_input_error("slope_fit: need at least 4 (h, residual) pairs");
  std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r[i] > 0.0))
      throw degenerate_input_error("slope_fit: residual <= 0 at h = " + std::to_string(h[i]));
    for (std::size_t j = i + 1; j < n; ++j)
      if (h[i] == h[j])
        throw degenerate_input_error("slope_fit: duplicate h value " + std::to_string(h[i]));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(r[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double dn = static_cast<double>(n);
  double den = dn * sxx - sx * sx;
  SlopeFit f;
  f.slope = (dn * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / dn;
  double ss_tot = syy - sy * sy / dn;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(r[i]);
    double e = y - (f.intercept + f.slope * x);
    ss_res += e * e;
  }
  f.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Nelder-Mead in 2D, used for the smooth outer optimizations in the
// weight-from-deformation construction.
// ---------------------------------------------------------------------------

inline std::array<double, 3> nelder_mead_2d(const std::function<double(double, double)>& f,
                                            double x0, double y0, double scale, double tol,
                                            int max_iter = 400) {
  struct V {
    double x, y, fv;
  };
  std::array<V, 3> s{V{x0, y0, f(x0, y0)}, V{x0 + scale, y0, f(x0 + scale, y0)},
                     V{x0, y0 + scale, f(x0, y0 + scale)}};
  auto order = [&] { std::sort(s.begin(), s.end(), [](const V& a, const V& b) { return a.fv < b.fv; }); };
  order();
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(s[2].fv - s[0].fv) < tol &&
        std::hypot(s[2].x - s[0].x, s[2].y - s[0].y) < std::sqrt(tol))
      break;
    double cx = (s[0].x + s[1].x) / 2, cy = (s[0].y + s[1].y) / 2;
    double rx = cx + (cx - s[2].x), ry = cy + (cy - s[2].y);
    double fr = f(rx, ry);
    if (fr < s[0].fv) {
      double ex = cx + 2 * (cx - s[2].x), ey = cy + 2 * (cy - s[2].y);
      double fe = f(ex, ey);
      s[2] = (fe < fr) ? V{ex, ey, fe} : V{rx, ry, fr};
    } else if (fr < s[1].fv) {
      s[2] = {rx, ry, fr};
    } else {
      double kx = cx + 0.5 * (s[2].x - cx), ky = cy + 0.5 * (s[2].y - cy);
      double fk = f(kx, ky);
      if (fk < s[2].fv) {
        s[2] = {kx, ky, fk};
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
          s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
          s[i].fv = f(s[i].x, s[i].y);
        }
      }
    }
    order();
  }
  return {s[0].x, s[0].y, s[0].fv};
}

// ---------------------------------------------------------------------------
// 4th-order central differences (first and second derivative stencils).
// ---------------------------------------------------------------------------

inline double fd_step_default() { return 1e-4; }

template <class F>
double fd_d1(const F& f, double x, double step = 1e-4) {
  return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step);
}

template <class F>
double fd_d2(const F& f, double x, double step = 1e-3) {
  return (-f(x + 2 * step) + 16 * f(x + step) - 30 * f(x) + 16 * f(x - step) - f(x - 2 * step)) /
         (12 * step * step);
}

template <class F>
cplx fd_d1_c(const F& f, double x, double step = 1e-4) {
  return (-f(x + 2 * step) + 8.0 * f(x + step) - 8.0 * f(x - step) + f(x - 2 * step)) /
         (12.0 * step);
}

template <class F>
cplx fd_d2_c(const F& f, double x, double step = 1e-3) {
  return (-f(x + 2 * step) + 16.0 * f(x + step) - 30.0 * f(x) + 16.0 * f(x - step) -
          f(x - 2 * step)) /
         (12.0 * step * step);
}

}  // namespace fbl
