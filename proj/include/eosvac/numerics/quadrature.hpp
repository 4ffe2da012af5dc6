#pragma once

// Adaptive and fixed-order quadrature shared by every physics module.
//
// All integrators are templates over the integrand so that real- and
// complex-valued kernels go through the same code path. Workspaces live on
// the stack of each call; nothing here holds state between calls.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"

namespace eosvac::numerics {

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  int max_subdivisions = 2000;
  /// Expected oscillation period of the integrand; seeds the initial panel
  /// count so that no panel starts out spanning many periods.
  std::optional<double> oscillatory_hint{};
  /// Throw NonConvergence when the tolerance is not met. When false the best
  /// estimate is returned with converged == false.
  bool strict = true;

  void validate() const {
    if (!(rel_tol > 0.0) || abs_tol < 0.0 || max_subdivisions < 1) {
      throw Error(ErrorCode::InvalidArgument, "QuadratureSpec needs rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
    }
  }
};

template <class T>
struct Integral {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = true;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Magnitude used for error control. Other value types (tensors) provide an
// overload of norm_of in their own namespace, found by ADL.
inline double norm_of(double x) { return std::abs(x); }
inline double norm_of(const std::complex<double>& z) { return std::abs(z); }

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  double magnitude;  // integral of |f|, for the round-off floor
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class T, class F>
Panel<T> gauss_kronrod_15(F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using detail::norm_of;
  const T fc = f(mid);
  T kronrod = fc * kronrod_w[7];
  T gauss = fc * gauss_w[3];
  double magnitude = norm_of(fc) * kronrod_w[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_x[j];
    const T f1 = f(mid - dx);
    const T f2 = f(mid + dx);
    kronrod += (f1 + f2) * kronrod_w[j];
    magnitude += (norm_of(f1) + norm_of(f2)) * kronrod_w[j];
    if (j % 2 == 1) gauss += (f1 + f2) * gauss_w[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, norm_of(kronrod - gauss), std::abs(half) * magnitude};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over the panels
/// delimited by `points` (sorted, at least two entries). The last point may
/// be +infinity, in which case the final panel is mapped onto [0, 1) with
/// x = a + t / (1 - t).
template <class F>
auto integrate_1d(F&& f, std::span<const double> points, const QuadratureSpec& spec)
    -> Integral<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  spec.validate();
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "integrate_1d needs at least two points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] >= points[i - 1])) throw Error(ErrorCode::InvalidArgument, "integrate_1d breakpoints must be sorted");
  }

  int evaluations = 0;
  const bool infinite = std::isinf(points.back());
  const double inf_start = infinite ? points[points.size() - 2] : 0.0;

  auto finite_f = [&](double x) -> T {
    ++evaluations;
    return f(x);
  };
  auto mapped_f = [&](double t) -> T {
    ++evaluations;
    const double one_minus = 1.0 - t;
    const double x = inf_start + t / one_minus;
    return f(x) * (1.0 / (one_minus * one_minus));
  };

  // Panel boundaries in the integration variable; the semi-infinite panel is
  // tagged by living in the mapped [0, 1) coordinate.
  struct Seed {
    double a, b;
    bool mapped;
  };
  std::vector<Seed> seeds;
  for (std::size_t i = 1; i < points.size(); ++i) {
    double a = points[i - 1];
    double b = points[i];
    if (std::isinf(b)) {
      seeds.push_back({0.0, 1.0, true});
      continue;
    }
    if (a == b) continue;
    int pieces = 1;
    if (spec.oscillatory_hint && *spec.oscillatory_hint > 0.0) {
      pieces = static_cast<int>(std::ceil((b - a) / *spec.oscillatory_hint));
      pieces = std::clamp(pieces, 1, std::max(1, spec.max_subdivisions / 2));
    }
    for (int k = 0; k < pieces; ++k) {
      seeds.push_back({a + (b - a) * k / pieces, a + (b - a) * (k + 1) / pieces, false});
    }
  }

  struct Tagged {
    detail::Panel<T> panel;
    bool mapped;
    bool operator<(const Tagged& other) const { return panel.error < other.panel.error; }
  };
  std::priority_queue<Tagged> heap;
  T total{};
  double total_error = 0.0;
  double total_magnitude = 0.0;
  for (const auto& s : seeds) {
    auto p = s.mapped ? detail::gauss_kronrod_15<T>(mapped_f, s.a, s.b)
                      : detail::gauss_kronrod_15<T>(finite_f, s.a, s.b);
    total += p.value;
    total_error += p.error;
    total_magnitude += p.magnitude;
    heap.push({p, s.mapped});
  }

  using detail::norm_of;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Cancellation between panels limits the attainable accuracy to a few
  // hundred ulps of \int |f|; asking for more only burns subdivisions.
  auto tolerance = [&] {
    return std::max({spec.abs_tol, spec.rel_tol * norm_of(total), 200.0 * eps * total_magnitude});
  };
  int intervals = static_cast<int>(heap.size());

  while (!heap.empty() && total_error > tolerance() && intervals < spec.max_subdivisions) {
    Tagged worst = heap.top();
    heap.pop();
    const double a = worst.panel.a;
    const double b = worst.panel.b;
    const double m = 0.5 * (a + b);
    if (std::abs(b - a) <= 64.0 * eps * std::max(1.0, std::abs(m))) {
      // Panel cannot be split further; keep its contribution and move on.
      heap.push(worst);
      break;
    }
    auto left = worst.mapped ? detail::gauss_kronrod_15<T>(mapped_f, a, m) : detail::gauss_kronrod_15<T>(finite_f, a, m);
    auto right = worst.mapped ? detail::gauss_kronrod_15<T>(mapped_f, m, b) : detail::gauss_kronrod_15<T>(finite_f, m, b);
    total += left.value + right.value - worst.panel.value;
    total_error += left.error + right.error - worst.panel.error;
    total_magnitude += left.magnitude + right.magnitude - worst.panel.magnitude;
    heap.push({left, worst.mapped});
    heap.push({right, worst.mapped});
    ++intervals;
  }

  // Re-sum to shed the drift of the running updates.
  T resummed{};
  double resummed_error = 0.0;
  auto drain = heap;
  while (!drain.empty()) {
    resummed += drain.top().panel.value;
    resummed_error += drain.top().panel.error;
    drain.pop();
  }

  Integral<T> out{resummed, resummed_error, evaluations, intervals, resummed_error <= tolerance()};
  if (!out.converged && spec.strict) {
    throw NonConvergence("adaptive quadrature exhausted " + std::to_string(spec.max_subdivisions) +
                             " subdivisions (estimate " + std::to_string(norm_of(out.value)) +
                             ", error " + std::to_string(out.error) + ")",
                         norm_of(out.value), out.error);
  }
  return out;
}

template <class F>
auto integrate_1d(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate_1d(std::forward<F>(f), std::span<const double>(pts), spec);
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// three-term recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) {
          p1 = x;
          p0 = 1.0;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
  }

  /// Nodes and weights mapped to [a, b].
  std::pair<std::vector<double>, std::vector<double>> on(double a, double b) const {
    std::vector<double> x(nodes.size()), w(nodes.size());
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      x[i] = mid + half * nodes[i];
      w[i] = half * weights[i];
    }
    return {std::move(x), std::move(w)};
  }
};

/// Trapezoid rule for a periodic integrand sampled at n equispaced points
/// over one period starting at `start`.
template <class F>
auto periodic_trapezoid(F&& f, double start, double period, int n) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  T sum{};
  const double h = period / n;
  for (int i = 0; i < n; ++i) sum += f(start + i * h);
  return Integral<T>{sum * h, 0.0, n, n, true};
}

/// Periodic trapezoid refined by doubling until two successive levels agree.
/// The error reported is the last difference.
template <class F>
auto integrate_periodic(F&& f, double start, double period, const QuadratureSpec& spec, int initial_points = 16) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  spec.validate();
  int n = std::max(2, initial_points);
  auto coarse = periodic_trapezoid(f, start, period, n);
  int evaluations = n;
  while (true) {
    // Reuse coarse samples: the refined rule only needs the midpoints.
    T mid_sum{};
    const double h = period / n;
    for (int i = 0; i < n; ++i) mid_sum += f(start + (i + 0.5) * h);
    evaluations += n;
    const T fine = 0.5 * (coarse.value + mid_sum * h);
    using detail::norm_of;
    const double diff = norm_of(fine - coarse.value);
    n *= 2;
    if (diff <= std::max(spec.abs_tol, spec.rel_tol * norm_of(fine))) {
      return Integral<T>{fine, diff, evaluations, n, true};
    }
    if (n > spec.max_subdivisions * 16) {
      Integral<T> out{fine, diff, evaluations, n, false};
      if (spec.strict) throw NonConvergence("periodic trapezoid did not converge", norm_of(fine), diff);
      return out;
    }
    coarse.value = fine;
  }
}

struct Rectangle {
  double x0, x1, y0, y1;
};
struct Disc {
  double radius;
};
using Region = std::variant<Rectangle, Disc>;

/// Nested 1D adaptive integration of f(x, y) over a rectangle or a disc
/// centred at the origin (polar coordinates, Jacobian included). The inner
/// level runs at a quarter of the requested relative tolerance.
template <class F>
auto integrate_2d_nested(F&& f, const Region& region, const QuadratureSpec& spec = {}) {
  using T = std::decay_t<std::invoke_result_t<F&, double, double>>;
  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = spec.rel_tol / 4.0;
  inner_spec.abs_tol = 0.0;
  double worst_inner_rel = 0.0;
  int evaluations = 0;

  using detail::norm_of;
  auto inner_rel = [&](const Integral<T>& r) {
    evaluations += r.evaluations;
    const double mag = norm_of(r.value);
    if (mag > 0.0) worst_inner_rel = std::max(worst_inner_rel, r.error / mag);
  };

  Integral<T> outer;
  if (const auto* rect = std::get_if<Rectangle>(&region)) {
    outer = integrate_1d(
        [&](double x) {
          auto r = integrate_1d([&](double y) { return f(x, y); }, rect->y0, rect->y1, inner_spec);
          inner_rel(r);
          return r.value;
        },
        rect->x0, rect->x1, spec);
  } else {
    const auto& disc = std::get<Disc>(region);
    outer = integrate_1d(
        [&](double r) {
          auto ang = integrate_1d([&](double phi) { return f(r * std::cos(phi), r * std::sin(phi)); }, 0.0,
                                  2.0 * constants::pi, inner_spec);
          inner_rel(ang);
          return ang.value * r;
        },
        0.0, disc.radius, spec);
  }
  outer.error += norm_of(outer.value) * worst_inner_rel;
  outer.evaluations += evaluations;
  return outer;
}

}  // namespace eosvac::numerics
