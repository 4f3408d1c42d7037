#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/quadrature.hpp"

namespace fuelcalc {

// Strictly increasing cumulative fuel samples (T_j seconds, Q_j kg).
struct FuelSeries {
  std::vector<double> T;
  std::vector<double> Q;

  std::size_t size() const { return T.size(); }
};

inline void validate_series(const FuelSeries& s) {
  if (s.T.size() != s.Q.size() || s.T.size() < 3) {
    throw InvalidArgument("fuel series needs equal-length T/Q with at least 3 samples");
  }
  for (std::size_t j = 1; j < s.T.size(); ++j) {
    if (!(s.T[j] > s.T[j - 1]) || !(s.Q[j] > s.Q[j - 1])) {
      throw InvalidArgument("fuel series must be strictly increasing in both T and Q");
    }
  }
}

// P_j = (Q_{j+1} - Q_j) / dT_j
inline std::vector<double> interval_slopes(const FuelSeries& series) {
  validate_series(series);
  std::vector<double> p(series.size() - 1);
  for (std::size_t j = 0; j + 1 < series.size(); ++j) {
    p[j] = (series.Q[j + 1] - series.Q[j]) / (series.T[j + 1] - series.T[j]);
  }
  return p;
}

struct KnotDerivatives {
  std::vector<double> d1;        // Q_j'
  std::vector<double> d2;        // Q_j''
  std::vector<bool> limited;     // true where the monotonicity clamp changed d1
};

// Interior knots use the cross-weighted average
//   Q_j'  = (dT_{j-1} P_j + dT_j P_{j-1}) / (dT_{j-1} + dT_j)
//   Q_j'' = 2 (P_j - P_{j-1}) / (dT_{j-1} + dT_j)
// and the endpoints take one-sided stencils from the quadratic through the
// nearest three samples, which keeps the same order of accuracy. Each Q_j'
// is then clamped into [0, 3 min(P_{j-1}, P_j)]; at clamped knots Q_j'' is
// replaced by a one-sided difference of the limited slopes.
inline KnotDerivatives knot_derivatives(const FuelSeries& series,
                                        const std::vector<double>& P) {
  validate_series(series);
  const std::size_t n = series.size();
  if (P.size() != n - 1) throw ShapeMismatch("interval slope count must be n-1");
  const auto& T = series.T;

  std::vector<double> dT(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) dT[j] = T[j + 1] - T[j];

  KnotDerivatives kd;
  kd.d1.resize(n);
  kd.d2.resize(n);
  kd.limited.assign(n, false);

  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double w = dT[j - 1] + dT[j];
    kd.d1[j] = (dT[j - 1] * P[j] + dT[j] * P[j - 1]) / w;
    kd.d2[j] = 2.0 * (P[j] - P[j - 1]) / w;
  }
  kd.d1[0] = P[0] - dT[0] * (P[1] - P[0]) / (dT[0] + dT[1]);
  kd.d2[0] = 2.0 * (P[1] - P[0]) / (dT[0] + dT[1]);
  const std::size_t K = n - 1;
  kd.d1[K] = P[K - 1] + dT[K - 1] * (P[K - 1] - P[K - 2]) / (dT[K - 2] + dT[K - 1]);
  kd.d2[K] = 2.0 * (P[K - 1] - P[K - 2]) / (dT[K - 2] + dT[K - 1]);

  for (std::size_t j = 0; j < n; ++j) {
    const double cap = (j == 0)     ? 3.0 * P[0]
                       : (j == K)   ? 3.0 * P[K - 1]
                                    : 3.0 * std::min(P[j - 1], P[j]);
    const double clamped = std::clamp(kd.d1[j], 0.0, cap);
    if (clamped != kd.d1[j]) {
      kd.d1[j] = clamped;
      kd.limited[j] = true;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!kd.limited[j]) continue;
    if (j + 1 < n) {
      kd.d2[j] = (kd.d1[j + 1] - kd.d1[j]) / dT[j];
    } else {
      kd.d2[j] = (kd.d1[j] - kd.d1[j - 1]) / dT[j - 1];
    }
  }
  return kd;
}

// One cubic in Hermite form; m0/m1 are derivatives with respect to T. The
// right endpoint is stored as the increment dy = y1 - y0 rather than as a
// second absolute value: cumulative fuel is large against one sub-segment's
// change, and the difference form keeps derivative evaluation from
// cancelling away (h00 + h01 = 1 makes the rewrite exact).
struct CubicSegment {
  double t0 = 0.0, t1 = 0.0;
  double y0 = 0.0, dy = 0.0;
  double m0 = 0.0, m1 = 0.0;

  double width() const { return t1 - t0; }
  double y1() const { return y0 + dy; }

  double value(double T) const {
    const double s = width();
    const double u = (T - t0) / s;
    const double u1 = 1.0 - u;
    const double h10 = u * u1 * u1;
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = -u * u * u1;
    return y0 + dy * h01 + s * (m0 * h10 + m1 * h11);
  }

  double derivative(double T) const {
    const double s = width();
    const double u = (T - t0) / s;
    const double d = dy * (6.0 * u - 6.0 * u * u) +
                     s * m0 * (3.0 * u * u - 4.0 * u + 1.0) +
                     s * m1 * (3.0 * u * u - 2.0 * u);
    return d / s;
  }

  double second_derivative(double T) const {
    const double s = width();
    const double u = (T - t0) / s;
    const double d2 =
        dy * (6.0 - 12.0 * u) + s * m0 * (6.0 * u - 4.0) + s * m1 * (6.0 * u - 2.0);
    return d2 / (s * s);
  }

  // Exact minimum of the derivative over the segment (the derivative is a
  // quadratic in the local coordinate).
  double min_derivative() const {
    const double s = width();
    const double A = 3.0 * s * (m0 + m1) - 6.0 * dy;
    const double B = 6.0 * dy - s * (4.0 * m0 + 2.0 * m1);
    const double C = s * m0;
    double lo = std::min(C, A + B + C);
    if (A > 0.0) {
      const double u = -B / (2.0 * A);
      if (u > 0.0 && u < 1.0) lo = std::min(lo, C - B * B / (4.0 * A));
    }
    return lo / s;
  }
};

struct BuildReport {
  std::size_t clamped_knots = 0;
  std::size_t repaired_knots = 0;
  std::size_t repair_rounds = 0;
  // true where the clamp or the repair sweep changed the knot data
  std::vector<bool> knot_touched;
};

// Piecewise-cubic monotone interpolant: each parent interval carries three
// Hermite sub-segments joined with C2 continuity.
class MonotoneCurve {
public:
  const std::vector<double>& knots() const { return knot_t_; }
  const KnotDerivatives& knot_derivs() const { return kd_; }
  const BuildReport& report() const { return report_; }
  const std::vector<CubicSegment>& segments() const { return segments_; }

  double t_min() const { return knot_t_.front(); }
  double t_max() const { return knot_t_.back(); }

  double value(double T) const { return locate(T).value(clampT(T)); }

  double flow(double T) const {
    // max() guards against -1e-17-scale rounding on segments whose true
    // derivative touches zero.
    return std::max(0.0, locate(T).derivative(clampT(T)));
  }

  double second_derivative(double T) const { return locate(T).second_derivative(clampT(T)); }

private:
  friend MonotoneCurve build_curve(const FuelSeries& series);

  double clampT(double T) const {
    return std::clamp(T, knot_t_.front(), knot_t_.back());
  }

  const CubicSegment& locate(double T) const {
    const double slack = 1e-9 * (knot_t_.back() - knot_t_.front());
    if (T < knot_t_.front() - slack || T > knot_t_.back() + slack) {
      throw OutOfDomain("T = " + std::to_string(T) + " outside [" +
                        std::to_string(knot_t_.front()) + ", " +
                        std::to_string(knot_t_.back()) + "]");
    }
    const double t = clampT(T);
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - starts_.begin());
    idx = (idx == 0) ? 0 : idx - 1;
    if (idx >= segments_.size()) idx = segments_.size() - 1;
    return segments_[idx];
  }

  std::vector<double> knot_t_;
  std::vector<double> starts_;
  std::vector<CubicSegment> segments_;
  KnotDerivatives kd_;
  BuildReport report_;
};

namespace detail {

// Builds the three sub-segments of parent interval [Tj, Tj1]. With
//   a = Q_j' + (dT/6) Q_j''            d = Q_{j+1}' - (dT/6) Q_{j+1}''
//   w = 3 P_j - (Q_j' + Q_{j+1}') + (dT/9)(Q_{j+1}'' - Q_j'')
//   b = (a + w)/2                      c = (d + w)/2
//   Q_{j+1/3} = Q_j + (dT/9)(Q_j' + 1.5 a + 0.5 w)
//   Q_{j+2/3} = Q_{j+1} - (dT/9)(Q_{j+1}' + 1.5 d + 0.5 w)
// the assembled spline matches value, first and second derivative at both
// parent knots and is C2 across the interior third points. (The w line is
// the dimensionally consistent form; it uses knot derivatives, not knot
// values.)
inline void build_interval(double Tj, double Tj1, double Qj, double Qj1,
                           double d1j, double d1j1, double d2j, double d2j1,
                           CubicSegment out[3]) {
  const double dT = Tj1 - Tj;
  const double s = dT / 3.0;
  const double dQ = Qj1 - Qj;
  const double P = dQ / dT;
  const double a = d1j + dT / 6.0 * d2j;
  const double d = d1j1 - dT / 6.0 * d2j1;
  const double w = 3.0 * P - (d1j + d1j1) + dT / 9.0 * (d2j1 - d2j);
  const double b = 0.5 * (a + w);
  const double c = 0.5 * (d + w);
  const double inc1 = dT / 9.0 * (d1j + 1.5 * a + 0.5 * w);   // Q_{j+1/3} - Q_j
  const double inc3 = dT / 9.0 * (d1j1 + 1.5 * d + 0.5 * w);  // Q_{j+1} - Q_{j+2/3}
  const double inc2 = dQ - inc1 - inc3;
  out[0] = {Tj, Tj + s, Qj, inc1, d1j, b};
  out[1] = {Tj + s, Tj + 2.0 * s, Qj + inc1, inc2, b, c};
  out[2] = {Tj + 2.0 * s, Tj1, Qj1 - inc3, inc3, c, d1j1};
}

}  // namespace detail

// Assembles the monotone C2 interpolant. The knot-derivative limiter makes
// the construction monotone for all well-behaved data; where an interval
// still admits a descending sub-segment (possible when both knot slopes sit
// at the clamp ceiling), a bounded sweep shrinks the second and then the
// first derivatives at the offending knots until the exact per-segment
// derivative minimum is non-negative. The sweep converges because zeroed
// knot data always yields a monotone interval.
inline MonotoneCurve build_curve(const FuelSeries& series) {
  validate_series(series);
  const std::vector<double> P = interval_slopes(series);
  KnotDerivatives kd = knot_derivatives(series, P);
  const std::size_t n = series.size();
  const std::size_t K = n - 1;

  MonotoneCurve curve;
  curve.knot_t_ = series.T;
  curve.report_.knot_touched.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (kd.limited[j]) {
      curve.report_.knot_touched[j] = true;
      ++curve.report_.clamped_knots;
    }
  }

  std::vector<CubicSegment> segs(3 * K);
  auto rebuild = [&](std::size_t j) {
    detail::build_interval(series.T[j], series.T[j + 1], series.Q[j], series.Q[j + 1],
                           kd.d1[j], kd.d1[j + 1], kd.d2[j], kd.d2[j + 1], &segs[3 * j]);
  };
  for (std::size_t j = 0; j < K; ++j) rebuild(j);

  auto interval_ok = [&](std::size_t j) {
    return segs[3 * j].min_derivative() >= 0.0 &&
           segs[3 * j + 1].min_derivative() >= 0.0 &&
           segs[3 * j + 2].min_derivative() >= 0.0;
  };

  const std::size_t max_rounds = 60;
  std::vector<bool> repaired(n, false);
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::vector<std::size_t> failing;
    for (std::size_t j = 0; j < K; ++j) {
      if (!interval_ok(j)) failing.push_back(j);
    }
    if (failing.empty()) break;
    if (round + 1 == max_rounds) {
      throw NonMonotonicConstruction("derivative still negative after repair sweep");
    }
    ++curve.report_.repair_rounds;
    std::vector<bool> mark(n, false);
    for (std::size_t j : failing) mark[j] = mark[j + 1] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!mark[j]) continue;
      if (round < 16) {
        kd.d2[j] *= 0.5;
      } else if (kd.d2[j] != 0.0) {
        kd.d2[j] = 0.0;
      } else {
        kd.d1[j] *= 0.5;
      }
      if (!repaired[j]) {
        repaired[j] = true;
        ++curve.report_.repaired_knots;
      }
      curve.report_.knot_touched[j] = true;
    }
    for (std::size_t j = 0; j < K; ++j) {
      if (mark[j] || mark[j + 1]) rebuild(j);
    }
  }

  // verification sweep at the Gauss points of every sub-segment
  const GaussRule& rule = gauss_legendre(5);
  for (const CubicSegment& seg : segs) {
    for (double node : rule.nodes) {
      const double T = 0.5 * (seg.t0 + seg.t1) + 0.5 * (seg.t1 - seg.t0) * node;
      if (seg.derivative(T) < -1e-12 * std::max(1.0, std::fabs(P[0]))) {
        throw NonMonotonicConstruction("negative derivative at Gauss point");
      }
    }
  }

  curve.segments_ = std::move(segs);
  curve.starts_.resize(curve.segments_.size());
  for (std::size_t i = 0; i < curve.segments_.size(); ++i) {
    curve.starts_[i] = curve.segments_[i].t0;
  }
  curve.kd_ = std::move(kd);
  return curve;
}

inline double eval_curve(const MonotoneCurve& curve, double T) { return curve.value(T); }
inline double eval_flow(const MonotoneCurve& curve, double T) { return curve.flow(T); }

// Pool-adjacent-violators with a strictness ramp; returns how many entries
// changed.
inline std::size_t isotonic_repair(std::vector<double>& q, double eps = 1e-6) {
  const std::vector<double> original = q;
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  for (double v : q) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
      blocks[blocks.size() - 2].sum += blocks.back().sum;
      blocks[blocks.size() - 2].count += blocks.back().count;
      blocks.pop_back();
    }
  }
  std::size_t i = 0;
  for (const Block& b : blocks) {
    for (std::size_t k = 0; k < b.count; ++k) q[i++] = b.mean();
  }
  for (std::size_t j = 1; j < q.size(); ++j) {
    if (q[j] <= q[j - 1]) q[j] = q[j - 1] + eps;
  }
  std::size_t changed = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] != original[j]) ++changed;
  }
  return changed;
}

}  // namespace fuelcalc
