#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/quadrature.hpp"
#include "fuelcalc/trajectory.hpp"

namespace fuelcalc {

inline constexpr double kPi = 3.14159265358979323846;

// A time series rescaled onto [0, pi]. The signal is understood as
// piecewise linear between samples and identically zero on the padding
// interval (tstar.back(), pi]; its even extension to [-pi, pi] is what
// the cosine coefficients describe.
struct NormalizedSeries {
  std::vector<double> tstar;
  std::vector<double> values;
  double T_M = 0.0;  // seconds mapped onto the full [0, pi]
};

// Truncated cosine-coefficient vectors for the altitude (alpha) and ground
// speed (beta) series of one track or segment.
struct SpectralFeature {
  std::vector<double> alpha;  // size N_h + 1
  std::vector<double> beta;   // size N_v + 1
  double t0 = 0.0;            // segment duration, seconds
  double T_M = 0.0;
};

// t_i* = (t_i - t_0) * pi / T_M
inline std::vector<double> normalize_time(const std::vector<double>& times, double T_M) {
  if (times.size() < 2) throw InvalidArgument("normalize_time needs at least 2 samples");
  if (!(T_M > 0.0)) throw InvalidArgument("T_M must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidArgument("times must be strictly increasing");
    }
  }
  const double span = times.back() - times.front();
  if (span > T_M * (1.0 + 1e-12)) {
    throw SpanExceedsTM("series spans " + std::to_string(span) + " s but T_M is " +
                        std::to_string(T_M) + " s");
  }
  std::vector<double> out(times.size());
  const double scale = kPi / T_M;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i] = std::min((times[i] - times.front()) * scale, kPi);
  }
  out[0] = 0.0;
  return out;
}

inline NormalizedSeries make_normalized_series(const std::vector<double>& times,
                                               const std::vector<double>& values,
                                               double T_M) {
  if (times.size() != values.size()) {
    throw ShapeMismatch("times and values must have equal length");
  }
  NormalizedSeries s;
  s.tstar = normalize_time(times, T_M);
  s.values = values;
  s.T_M = T_M;
  return s;
}

namespace detail {

inline void check_series(const NormalizedSeries& s) {
  if (s.tstar.size() != s.values.size() || s.tstar.size() < 2) {
    throw ShapeMismatch("normalized series needs equal-length tstar/values, length >= 2");
  }
  if (s.tstar.front() != 0.0 || s.tstar.back() > kPi * (1.0 + 1e-12)) {
    throw InvalidArgument("tstar must start at 0 and end at or before pi");
  }
}

// cos/sin streams evaluated at n*theta for a fixed set of base angles,
// advanced by angle addition and periodically re-synced from libm to stop
// rounding drift.
class HarmonicStream {
public:
  explicit HarmonicStream(std::vector<double> base) : base_(std::move(base)) {
    cb_.resize(base_.size());
    sb_.resize(base_.size());
    c_.assign(base_.size(), 1.0);
    s_.assign(base_.size(), 0.0);
    for (std::size_t i = 0; i < base_.size(); ++i) {
      cb_[i] = std::cos(base_[i]);
      sb_[i] = std::sin(base_[i]);
    }
  }

  // advance from harmonic n-1 to n (call with n = 1, 2, ...)
  void advance(int n) {
    if (n % 8 == 0) {
      for (std::size_t i = 0; i < base_.size(); ++i) {
        c_[i] = std::cos(n * base_[i]);
        s_[i] = std::sin(n * base_[i]);
      }
      return;
    }
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const double c = c_[i] * cb_[i] - s_[i] * sb_[i];
      const double s = s_[i] * cb_[i] + c_[i] * sb_[i];
      c_[i] = c;
      s_[i] = s;
    }
  }

  double cosv(std::size_t i) const { return c_[i]; }
  double sinv(std::size_t i) const { return s_[i]; }

private:
  std::vector<double> base_, cb_, sb_, c_, s_;
};

}  // namespace detail

// Closed-form cosine coefficients of the even-extended, zero-padded,
// piecewise-linear signal:
//   a_0 = (2/pi) sum_j (f_{j+1}+f_j)(t*_{j+1}-t*_j)/2
//   a_n = (2/pi) sum_j [ M_j Ct_j(n)/n^2 + N_j(n)/n ],   n >= 1
// with M_j the segment slope, Ct_j(n) = cos(n t*_{j+1}) - cos(n t*_j) and
// N_j(n) = f_{j+1} sin(n t*_{j+1}) - f_j sin(n t*_j). Ct is evaluated through
// the product identity cos A - cos B = -2 sin((A+B)/2) sin((A-B)/2) so short
// segments do not lose precision to cancellation. Summation order is fixed
// (ascending j).
inline std::vector<double> fourier_closed_form(const NormalizedSeries& series, int N) {
  detail::check_series(series);
  if (N < 0) throw InvalidArgument("truncation radius must be >= 0");
  const auto& t = series.tstar;
  const auto& f = series.values;
  const std::size_t k = t.size() - 1;  // number of linear pieces

  std::vector<double> coeff(static_cast<std::size_t>(N) + 1, 0.0);
  double area = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    area += 0.5 * (f[j + 1] + f[j]) * (t[j + 1] - t[j]);
  }
  coeff[0] = 2.0 / kPi * area;
  if (N == 0) return coeff;

  std::vector<double> slope(k), mid(k), half(k);
  for (std::size_t j = 0; j < k; ++j) {
    slope[j] = (f[j + 1] - f[j]) / (t[j + 1] - t[j]);
    mid[j] = 0.5 * (t[j + 1] + t[j]);
    half[j] = 0.5 * (t[j + 1] - t[j]);
  }

  detail::HarmonicStream points(t);
  detail::HarmonicStream mids(mid);
  detail::HarmonicStream halves(half);

  for (int n = 1; n <= N; ++n) {
    points.advance(n);
    mids.advance(n);
    halves.advance(n);
    const double inv_n = 1.0 / n;
    const double inv_n2 = inv_n * inv_n;
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double ct = -2.0 * mids.sinv(j) * halves.sinv(j);
      const double nf = f[j + 1] * points.sinv(j + 1) - f[j] * points.sinv(j);
      sum += slope[j] * ct * inv_n2 + nf * inv_n;
    }
    coeff[static_cast<std::size_t>(n)] = 2.0 / kPi * sum;
  }
  return coeff;
}

// Independent oracle: a_n = (2/pi) * integral_0^pi f(t*) cos(n t*) dt*,
// evaluated by composite Gauss-Legendre over each linear piece, with pieces
// subdivided so every panel sees at most ~1.5 radians of oscillation. The
// zero padding contributes nothing and is skipped.
inline std::vector<double> fourier_quadrature(const NormalizedSeries& series, int N) {
  detail::check_series(series);
  if (N < 0) throw InvalidArgument("truncation radius must be >= 0");
  const auto& t = series.tstar;
  const auto& f = series.values;
  const std::size_t k = t.size() - 1;

  std::vector<double> coeff(static_cast<std::size_t>(N) + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = t[j], b = t[j + 1];
      const double m = (f[j + 1] - f[j]) / (b - a);
      auto integrand = [&](double x) {
        return (f[j] + m * (x - a)) * std::cos(n * x);
      };
      const int panels = std::max(1, static_cast<int>(std::ceil(n * (b - a) / 1.5)));
      for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        total += integrate_gauss(integrand, lo, hi, 10);
      }
    }
    coeff[static_cast<std::size_t>(n)] = 2.0 / kPi * total;
  }
  return coeff;
}

// a_0/2 + sum_n a_n cos(n t*)
inline double reconstruct(const std::vector<double>& coefficients, double tstar) {
  if (coefficients.empty()) throw InvalidArgument("empty coefficient vector");
  if (tstar < -1e-12 || tstar > kPi * (1.0 + 1e-12)) {
    throw InvalidArgument("tstar must lie in [0, pi]");
  }
  double acc = 0.5 * coefficients[0];
  const double c1 = std::cos(tstar);
  const double s1 = std::sin(tstar);
  double c = 1.0, s = 0.0;
  for (std::size_t n = 1; n < coefficients.size(); ++n) {
    const double cn = c * c1 - s * s1;
    const double sn = s * c1 + c * s1;
    c = cn;
    s = sn;
    acc += coefficients[n] * c;
  }
  return acc;
}

// Altitude -> alpha, ground speed -> beta, both over the shared normalized
// time grid of the track.
inline SpectralFeature featurize(const FlightTrack& track, int N_h, int N_v, double T_M) {
  if (track.points.size() < 2) throw EmptyTrack("featurize requires at least 2 points");
  std::vector<double> times, alts, speeds;
  times.reserve(track.points.size());
  alts.reserve(track.points.size());
  speeds.reserve(track.points.size());
  for (const TrackPoint& p : track.points) {
    times.push_back(p.t);
    alts.push_back(p.alt);
    speeds.push_back(p.gs);
  }
  SpectralFeature feat;
  feat.T_M = T_M;
  feat.t0 = times.back() - times.front();
  NormalizedSeries alt_series = make_normalized_series(times, alts, T_M);
  feat.alpha = fourier_closed_form(alt_series, N_h);
  NormalizedSeries speed_series = make_normalized_series(times, speeds, T_M);
  feat.beta = fourier_closed_form(speed_series, N_v);
  return feat;
}

}  // namespace fuelcalc
