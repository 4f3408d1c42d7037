#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/model.hpp"
#include "fuelcalc/quadrature.hpp"
#include "fuelcalc/rng.hpp"
#include "fuelcalc/spectral.hpp"
#include "fuelcalc/trajectory.hpp"

namespace fuelcalc {

inline constexpr double kAltitudeRelief = 12000.0;  // h_ref, meters

// Instantaneous fuel law used as ground truth:
//   q = (c0 + c1 max(h',0) + c2 v^2 + c3 max(v',0) v) * (1 - c4 h / h_ref)
// clamped below at 0.01 c0. Nonlinear in (h, h', v, v') on purpose so a
// linear regressor underfits it.
struct FuelLaw {
  double c0 = 0.85;    // base burn, kg/s
  double c1 = 0.035;   // climb cost, kg/m
  double c2 = 2.1e-5;  // speed-squared drag cost, kg*s/m^2
  double c3 = 0.25;    // acceleration cost, kg*s^2/m^2
  double c4 = 0.35;    // altitude relief, dimensionless in [0, 0.5]
};

inline double q_true(const FuelLaw& law, double h, double dh, double v, double dv) {
  const double burn = law.c0 + law.c1 * std::max(dh, 0.0) + law.c2 * v * v +
                      law.c3 * std::max(dv, 0.0) * v;
  const double relief = 1.0 - law.c4 * h / kAltitudeRelief;
  return std::max(burn * relief, 0.01 * law.c0);
}

// Climb-cruise-descent profile. Interior phase boundaries are snapped onto
// half-sample offsets so the parabolic corner rounding (half-width = half a
// sample interval) never covers a sample instant: with zero noise the
// sampled track is exactly trapezoidal.
struct PhaseProfile {
  double climb_duration = 1200.0;    // seconds
  double cruise_altitude = 10000.0;  // meters
  double cruise_speed = 230.0;       // m/s
  double cruise_duration = 1800.0;   // seconds
  double descent_duration = 1000.0;  // seconds
  double start_altitude = 0.0;
  double final_altitude = 0.0;
  double start_speed = 80.0;
  double final_speed = 70.0;
  double noise_alt_amp = 0.0;    // meters
  double noise_speed_amp = 0.0;  // m/s
  double sample_interval = 4.0;  // seconds
  std::uint64_t seed = 0;

  double climb_rate() const { return (cruise_altitude - start_altitude) / climb_duration; }
  double descent_rate() const { return (cruise_altitude - final_altitude) / descent_duration; }
};

namespace detail {

struct NoiseBand {
  double amp[4] = {0, 0, 0, 0};
  double omega[4] = {0, 0, 0, 0};
  double phase[4] = {0, 0, 0, 0};

  double value(double t) const {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += amp[i] * std::sin(omega[i] * t + phase[i]);
    return acc;
  }
  double rate(double t) const {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += amp[i] * omega[i] * std::cos(omega[i] * t + phase[i]);
    return acc;
  }
};

inline NoiseBand make_noise(double amplitude, Rng& rng) {
  NoiseBand band;
  if (amplitude <= 0.0) return band;
  const double weights[4] = {1.0, 0.6, 0.35, 0.2};
  const double wsum = 2.15;
  for (int i = 0; i < 4; ++i) {
    band.amp[i] = amplitude * weights[i] / wsum;
    band.omega[i] = 2.0 * kPi / rng.uniform(150.0, 900.0);
    band.phase[i] = rng.uniform(0.0, 2.0 * kPi);
  }
  return band;
}

// Trapezoid in t with C1 parabolic rounding of half-width r at the two
// interior corners.
struct RoundedTrapezoid {
  double t1 = 0.0, t2 = 0.0, t_end = 0.0;  // corner and end times
  double v_start = 0.0, v_mid = 0.0, v_end = 0.0;
  double s1 = 0.0, s3 = 0.0;  // ramp slopes
  double r = 0.0;

  double value(double t) const {
    if (std::fabs(t - t1) < r) {
      const double x = t - (t1 - r);
      return v_start + s1 * (t1 - r) + s1 * x + (0.0 - s1) / (4.0 * r) * x * x;
    }
    if (std::fabs(t - t2) < r) {
      const double x = t - (t2 - r);
      return v_mid + (s3 - 0.0) / (4.0 * r) * x * x;
    }
    if (t < t1) return v_start + s1 * t;
    if (t < t2) return v_mid;
    return v_mid + s3 * (t - t2);
  }

  double rate(double t) const {
    if (std::fabs(t - t1) < r) return s1 + (0.0 - s1) / (2.0 * r) * (t - (t1 - r));
    if (std::fabs(t - t2) < r) return (s3 - 0.0) / (2.0 * r) * (t - (t2 - r));
    if (t < t1) return s1;
    if (t < t2) return 0.0;
    return s3;
  }
};

}  // namespace detail

// Continuous C1 profile realization: the quadrature oracle integrates along
// these functions, while generate_track only samples them.
class SyntheticFlight {
public:
  explicit SyntheticFlight(const PhaseProfile& profile) : profile_(profile) {
    const double dt = profile.sample_interval;
    if (!(dt > 0.0)) throw InvalidArgument("sample_interval must be positive");
    auto snap_half = [dt](double t) {
      return (std::max(1.0, std::round(t / dt - 0.5)) + 0.5) * dt;
    };
    t1_ = snap_half(profile.climb_duration);
    t2_ = snap_half(t1_ + profile.cruise_duration);
    if (t2_ - t1_ < 2.0 * dt) t2_ = t1_ + 2.0 * dt;
    const double rough_end = t2_ + profile.descent_duration;
    t_end_ = std::ceil(rough_end / dt - 1e-9) * dt;
    if (t_end_ - t2_ < 2.0 * dt) t_end_ = t2_ + 2.0 * dt;

    alt_.t1 = t1_;
    alt_.t2 = t2_;
    alt_.t_end = t_end_;
    alt_.v_start = profile.start_altitude;
    alt_.v_mid = profile.cruise_altitude;
    alt_.v_end = profile.final_altitude;
    alt_.s1 = (profile.cruise_altitude - profile.start_altitude) / t1_;
    alt_.s3 = (profile.final_altitude - profile.cruise_altitude) / (t_end_ - t2_);
    alt_.r = 0.5 * dt;

    spd_ = alt_;
    spd_.v_start = profile.start_speed;
    spd_.v_mid = profile.cruise_speed;
    spd_.v_end = profile.final_speed;
    spd_.s1 = (profile.cruise_speed - profile.start_speed) / t1_;
    spd_.s3 = (profile.final_speed - profile.cruise_speed) / (t_end_ - t2_);

    Rng alt_rng(derive_seed(profile.seed, "noise-alt"));
    Rng spd_rng(derive_seed(profile.seed, "noise-gs"));
    alt_noise_ = detail::make_noise(profile.noise_alt_amp, alt_rng);
    spd_noise_ = detail::make_noise(profile.noise_speed_amp, spd_rng);

    const double min_speed = std::min({profile.start_speed, profile.cruise_speed, profile.final_speed});
    if (profile.noise_speed_amp >= min_speed) {
      throw InvalidArgument("speed noise amplitude must stay below the speed envelope");
    }
  }

  double duration() const { return t_end_; }
  double sample_interval() const { return profile_.sample_interval; }
  const PhaseProfile& profile() const { return profile_; }

  double altitude(double t) const { return alt_.value(t) + alt_noise_.value(t); }
  double altitude_rate(double t) const { return alt_.rate(t) + alt_noise_.rate(t); }
  double speed(double t) const { return spd_.value(t) + spd_noise_.value(t); }
  double speed_rate(double t) const { return spd_.rate(t) + spd_noise_.rate(t); }

private:
  PhaseProfile profile_;
  double t1_ = 0.0, t2_ = 0.0, t_end_ = 0.0;
  detail::RoundedTrapezoid alt_, spd_;
  detail::NoiseBand alt_noise_, spd_noise_;
};

// Samples the continuous profile at the profile's interval and lays the
// ground path along a straight seeded heading.
inline FlightTrack generate_track(const PhaseProfile& profile, const AircraftMeta& meta) {
  SyntheticFlight flight(profile);
  Rng rng(derive_seed(profile.seed, "path"));
  double lat = rng.uniform(22.0, 40.0);
  double lon = rng.uniform(100.0, 118.0);
  const double heading = rng.uniform(0.0, 2.0 * kPi);
  const double ch = std::cos(heading), sh = std::sin(heading);

  FlightTrack track;
  track.meta = meta;
  const double dt = profile.sample_interval;
  const std::size_t n = static_cast<std::size_t>(std::llround(flight.duration() / dt));
  track.points.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    TrackPoint p;
    p.t = t;
    p.lat = lat;
    p.lon = lon;
    p.alt = flight.altitude(t);
    p.gs = std::max(0.0, flight.speed(t));
    track.points.push_back(p);
    const double step_m = p.gs * dt;
    lat += step_m * ch / 111320.0;
    lon += step_m * sh / (111320.0 * std::cos(lat * kPi / 180.0));
  }
  return track;
}

// Interval fuel: composite Gauss-Legendre along the continuous profile, one
// panel per sample interval, panels split at detected sign changes of h'
// and v' so the max() kinks in the law never sit inside a panel.
inline double integrate_fuel(const FuelLaw& law, const SyntheticFlight& flight,
                             double t_a, double t_b, std::size_t points = 8) {
  if (!(t_a >= -1e-9) || !(t_b <= flight.duration() * (1.0 + 1e-12)) || !(t_a < t_b)) {
    throw InvalidArgument("integration window outside the flight span");
  }
  const double dt = flight.sample_interval();
  auto q = [&](double t) {
    return q_true(law, flight.altitude(t), flight.altitude_rate(t), flight.speed(t),
                  flight.speed_rate(t));
  };

  auto refine = [&](auto&& f, double lo, double hi) {
    // bisect the bracketed sign change of f
    double a = lo, b = hi;
    double fa = f(a);
    for (int i = 0; i < 60; ++i) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if ((fa <= 0.0) == (fm <= 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  double total = 0.0;
  const std::size_t first_cell = static_cast<std::size_t>(std::floor(t_a / dt + 1e-12));
  const std::size_t last_cell = static_cast<std::size_t>(std::ceil(t_b / dt - 1e-12));
  std::vector<double> cuts;
  for (std::size_t cell = first_cell; cell < last_cell; ++cell) {
    const double lo = std::max(t_a, static_cast<double>(cell) * dt);
    const double hi = std::min(t_b, static_cast<double>(cell + 1) * dt);
    if (!(hi > lo)) continue;
    cuts.clear();
    cuts.push_back(lo);
    const double mid = 0.5 * (lo + hi);
    auto dh = [&](double t) { return flight.altitude_rate(t); };
    auto dv = [&](double t) { return flight.speed_rate(t); };
    for (auto&& f : {std::function<double(double)>(dh), std::function<double(double)>(dv)}) {
      const double f0 = f(lo), f1 = f(mid), f2 = f(hi);
      if ((f0 <= 0.0) != (f1 <= 0.0)) cuts.push_back(refine(f, lo, mid));
      if ((f1 <= 0.0) != (f2 <= 0.0)) cuts.push_back(refine(f, mid, hi));
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] > cuts[i]) total += integrate_gauss(q, cuts[i], cuts[i + 1], points);
    }
  }
  return total;
}

struct SyntheticType {
  std::string name;
  double weight = 1.0;
  FuelLaw law;
  double wingspan = 34.0;
};

inline std::vector<SyntheticType> default_types() {
  return {
      {"NB-200", 0.45, {0.85, 0.035, 2.1e-5, 0.25, 0.35}, 34.1},
      {"WB-300", 0.20, {1.90, 0.060, 4.5e-5, 0.50, 0.40}, 60.3},
      {"RJ-100", 0.35, {0.45, 0.022, 1.3e-5, 0.15, 0.30}, 26.0},
  };
}

struct DatasetSpec {
  std::vector<SyntheticType> types = default_types();
  std::uint64_t seed = 1;
  int N_h = 50;
  int N_v = 50;
  double T_M = 7200.0;
  double min_segment = 200.0;
  double whole_flight_fraction = 0.35;
  double sample_interval = 4.0;
  // profile randomization ranges
  double climb_min = 600.0, climb_max = 1400.0;
  double cruise_min = 600.0, cruise_max = 2600.0;
  double descent_min = 500.0, descent_max = 1200.0;
  double alt_min = 7000.0, alt_max = 12000.0;
  double speed_min = 190.0, speed_max = 260.0;
  double noise_alt = 25.0;
  double noise_speed = 2.5;
};

struct SyntheticSample {
  TrainingSample sample;
  PhaseProfile profile;
  FuelLaw law;
  double seg_start = 0.0;
  double seg_end = 0.0;
};

inline std::size_t pick_type(const std::vector<SyntheticType>& types, double u) {
  double wsum = 0.0;
  for (const SyntheticType& t : types) wsum += t.weight;
  double acc = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    acc += types[i].weight / wsum;
    if (u < acc) return i;
  }
  return types.size() - 1;
}

// Sample `index` is a pure function of (spec.seed, index); datasets of
// different sizes drawn from one seed are prefixes of each other.
inline SyntheticSample make_sample(std::uint64_t index, const DatasetSpec& spec) {
  if (spec.types.empty()) throw InvalidArgument("dataset spec needs at least one type");
  Rng rng(derive_seed(spec.seed, "synth", index));
  const std::size_t type_idx = pick_type(spec.types, rng.uniform01());
  const SyntheticType& type = spec.types[type_idx];

  SyntheticSample out;
  out.law = type.law;
  PhaseProfile& profile = out.profile;
  profile.climb_duration = rng.uniform(spec.climb_min, spec.climb_max);
  profile.cruise_duration = rng.uniform(spec.cruise_min, spec.cruise_max);
  profile.descent_duration = rng.uniform(spec.descent_min, spec.descent_max);
  profile.cruise_altitude = rng.uniform(spec.alt_min, spec.alt_max);
  profile.cruise_speed = rng.uniform(spec.speed_min, spec.speed_max);
  profile.start_speed = rng.uniform(70.0, 95.0);
  profile.final_speed = rng.uniform(65.0, 90.0);
  profile.noise_alt_amp = spec.noise_alt;
  profile.noise_speed_amp = spec.noise_speed;
  profile.sample_interval = spec.sample_interval;
  profile.seed = derive_seed(spec.seed, "profile", index);

  SyntheticFlight flight(profile);
  const double duration = flight.duration();

  double a = 0.0, b = duration;
  if (rng.uniform01() >= spec.whole_flight_fraction) {
    const double min_len = std::min(spec.min_segment, duration);
    const double u = rng.uniform01();
    const double len = min_len + (duration - min_len) * u * u;  // bias short
    a = rng.uniform(0.0, duration - len);
    b = a + len;
  }
  out.seg_start = a;
  out.seg_end = b;

  TrainingSample& s = out.sample;
  s.meta.aircraft_type = type.name;
  s.meta.age = rng.uniform(1.0, 25.0);
  s.meta.wingspan = type.wingspan;
  s.q_true = integrate_fuel(type.law, flight, a, b);
  char id[32];
  std::snprintf(id, sizeof(id), "syn-%010llu", static_cast<unsigned long long>(index));
  s.flight_id = id;
  s.seg_start = a;

  FlightTrack track = generate_track(profile, s.meta);
  FlightTrack piece = (a == 0.0 && b == duration) ? track : slice_track(track, a, b);
  s.feature = featurize(piece, spec.N_h, spec.N_v, spec.T_M);
  return out;
}

inline std::vector<TrainingSample> make_dataset(std::size_t n, const DatasetSpec& spec) {
  if (n < 1) throw InvalidArgument("dataset size must be >= 1");
  std::vector<TrainingSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back(make_sample(i, spec).sample);
  }
  return samples;
}

}  // namespace fuelcalc
