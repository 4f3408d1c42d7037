#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/model.hpp"
#include "fuelcalc/monotone.hpp"
#include "fuelcalc/trajectory.hpp"

namespace fuelcalc {

struct InstantaneousFlow {
  MonotoneCurve curve;
  std::size_t repaired_points = 0;
  std::size_t total_points = 0;
};

// Builds the cumulative series Q_j = predict over [0, j*step], forces it
// strictly increasing (pool-adjacent-violators plus an epsilon ramp), and
// differentiates the monotone C2 interpolant through it. Fails when more
// than 20% of the cumulative points needed repair.
inline InstantaneousFlow instantaneous_from_model(const WideDeepModel& model,
                                                  const FlightTrack& track,
                                                  double step = 200.0) {
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  const double span = track.duration();
  if (!(span >= 3.0 * step)) {
    throw InvalidArgument("track span " + std::to_string(span) +
                          " s is shorter than 3 steps of " + std::to_string(step) + " s");
  }
  const double start = track.start_time();

  std::vector<double> T{0.0};
  double t = step;
  while (t < span - 1e-9 * std::max(1.0, span)) {
    T.push_back(t);
    t += step;
  }
  T.push_back(span);

  std::vector<double> Q(T.size(), 0.0);
  const double min_len = std::min(60.0, step);
  for (std::size_t j = 1; j < T.size(); ++j) {
    Q[j] = predict_interval(model, track, start, start + T[j], min_len);
  }

  std::vector<double> tail(Q.begin() + 1, Q.end());
  const std::size_t repaired = isotonic_repair(tail, 1e-6);
  if (repaired * 5 > tail.size()) {
    throw NonMonotoneModelOutput(std::to_string(repaired) + " of " +
                                 std::to_string(tail.size()) +
                                 " cumulative predictions needed isotonic repair");
  }
  std::copy(tail.begin(), tail.end(), Q.begin() + 1);

  InstantaneousFlow out;
  out.repaired_points = repaired;
  out.total_points = T.size();
  out.curve = build_curve(FuelSeries{std::move(T), std::move(Q)});
  return out;
}

}  // namespace fuelcalc
