#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fuelcalc/errors.hpp"

namespace fuelcalc {

// One surveillance sample: seconds since flight start, WGS84 position,
// altitude in meters, ground speed in m/s.
struct TrackPoint {
  double t = 0.0;
  double lat = 0.0;
  double lon = 0.0;
  double alt = 0.0;
  double gs = 0.0;
};

struct AircraftMeta {
  std::string aircraft_type;
  double age = 0.0;       // years
  double wingspan = 0.0;  // meters
};

struct FlightTrack {
  AircraftMeta meta;
  std::vector<TrackPoint> points;

  double start_time() const { return points.front().t; }
  double end_time() const { return points.back().t; }
  double duration() const { return end_time() - start_time(); }
};

enum class TrackFormat { csv, jsonl };

inline constexpr const char* kTrackCsvHeader = "t,lat,lon,alt,gs";

namespace detail {

inline double parse_double(std::string_view text, std::size_t line_no,
                           const char* field) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw MalformedRecord("line " + std::to_string(line_no) + ": field '" +
                          field + "' is not a finite number: '" +
                          std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

inline void validate_point(const TrackPoint& p, std::size_t line_no) {
  if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon >= 180.0 ||
      p.t < 0.0) {
    throw MalformedRecord("line " + std::to_string(line_no) +
                          ": coordinate or time out of range");
  }
}

}  // namespace detail

// Reads a track from a byte stream. CSV carries no aircraft metadata, so the
// caller supplies it (sidecar file or CLI flags); JSONL may override it with
// a leading metadata object.
inline FlightTrack parse_track(std::istream& in, TrackFormat format,
                               AircraftMeta meta = {}) {
  FlightTrack track;
  track.meta = std::move(meta);
  std::string line;
  std::size_t line_no = 0;

  if (format == TrackFormat::csv) {
    bool saw_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
      if (line.empty()) continue;
      if (!saw_header) {
        if (line != kTrackCsvHeader) {
          throw MalformedRecord("line 1: expected header '" +
                                std::string(kTrackCsvHeader) + "', got '" + line + "'");
        }
        saw_header = true;
        continue;
      }
      auto fields = detail::split_csv(line);
      if (fields.size() != 5) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                              std::to_string(fields.size()));
      }
      TrackPoint p;
      p.t = detail::parse_double(fields[0], line_no, "t");
      p.lat = detail::parse_double(fields[1], line_no, "lat");
      p.lon = detail::parse_double(fields[2], line_no, "lon");
      p.alt = detail::parse_double(fields[3], line_no, "alt");
      p.gs = detail::parse_double(fields[4], line_no, "gs");
      detail::validate_point(p, line_no);
      track.points.push_back(p);
    }
    if (!saw_header) throw MalformedRecord("line 1: missing CSV header");
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!rec.is_object()) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": expected a JSON object");
      }
      if (!rec.contains("t") && rec.contains("aircraft_type")) {
        // leading metadata object
        track.meta.aircraft_type = rec.at("aircraft_type").get<std::string>();
        if (rec.contains("age")) track.meta.age = rec.at("age").get<double>();
        if (rec.contains("wingspan")) track.meta.wingspan = rec.at("wingspan").get<double>();
        continue;
      }
      TrackPoint p;
      try {
        p.t = rec.at("t").get<double>();
        p.lat = rec.at("lat").get<double>();
        p.lon = rec.at("lon").get<double>();
        p.alt = rec.at("alt").get<double>();
        p.gs = rec.at("gs").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!std::isfinite(p.t) || !std::isfinite(p.lat) || !std::isfinite(p.lon) ||
          !std::isfinite(p.alt) || !std::isfinite(p.gs)) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": non-finite field");
      }
      detail::validate_point(p, line_no);
      track.points.push_back(p);
    }
  }

  if (track.points.size() < 2) {
    throw EmptyTrack("track has " + std::to_string(track.points.size()) +
                     " points; need at least 2");
  }
  return track;
}

inline void write_track(std::ostream& out, const FlightTrack& track, TrackFormat format) {
  if (format == TrackFormat::csv) {
    out << kTrackCsvHeader << "\n";
    std::string line;
    for (const TrackPoint& p : track.points) {
      line.clear();
      detail::format_double(line, p.t);
      line += ',';
      detail::format_double(line, p.lat);
      line += ',';
      detail::format_double(line, p.lon);
      line += ',';
      detail::format_double(line, p.alt);
      line += ',';
      detail::format_double(line, p.gs);
      line += '\n';
      out << line;
    }
  } else {
    nlohmann::json meta = {{"aircraft_type", track.meta.aircraft_type},
                           {"age", track.meta.age},
                           {"wingspan", track.meta.wingspan}};
    out << meta.dump() << "\n";
    for (const TrackPoint& p : track.points) {
      nlohmann::json rec = {{"t", p.t}, {"lat", p.lat}, {"lon", p.lon},
                            {"alt", p.alt}, {"gs", p.gs}};
      out << rec.dump() << "\n";
    }
  }
}

struct CleaningConfig {
  double alt_min = -500.0;      // meters
  double alt_max = 20000.0;     // meters
  double gs_min = 0.0;          // m/s
  double gs_max = 400.0;        // m/s
  double max_climb_rate = 60.0; // |d alt / d t|, m/s
  std::size_t min_points = 10;
};

struct CleaningReport {
  std::size_t duplicates = 0;  // non-increasing timestamps
  std::size_t bounds = 0;      // altitude/speed envelope violations
  std::size_t rate = 0;        // climb-rate violations
  std::size_t removed() const { return duplicates + bounds + rate; }
};

struct CleanResult {
  FlightTrack track;
  CleaningReport report;
};

// Single pass in time order; each candidate is checked against the last
// *kept* point, which makes the operation idempotent.
inline CleanResult clean_track(const FlightTrack& input, const CleaningConfig& cfg = {}) {
  if (input.points.size() < 2) {
    throw EmptyTrack("clean_track requires at least 2 points");
  }
  CleanResult result;
  result.track.meta = input.meta;
  auto& kept = result.track.points;
  kept.reserve(input.points.size());
  for (const TrackPoint& p : input.points) {
    if (!std::isfinite(p.alt) || !std::isfinite(p.gs) || !std::isfinite(p.t) ||
        p.alt < cfg.alt_min || p.alt > cfg.alt_max || p.gs < cfg.gs_min ||
        p.gs > cfg.gs_max) {
      ++result.report.bounds;
      continue;
    }
    if (!kept.empty()) {
      const TrackPoint& prev = kept.back();
      if (p.t <= prev.t) {
        ++result.report.duplicates;
        continue;
      }
      if (std::fabs(p.alt - prev.alt) / (p.t - prev.t) > cfg.max_climb_rate) {
        ++result.report.rate;
        continue;
      }
    }
    kept.push_back(p);
  }
  if (kept.size() < cfg.min_points) {
    throw TooSparse("only " + std::to_string(kept.size()) + " points survive cleaning; need " +
                    std::to_string(cfg.min_points));
  }
  return result;
}

namespace detail {

inline TrackPoint lerp_point(const TrackPoint& a, const TrackPoint& b, double t) {
  const double w = (t - a.t) / (b.t - a.t);
  TrackPoint p;
  p.t = t;
  p.lat = a.lat + w * (b.lat - a.lat);
  p.lon = a.lon + w * (b.lon - a.lon);
  p.alt = a.alt + w * (b.alt - a.alt);
  p.gs = a.gs + w * (b.gs - a.gs);
  return p;
}

}  // namespace detail

// Returns the [t_a, t_b] portion with interpolated boundary points where the
// cut falls strictly inside the span, re-based so the slice starts at t = 0.
inline FlightTrack slice_track(const FlightTrack& track, double t_a, double t_b) {
  if (!(t_a < t_b)) throw InvalidArgument("slice_track requires t_a < t_b");
  if (track.points.size() < 2) throw EmptyTrack("slice_track requires at least 2 points");
  const double span_lo = track.start_time();
  const double span_hi = track.end_time();
  if (t_b <= span_lo || t_a >= span_hi) {
    throw EmptySlice("[" + std::to_string(t_a) + ", " + std::to_string(t_b) +
                     "] does not overlap track span [" + std::to_string(span_lo) + ", " +
                     std::to_string(span_hi) + "]");
  }
  const double lo = std::max(t_a, span_lo);
  const double hi = std::min(t_b, span_hi);

  FlightTrack out;
  out.meta = track.meta;
  const auto& pts = track.points;
  std::size_t i = 0;
  while (i < pts.size() && pts[i].t < lo) ++i;
  if (i > 0 && (i == pts.size() || pts[i].t > lo)) {
    out.points.push_back(detail::lerp_point(pts[i - 1], pts[i], lo));
  }
  while (i < pts.size() && pts[i].t <= hi) {
    out.points.push_back(pts[i]);
    ++i;
  }
  if (out.points.empty() || out.points.back().t < hi) {
    out.points.push_back(detail::lerp_point(pts[i - 1], pts[i], hi));
  }
  for (TrackPoint& p : out.points) p.t -= lo;
  if (out.points.size() < 2) {
    throw EmptySlice("slice contains fewer than 2 points");
  }
  return out;
}

struct ProfileSample {
  double alt = 0.0;
  double gs = 0.0;
};

// Piecewise-linear profile evaluation with zero extension past the last
// sample. Times before the first sample clamp to it.
inline ProfileSample eval_profile(const FlightTrack& track, double t) {
  const auto& pts = track.points;
  if (t > pts.back().t) return {0.0, 0.0};
  if (t <= pts.front().t) return {pts.front().alt, pts.front().gs};
  auto it = std::lower_bound(pts.begin(), pts.end(), t,
                             [](const TrackPoint& p, double v) { return p.t < v; });
  if (it->t == t) return {it->alt, it->gs};
  const TrackPoint& b = *it;
  const TrackPoint& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return {a.alt + w * (b.alt - a.alt), a.gs + w * (b.gs - a.gs)};
}

// Full interpolated state (position included), used by the emission gridder.
inline TrackPoint eval_position(const FlightTrack& track, double t) {
  const auto& pts = track.points;
  if (t <= pts.front().t) return pts.front();
  if (t >= pts.back().t) return pts.back();
  auto it = std::lower_bound(pts.begin(), pts.end(), t,
                             [](const TrackPoint& p, double v) { return p.t < v; });
  if (it->t == t) return *it;
  return detail::lerp_point(*(it - 1), *it, t);
}

}  // namespace fuelcalc
