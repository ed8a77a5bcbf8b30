#include "cq/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "text.hpp"

namespace cq {

std::string to_string(QualityConvention c) {
  switch (c) {
    case QualityConvention::NegatedMse: return "negated-mse";
    case QualityConvention::Psnr: return "psnr";
    case QualityConvention::AbstractPositive: return "abstract-positive";
  }
  return "abstract-positive";
}

QualityConvention quality_convention_from_string(const std::string& s) {
  if (s == "negated-mse") return QualityConvention::NegatedMse;
  if (s == "psnr") return QualityConvention::Psnr;
  if (s == "abstract-positive") return QualityConvention::AbstractPositive;
  throw ValidationError("unknown quality convention '" + s + "'");
}

std::vector<std::vector<Level>> SegmentLadder::window(int start, int count) const {
  if (start < 0 || count < 1 || start + count > num_segments())
    throw ValidationError("window [" + std::to_string(start) + ", " +
                          std::to_string(start + count) + ") out of range");
  return {segments.begin() + start, segments.begin() + start + count};
}

void SegmentLadder::validate() const {
  if (!(tau > 0)) throw ValidationError("tau must be > 0");
  if (segments.empty()) throw ValidationError("ladder has no segments");
  const size_t levels = segments.front().size();
  if (levels == 0) throw ValidationError("segment 0 has no levels");
  for (size_t n = 0; n < segments.size(); ++n) {
    const auto& seg = segments[n];
    if (seg.size() != levels)
      throw ValidationError("segment " + std::to_string(n) + ": expected " +
                            std::to_string(levels) + " levels, got " +
                            std::to_string(seg.size()));
    for (size_t l = 0; l < seg.size(); ++l) {
      if (!(seg[l].bitrate_bps > 0))
        throw ValidationError("segment " + std::to_string(n) + " level " +
                              std::to_string(l) + ": bitrate must be > 0");
      if (l > 0 && !(seg[l].bitrate_bps > seg[l - 1].bitrate_bps))
        throw ValidationError("segment " + std::to_string(n) + " level " +
                              std::to_string(l) +
                              ": bitrates must be strictly increasing");
      const double q = seg[l].quality;
      if (convention == QualityConvention::NegatedMse && q > 0)
        throw ValidationError("segment " + std::to_string(n) + " level " +
                              std::to_string(l) +
                              ": negated-mse quality must be <= 0");
      if (convention != QualityConvention::NegatedMse && !(q > 0))
        throw ValidationError("segment " + std::to_string(n) + " level " +
                              std::to_string(l) + ": quality must be > 0 under " +
                              to_string(convention));
    }
  }
}

namespace {

using text::format_double;
using text::split;

double parse_double(const std::string& s, const std::string& what, int line_no) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse " +
                          what + " from '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& what, int line_no) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse " +
                          what + " from '" + s + "'");
  }
}

}  // namespace

SegmentLadder load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");

  SegmentLadder ladder;
  bool have_tau = false, have_convention = false;
  // rows[segment][level] collected in any order, then checked for gaps
  std::map<long, std::map<long, Level>> rows;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, ',');
    if (fields.size() == 2 && fields[0] == "tau") {
      ladder.tau = parse_double(fields[1], "tau", line_no);
      have_tau = true;
      continue;
    }
    if (fields.size() == 2 && fields[0] == "quality") {
      ladder.convention = quality_convention_from_string(fields[1]);
      have_convention = true;
      continue;
    }
    if (fields.size() != 4)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'segment,level,bitrate_bps,quality', got '" +
                            line + "'");
    long seg = parse_long(fields[0], "segment index", line_no);
    long lvl = parse_long(fields[1], "level index", line_no);
    if (seg < 0 || lvl < 0)
      throw ValidationError("line " + std::to_string(line_no) + ": negative index");
    Level entry{parse_double(fields[2], "bitrate", line_no),
                parse_double(fields[3], "quality", line_no)};
    if (!rows[seg].emplace(lvl, entry).second)
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate entry for segment " +
                            std::to_string(seg) + " level " + std::to_string(lvl));
  }
  if (!have_tau) throw ValidationError("manifest is missing the 'tau,<seconds>' header");
  if (!have_convention)
    throw ValidationError("manifest is missing the 'quality,<convention>' header");
  if (rows.empty()) throw ValidationError("manifest has no segment rows");

  const long num_segments = rows.rbegin()->first + 1;
  const size_t num_levels = rows.begin()->second.size();
  ladder.segments.reserve(num_segments);
  for (long n = 0; n < num_segments; ++n) {
    auto it = rows.find(n);
    if (it == rows.end())
      throw ValidationError("segment " + std::to_string(n) + " is missing");
    const auto& by_level = it->second;
    if (by_level.size() != num_levels ||
        by_level.begin()->first != 0 ||
        by_level.rbegin()->first != static_cast<long>(num_levels) - 1)
      throw ValidationError("segment " + std::to_string(n) + ": levels must be contiguous 0.." +
                            std::to_string(num_levels - 1) + " (got " +
                            std::to_string(by_level.size()) + " entries)");
    std::vector<Level> seg;
    seg.reserve(num_levels);
    for (const auto& [lvl, entry] : by_level) seg.push_back(entry);
    ladder.segments.push_back(std::move(seg));
  }
  ladder.validate();
  return ladder;
}

void write_manifest(const SegmentLadder& ladder, const std::string& path) {
  ladder.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path + "'");
  out << "tau," << format_double(ladder.tau) << "\n";
  out << "quality," << to_string(ladder.convention) << "\n";
  for (size_t n = 0; n < ladder.segments.size(); ++n)
    for (size_t l = 0; l < ladder.segments[n].size(); ++l) {
      const Level& e = ladder.segments[n][l];
      out << n << "," << l << "," << format_double(e.bitrate_bps) << ","
          << format_double(e.quality) << "\n";
    }
  if (!out) throw IoError("write to '" + path + "' failed");
}

double mse_to_psnr(double mse, double cap) {
  if (mse < 0) throw std::domain_error("mse must be >= 0");
  if (mse == 0) return cap;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double synthetic_mse(double sigma2, double bitrate_bps, const SynthProfile& profile) {
  return sigma2 * std::pow(bitrate_bps / profile.theta, -profile.gamma);
}

namespace {

// Uniform in [0, 1) from the raw generator; distributions from <random> are
// implementation-defined, this is not.
double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

SegmentLadder gen_synthetic_ladder(uint64_t seed, int segments, int levels, double tau,
                                   const std::vector<double>& bitrate_set_bps,
                                   const SynthProfile& profile) {
  if (segments < 1) throw ValidationError("segments must be >= 1");
  if (levels < 1) throw ValidationError("levels must be >= 1");
  if (static_cast<int>(bitrate_set_bps.size()) != levels)
    throw ValidationError("bitrate_set size " + std::to_string(bitrate_set_bps.size()) +
                          " does not match levels " + std::to_string(levels));
  for (int l = 0; l < levels; ++l) {
    if (!(bitrate_set_bps[l] > 0))
      throw ValidationError("bitrate_set[" + std::to_string(l) + "] must be > 0");
    if (l > 0 && !(bitrate_set_bps[l] > bitrate_set_bps[l - 1]))
      throw ValidationError("bitrate_set must be strictly increasing");
  }
  if (!(tau > 0)) throw ValidationError("tau must be > 0");
  if (!(profile.gamma > 0) || !(profile.theta > 0))
    throw ValidationError("profile gamma and theta must be > 0");
  if (!(profile.sigma2_min > 0) || profile.sigma2_max < profile.sigma2_min)
    throw ValidationError("profile sigma2 range invalid");
  if (profile.mean_scene_len < 1) throw ValidationError("mean_scene_len must be >= 1");

  std::mt19937_64 gen(seed);
  SegmentLadder ladder;
  ladder.tau = tau;
  ladder.convention = QualityConvention::NegatedMse;
  ladder.segments.reserve(segments);

  const double log_lo = std::log(profile.sigma2_min);
  const double log_hi = std::log(profile.sigma2_max);
  int scene_left = 0;
  double sigma2 = profile.sigma2_min;
  for (int n = 0; n < segments; ++n) {
    if (scene_left == 0) {
      // scene length uniform in [1, 2*mean - 1] keeps the requested mean
      scene_left = 1 + static_cast<int>(next_uniform(gen) * (2 * profile.mean_scene_len - 1));
      sigma2 = std::exp(log_lo + next_uniform(gen) * (log_hi - log_lo));
    }
    --scene_left;
    std::vector<Level> seg(levels);
    for (int l = 0; l < levels; ++l) {
      seg[l].bitrate_bps = bitrate_set_bps[l];
      seg[l].quality = -synthetic_mse(sigma2, bitrate_set_bps[l], profile);
    }
    ladder.segments.push_back(std::move(seg));
  }
  ladder.validate();
  return ladder;
}

}  // namespace cq
