#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cq/errors.hpp"

namespace cq {

enum class QualityConvention { NegatedMse, Psnr, AbstractPositive };

std::string to_string(QualityConvention c);
QualityConvention quality_convention_from_string(const std::string& s);

// One encoding option of a segment: average bitrate and the quality that
// encode achieves, in whatever metric the ladder's convention declares.
struct Level {
  double bitrate_bps = 0;
  double quality = 0;
};

// Per-segment, per-level bitrate/quality table. Bitrates are strictly
// increasing within a segment; qualities need not be (VBR encodes can
// invert locally).
struct SegmentLadder {
  double tau = 0;  // seconds of content per segment
  QualityConvention convention = QualityConvention::AbstractPositive;
  std::vector<std::vector<Level>> segments;  // [segment][level]

  int num_segments() const { return static_cast<int>(segments.size()); }
  int num_levels() const {
    return segments.empty() ? 0 : static_cast<int>(segments.front().size());
  }

  // Copy of the per-step level lists for segments [start, start + count).
  std::vector<std::vector<Level>> window(int start, int count) const;

  void validate() const;  // throws ValidationError naming segment/level
};

SegmentLadder load_manifest(const std::string& path);
void write_manifest(const SegmentLadder& ladder, const std::string& path);

// 10*log10(255^2 / mse); mse == 0 maps to `cap` decibels instead of infinity.
double mse_to_psnr(double mse, double cap = 100.0);

// Power-law rate-distortion model: mse = sigma2 * (bitrate/theta)^(-gamma),
// with sigma2 a per-scene complexity level. Produces the quality fluctuation
// CBR ladders show on mixed content.
struct SynthProfile {
  double theta = 1e6;        // reference bitrate, bits/s
  double gamma = 1.2;        // decay exponent, > 0
  double sigma2_min = 5.0;   // scene complexity (MSE at theta) range
  double sigma2_max = 300.0;
  int mean_scene_len = 8;    // segments per scene, on average
};

double synthetic_mse(double sigma2, double bitrate_bps, const SynthProfile& profile);

// Deterministic for a given seed; emits negated-MSE qualities.
SegmentLadder gen_synthetic_ladder(uint64_t seed, int segments, int levels, double tau,
                                   const std::vector<double>& bitrate_set_bps,
                                   const SynthProfile& profile = {});

}  // namespace cq
