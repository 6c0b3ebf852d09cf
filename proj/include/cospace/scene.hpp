#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cospace/data.hpp"

namespace cospace {

// Replaces the HS mean of `target` with the HS mean of `source` plus a displacement
// that the SRF cannot see (`amplitude`, SRF null space) and one it can (`ms_offset`,
// SRF row space). With ms_offset = 0 the two classes share an MS mean exactly.
struct MetamerSpec {
  int source = 1;
  int target = 2;
  double amplitude = 1.0;
  double ms_offset = 0.0;
};

struct SceneClass {
  std::vector<double> hs_mean;  // may be empty for a metamer target
  int size = 0;                 // paired training samples
};

struct SceneSpec {
  std::vector<SceneClass> classes;
  double noise_sigma = 0.0;
  // Per-pixel flat shift added to every HS band (and so to every MS band).
  double offset_sigma = 0.0;
  double srf_fwhm = 0.0;
  std::vector<double> ms_centers;
  std::vector<double> hs_centers;
  // MS-only test samples per class, as a multiple of that class's training size.
  double test_fraction = 1.0;
  std::uint64_t seed = 0;
  std::optional<MetamerSpec> metamer;

  void validate() const;
};

struct Scene {
  PairedDataset train;
  LabeledSamples test;  // MS features only
  SrfBank srf;
  Matrix class_hs_means;  // d_H x L, after metamer construction
  std::vector<double> ms_band_centers;
  std::vector<double> hs_band_centers;
};

SceneSpec scene_spec_from_json(const nlohmann::json& doc);
nlohmann::json scene_spec_to_json(const SceneSpec& spec);
SceneSpec load_scene_spec(const std::string& path);

// Deterministic for a fixed spec (including seed). Pixels are i.i.d. given the class:
// HS = mean + offset_sigma * N(0, 1) * 1 + noise_sigma * N(0, I), MS = SRF * HS.
Scene make_synthetic_scene(const SceneSpec& spec);

// Unit vector in the null space of the SRF (rows of `filters` annihilate it).
Vector srf_null_direction(const Matrix& filters);
// Unit vector in the row space of the SRF.
Vector srf_row_direction(const Matrix& filters);

}  // namespace cospace
