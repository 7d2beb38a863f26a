// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace uniform {

/// Desk-scale stand-in for a model zoo: a Gaussian mixture with one
/// spherical cluster per union class, predictive teachers fit per dataset on
/// label-noised samples, and descriptive teachers that are random projections
/// with some output coordinates sign-flipped.
struct SyntheticSpec {
  std::size_t datasets = 2;
  std::size_t classes_per_dataset = 8;
  std::size_t input_dim = 16;
  std::size_t samples_per_class = 50;
  /// Held-out samples per class written to a second manifest; 0 disables it.
  std::size_t test_samples_per_class = 0;
  /// Expected distance between two cluster means, in units of the
  /// per-coordinate noise standard deviation.
  double separation = 6.0;
  std::size_t predictive_per_dataset = 3;
  std::size_t descriptive = 6;
  double label_noise = 0.2;
  double feature_corruption = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticPaths {
  std::filesystem::path manifest;
  std::filesystem::path test_manifest;  // empty when no test split was requested
};

/// Writes dumps plus manifest.json (and test_manifest.json) into `out_dir`.
SyntheticPaths gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

/// Feature dimension given to the j-th predictive teacher of a dataset; the
/// first one always matches the default common dimension (16).
std::size_t predictive_feature_dim(std::size_t j);
std::size_t descriptive_feature_dim(std::size_t j);

}  // namespace uniform
