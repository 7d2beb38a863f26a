// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "uniform/config.hpp"
#include "uniform/rng.hpp"
#include "uniform/synthetic.hpp"
#include "uniform/teacher_bank.hpp"

namespace uniform::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Random in-memory instance: D_in=3, C=2, two predictive teachers (feature
/// dims 2 and 3, subsets {0,1} and {1}) plus `descriptive` descriptive ones.
TrainingSet tiny_training_set(Rng& rng, std::size_t samples, std::size_t descriptive = 0);

/// D=2, one hidden layer of width 3, alpha1 != alpha2 so the decoupling is
/// exercised.
TrainConfig tiny_config();

/// Small synthetic spec that trains in well under a second.
SyntheticSpec small_spec(std::uint64_t seed);

std::string read_text(const std::filesystem::path& path);

}  // namespace uniform::testing
