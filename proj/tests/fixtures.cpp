// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "uniform/nn.hpp"

namespace uniform::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("uniform_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform(-1.5, 1.5);
  return m;
}

DenseMatrix random_probs(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Vec z(cols);
    for (double& v : z) v = rng.uniform(-2.0, 2.0);
    const Vec p = softmax(z);
    std::copy(p.begin(), p.end(), m.row(i).begin());
  }
  return m;
}

}  // namespace

TrainingSet tiny_training_set(Rng& rng, std::size_t samples, std::size_t descriptive) {
  TrainingSet data;
  const std::vector<DatasetClasses> datasets{{"a", {"x"}}, {"b", {"y"}}};
  data.space = UnionLabelSpace::build(datasets);
  data.inputs = random_matrix(rng, samples, 3);
  data.bank.n_samples = samples;

  TeacherRecord t0;
  t0.id = "t0";
  t0.kind = TeacherKind::predictive;
  t0.features = random_matrix(rng, samples, 2);
  t0.probs = random_probs(rng, samples, 2);
  t0.subset = TeacherSubsetMap{"t0", {0, 1}};
  data.bank.teachers.push_back(std::move(t0));

  TeacherRecord t1;
  t1.id = "t1";
  t1.kind = TeacherKind::predictive;
  t1.features = random_matrix(rng, samples, 3);
  t1.probs = DenseMatrix(samples, 1, 1.0);
  t1.subset = TeacherSubsetMap{"t1", {1}};
  data.bank.teachers.push_back(std::move(t1));

  for (std::size_t j = 0; j < descriptive; ++j) {
    TeacherRecord d;
    d.id = "u" + std::to_string(j);
    d.kind = TeacherKind::descriptive;
    d.features = random_matrix(rng, samples, 2 + j % 3);
    data.bank.teachers.push_back(std::move(d));
  }
  return data;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.common_dim = 2;
  c.hidden = {3};
  c.alpha1 = 1.7;
  c.alpha2 = 0.6;
  c.beta1 = 0.9;
  c.beta2 = 0.3;
  c.batch_size = 4;
  c.epochs = 1;
  return c;
}

SyntheticSpec small_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.datasets = 2;
  s.classes_per_dataset = 3;
  s.input_dim = 6;
  s.samples_per_class = 10;
  s.test_samples_per_class = 4;
  s.predictive_per_dataset = 2;
  s.descriptive = 2;
  s.seed = seed;
  return s;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace uniform::testing
