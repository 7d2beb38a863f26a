// SPDX-License-Identifier: Apache-2.0
#include "uniform/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <system_error>
#include <vector>

#include "uniform/nn.hpp"
#include "uniform/teacher_bank.hpp"
#include "uniform/tensor_dump.hpp"

namespace uniform {
namespace {

struct Split {
  DenseMatrix inputs;
  std::vector<std::size_t> labels;
};

Split sample_split(const DenseMatrix& means, std::size_t per_class, Rng rng) {
  const std::size_t C = means.rows();
  const std::size_t dim = means.cols();
  std::vector<std::size_t> order(C * per_class);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.fork("order").shuffle(order);
  Split s{DenseMatrix(C * per_class, dim), std::vector<std::size_t>(C * per_class)};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t c = order[k] / per_class;
    s.labels[k] = c;
    for (std::size_t d = 0; d < dim; ++d) s.inputs(k, d) = means(c, d) + rng.normal();
  }
  return s;
}

DenseMatrix labels_matrix(const std::vector<std::size_t>& labels) {
  DenseMatrix m(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) m(i, 0) = static_cast<double>(labels[i]);
  return m;
}

AffineBlock random_projection(Rng& rng, std::size_t in, std::size_t out) {
  DenseMatrix w(out, in);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : w.flat()) v = scale * rng.normal();
  Vec b(out);
  for (double& v : b) v = 0.1 * rng.normal();
  return AffineBlock(std::move(w), std::move(b));
}

DenseMatrix project_all(const AffineBlock& block, const DenseMatrix& inputs) {
  DenseMatrix out(inputs.rows(), block.out_dim());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    const Vec h = block.forward(inputs.row(i));
    std::copy(h.begin(), h.end(), out.row(i).begin());
  }
  return out;
}

// Multinomial logistic regression by full-batch gradient descent.
AffineBlock fit_softmax(const std::vector<Vec>& feats, const std::vector<std::size_t>& labels, std::size_t classes) {
  const std::size_t dim = feats.front().size();
  AffineBlock model = AffineBlock::zeros(dim, classes);
  constexpr int kIterations = 300;
  constexpr double kRate = 0.5;
  constexpr double kDecay = 1e-3;
  const double inv_n = 1.0 / static_cast<double>(feats.size());
  for (int it = 0; it < kIterations; ++it) {
    model.zero_grads();
    for (std::size_t i = 0; i < feats.size(); ++i) {
      Vec g = softmax(model.forward(feats[i]));
      g[labels[i]] -= 1.0;
      for (double& v : g) v *= inv_n;
      model.backward(feats[i], g);
    }
    auto w = model.weight.flat();
    auto gw = model.grad_weight.flat();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= kRate * (gw[k] + kDecay * w[k]);
    for (std::size_t k = 0; k < model.bias.size(); ++k) model.bias[k] -= kRate * model.grad_bias[k];
  }
  model.zero_grads();
  return model;
}

DenseMatrix predict_all(const AffineBlock& classifier, const DenseMatrix& feats) {
  DenseMatrix out(feats.rows(), classifier.out_dim());
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    const Vec p = softmax(classifier.forward(feats.row(i)));
    std::copy(p.begin(), p.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (datasets == 0 || classes_per_dataset == 0 || input_dim == 0 || samples_per_class == 0 ||
      predictive_per_dataset == 0) {
    throw Error("synthetic spec: counts must be at least 1 (descriptive and test samples may be 0)");
  }
  if (label_noise < 0 || label_noise > 1 || feature_corruption < 0 || feature_corruption > 1) {
    throw Error("synthetic spec: noise and corruption rates must lie in [0, 1]");
  }
  if (!(separation >= 0)) throw Error("synthetic spec: separation must be non-negative");
}

std::size_t predictive_feature_dim(std::size_t j) {
  constexpr std::array<std::size_t, 3> dims{16, 24, 12};
  return dims[j % dims.size()];
}

std::size_t descriptive_feature_dim(std::size_t j) {
  constexpr std::array<std::size_t, 4> dims{20, 12, 32, 16};
  return dims[j % dims.size()];
}

SyntheticPaths gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error("cannot create output directory '" + out_dir.string() + "'");
  }

  const Rng root(spec.seed);
  const std::size_t C = spec.datasets * spec.classes_per_dataset;

  std::vector<DatasetClasses> datasets;
  for (std::size_t k = 0; k < spec.datasets; ++k) {
    DatasetClasses ds{"ds" + std::to_string(k), {}};
    for (std::size_t c = 0; c < spec.classes_per_dataset; ++c) ds.classes.push_back("class" + std::to_string(c));
    datasets.push_back(std::move(ds));
  }

  DenseMatrix means(C, spec.input_dim);
  {
    Rng rng = root.fork("means");
    const double scale = spec.separation / std::sqrt(2.0 * static_cast<double>(spec.input_dim));
    for (double& v : means.flat()) v = scale * rng.normal();
  }
  const Split train = sample_split(means, spec.samples_per_class, root.fork("train"));
  const bool with_test = spec.test_samples_per_class > 0;
  const Split test = with_test ? sample_split(means, spec.test_samples_per_class, root.fork("test")) : Split{};

  Manifest manifest;
  manifest.datasets = datasets;
  manifest.input_file = "inputs.bin";
  manifest.labels_file = "labels.bin";
  Manifest test_manifest = manifest;
  test_manifest.input_file = "test_inputs.bin";
  test_manifest.labels_file = "test_labels.bin";

  write_dump(out_dir / "inputs.bin", train.inputs);
  write_dump(out_dir / "labels.bin", labels_matrix(train.labels));
  if (with_test) {
    write_dump(out_dir / "test_inputs.bin", test.inputs);
    write_dump(out_dir / "test_labels.bin", labels_matrix(test.labels));
  }

  auto add_teacher = [&](TeacherEntry entry, const DenseMatrix& train_feats, const DenseMatrix& test_feats,
                         const DenseMatrix* train_probs, const DenseMatrix* test_probs) {
    const std::string stem = "teacher_" + entry.id;
    entry.feature_file = stem + "_features.bin";
    write_dump(out_dir / entry.feature_file, train_feats);
    if (train_probs != nullptr) {
      entry.probs_file = stem + "_probs.bin";
      write_dump(out_dir / *entry.probs_file, *train_probs);
    }
    TeacherEntry test_entry = entry;
    if (with_test) {
      test_entry.feature_file = "test_" + entry.feature_file;
      write_dump(out_dir / test_entry.feature_file, test_feats);
      if (test_probs != nullptr) {
        test_entry.probs_file = "test_" + *entry.probs_file;
        write_dump(out_dir / *test_entry.probs_file, *test_probs);
      }
    }
    manifest.teachers.push_back(std::move(entry));
    test_manifest.teachers.push_back(std::move(test_entry));
  };

  for (std::size_t k = 0; k < spec.datasets; ++k) {
    const std::size_t offset = k * spec.classes_per_dataset;
    std::vector<std::size_t> subset(spec.classes_per_dataset);
    std::iota(subset.begin(), subset.end(), offset);
    for (std::size_t j = 0; j < spec.predictive_per_dataset; ++j) {
      const std::string id = "p" + std::to_string(k) + "_" + std::to_string(j);
      Rng rng = root.fork("teacher/" + id);
      const AffineBlock proj = random_projection(rng, spec.input_dim, predictive_feature_dim(j));
      const DenseMatrix train_feats = project_all(proj, train.inputs);

      // Fit on this dataset's samples only, with a noised copy of the labels.
      std::vector<Vec> fit_x;
      std::vector<std::size_t> fit_y;
      for (std::size_t i = 0; i < train.labels.size(); ++i) {
        const std::size_t label = train.labels[i];
        if (label < offset || label >= offset + spec.classes_per_dataset) continue;
        std::size_t local = label - offset;
        if (spec.classes_per_dataset > 1 && rng.uniform() < spec.label_noise) {
          const auto other = static_cast<std::size_t>(rng.below(spec.classes_per_dataset - 1));
          local = other >= local ? other + 1 : other;
        }
        fit_x.emplace_back(train_feats.row(i).begin(), train_feats.row(i).end());
        fit_y.push_back(local);
      }
      const AffineBlock classifier = fit_softmax(fit_x, fit_y, spec.classes_per_dataset);

      const DenseMatrix train_probs = predict_all(classifier, train_feats);
      DenseMatrix test_feats, test_probs;
      if (with_test) {
        test_feats = project_all(proj, test.inputs);
        test_probs = predict_all(classifier, test_feats);
      }
      TeacherEntry e;
      e.id = id;
      e.kind = TeacherKind::predictive;
      e.feature_dim = proj.out_dim();
      e.subset = subset;
      add_teacher(std::move(e), train_feats, test_feats, &train_probs, with_test ? &test_probs : nullptr);
    }
  }

  for (std::size_t j = 0; j < spec.descriptive; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "d%02zu", j);
    const std::string id = buf;
    Rng rng = root.fork("teacher/" + id);
    AffineBlock proj = random_projection(rng, spec.input_dim, descriptive_feature_dim(j));
    std::vector<std::size_t> rows(proj.out_dim());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    rng.shuffle(rows);
    const auto flips = static_cast<std::size_t>(std::lround(spec.feature_corruption * static_cast<double>(rows.size())));
    for (std::size_t r = 0; r < flips; ++r) {
      for (double& v : proj.weight.row(rows[r])) v = -v;
      proj.bias[rows[r]] = -proj.bias[rows[r]];
    }
    TeacherEntry e;
    e.id = id;
    e.kind = TeacherKind::descriptive;
    e.feature_dim = proj.out_dim();
    add_teacher(std::move(e), project_all(proj, train.inputs), with_test ? project_all(proj, test.inputs) : DenseMatrix{},
                nullptr, nullptr);
  }

  SyntheticPaths paths;
  paths.manifest = out_dir / "manifest.json";
  manifest.save(paths.manifest);
  if (with_test) {
    paths.test_manifest = out_dir / "test_manifest.json";
    test_manifest.save(paths.test_manifest);
  }
  return paths;
}

}  // namespace uniform
