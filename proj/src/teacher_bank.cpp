// SPDX-License-Identifier: Apache-2.0
#include "uniform/teacher_bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "uniform/tensor_dump.hpp"

namespace uniform {

using nlohmann::json;

std::string to_string(TeacherKind kind) { return kind == TeacherKind::predictive ? "predictive" : "descriptive"; }

TeacherKind teacher_kind_from_string(const std::string& text) {
  if (text == "predictive") return TeacherKind::predictive;
  if (text == "descriptive") return TeacherKind::descriptive;
  throw Error("unknown teacher kind '" + text + "'");
}

json Manifest::to_json() const {
  json j;
  j["version"] = version;
  json ds = json::array();
  for (const auto& d : datasets) ds.push_back({{"name", d.name}, {"classes", d.classes}});
  j["datasets"] = ds;
  j["input_file"] = input_file;
  if (labels_file) j["labels_file"] = *labels_file;
  json ts = json::array();
  for (const auto& t : teachers) {
    json e{{"id", t.id}, {"kind", to_string(t.kind)}, {"feature_dim", t.feature_dim}, {"feature_file", t.feature_file}};
    if (t.probs_file) e["probs_file"] = *t.probs_file;
    if (t.subset) e["subset"] = *t.subset;
    ts.push_back(std::move(e));
  }
  j["teachers"] = ts;
  return j;
}

Manifest Manifest::from_json(const json& j) {
  try {
    Manifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw Error("manifest: unsupported version " + std::to_string(m.version));
    for (const auto& d : j.at("datasets")) {
      m.datasets.push_back({d.at("name").get<std::string>(), d.at("classes").get<std::vector<std::string>>()});
    }
    m.input_file = j.at("input_file").get<std::string>();
    if (j.contains("labels_file") && !j["labels_file"].is_null()) m.labels_file = j["labels_file"].get<std::string>();
    for (const auto& t : j.at("teachers")) {
      TeacherEntry e;
      e.id = t.at("id").get<std::string>();
      e.kind = teacher_kind_from_string(t.at("kind").get<std::string>());
      e.feature_dim = t.at("feature_dim").get<std::size_t>();
      e.feature_file = t.at("feature_file").get<std::string>();
      if (t.contains("probs_file")) e.probs_file = t["probs_file"].get<std::string>();
      if (t.contains("subset")) e.subset = t["subset"].get<std::vector<std::size_t>>();
      m.teachers.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& ex) {
    throw Error(std::string("manifest: ") + ex.what());
  }
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw Error("manifest '" + path.string() + "': " + ex.what());
  }
  return from_json(j);
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

std::size_t TeacherBank::num_predictive() const {
  return static_cast<std::size_t>(std::count_if(teachers.begin(), teachers.end(), [](const auto& t) { return t.predictive(); }));
}

std::size_t TeacherBank::num_descriptive() const { return teachers.size() - num_predictive(); }

std::vector<std::size_t> LabelHandle::read(const UnionLabelSpace& space, std::size_t expected_samples) const {
  const DenseMatrix raw = read_dump(path_);
  if (raw.cols() != 1) throw Error(path_.string() + ": labels dump must have dim 1");
  if (raw.rows() != expected_samples) {
    throw Error(path_.string() + ": " + std::to_string(raw.rows()) + " labels for " + std::to_string(expected_samples) +
                " samples");
  }
  std::vector<std::size_t> labels(raw.rows());
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    const double v = raw(i, 0);
    if (v < 0.0 || v != std::floor(v) || v >= static_cast<double>(space.num_classes())) {
      throw Error(path_.string() + ": label " + std::to_string(v) + " at row " + std::to_string(i) +
                  " is not a class index");
    }
    labels[i] = static_cast<std::size_t>(v);
  }
  return labels;
}

LoadedBank load_bank(const std::filesystem::path& manifest_path) {
  const Manifest manifest = Manifest::load(manifest_path);
  const auto base = manifest_path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  LoadedBank out;
  out.data.space = UnionLabelSpace::build(manifest.datasets);
  const auto input_path = resolve(manifest.input_file);
  out.data.inputs = read_dump(input_path);
  const std::size_t n = out.data.inputs.rows();
  out.data.bank.n_samples = n;

  auto check_rows = [&](const DenseMatrix& m, const std::filesystem::path& p) {
    if (m.rows() != n) {
      throw Error("sample count mismatch: '" + input_path.string() + "' has " + std::to_string(n) + " rows but '" +
                  p.string() + "' has " + std::to_string(m.rows()));
    }
  };

  std::set<std::string> ids;
  for (const auto& e : manifest.teachers) {
    if (!ids.insert(e.id).second) throw Error("manifest: duplicate teacher id '" + e.id + "'");
    TeacherRecord rec;
    rec.id = e.id;
    rec.kind = e.kind;
    const auto feat_path = resolve(e.feature_file);
    rec.features = read_dump(feat_path);
    check_rows(rec.features, feat_path);
    if (rec.features.cols() != e.feature_dim) {
      throw Error("teacher '" + e.id + "': manifest feature_dim " + std::to_string(e.feature_dim) + " but '" +
                  feat_path.string() + "' has dim " + std::to_string(rec.features.cols()));
    }
    if (e.kind == TeacherKind::predictive) {
      if (!e.probs_file) throw Error("predictive teacher '" + e.id + "' has no probs_file");
      if (!e.subset) throw Error("predictive teacher '" + e.id + "' has no subset");
      TeacherSubsetMap map{e.id, *e.subset};
      map.validate(out.data.space.num_classes());
      const auto probs_path = resolve(*e.probs_file);
      DenseMatrix probs = read_dump(probs_path);
      check_rows(probs, probs_path);
      if (probs.cols() != map.subset.size()) {
        throw Error("teacher '" + e.id + "': '" + probs_path.string() + "' has dim " + std::to_string(probs.cols()) +
                    " but subset has " + std::to_string(map.subset.size()) + " classes");
      }
      rec.probs = std::move(probs);
      rec.subset = std::move(map);
    } else if (e.probs_file || e.subset) {
      throw Error("descriptive teacher '" + e.id + "' must not carry probs_file or subset");
    }
    out.data.bank.teachers.push_back(std::move(rec));
  }
  std::sort(out.data.bank.teachers.begin(), out.data.bank.teachers.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  if (manifest.labels_file) out.labels = LabelHandle(resolve(*manifest.labels_file));
  return out;
}

}  // namespace uniform
