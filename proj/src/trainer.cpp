// SPDX-License-Identifier: Apache-2.0
#include "uniform/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <system_error>

#include "uniform/optimizer.hpp"
#include "uniform/tensor_dump.hpp"

namespace uniform {

using nlohmann::json;

namespace {

void check_finite(const LossBreakdown& l, std::size_t epoch, std::size_t step) {
  const std::pair<const char*, double> parts[] = {
      {"logit", l.logit}, {"feature", l.feature}, {"rec", l.rec}, {"total", l.total}};
  for (const auto& [name, value] : parts) {
    if (!std::isfinite(value)) {
      throw Error("non-finite loss component '" + std::string(name) + "' at epoch " + std::to_string(epoch) +
                  ", step " + std::to_string(step));
    }
  }
}

}  // namespace

TrainResult train(const TrainingSet& data, const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = data.inputs.rows();
  if (n == 0) throw Error("train: no samples");

  TrainResult result{Model::create(data, config), {}};
  result.report.config = config;
  Model& model = result.model;
  const auto params = model.params();
  Optimizer optimizer(config.optimizer);
  BatchObjective objective(data, config, resolve_threads(options.threads));
  Rng shuffle_rng = Rng(config.seed).fork("shuffle");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t first = 0; first < n; first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - first);
      const std::span<const std::size_t> batch(order.data() + first, count);
      const LossBreakdown l = objective.evaluate(batch, model);
      ++step;
      check_finite(l, epoch, step);
      if (l.clamped) ++result.report.clamped_steps;
      // Sample-weighted, so the epoch value is the mean over samples.
      const double w = static_cast<double>(count) / static_cast<double>(n);
      log.logit += w * l.logit;
      log.feature += w * l.feature;
      log.rec += w * l.rec;
      optimizer.step(params);
    }
    log.total = log.logit + config.beta1 * log.feature + config.beta2 * log.rec;
    result.report.epochs.push_back(log);
    if (options.on_epoch) options.on_epoch(log);
  }
  result.report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<std::size_t> predict_all(const StudentModel& student, const DenseMatrix& inputs) {
  std::vector<std::size_t> out(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    out[i] = predict(student.classify(student.student_features(inputs.row(i)).output));
  }
  return out;
}

Metrics evaluate_student(const StudentModel& student, const DenseMatrix& inputs, std::span<const std::size_t> labels,
                         const UnionLabelSpace& space) {
  const auto predictions = predict_all(student, inputs);
  return compute_metrics(predictions, labels, space);
}

TrainResult train_to_checkpoint(const std::filesystem::path& manifest_path, const TrainConfig& config,
                                const std::filesystem::path& out_dir, const TrainOptions& options) {
  const LoadedBank loaded = load_bank(manifest_path);
  TrainResult result = train(loaded.data, config, options);
  // Match the float32 checkpoint, so report metrics equal a later evaluate().
  for (const auto& p : result.model.params()) {
    for (double& v : p.value) v = static_cast<double>(static_cast<float>(v));
  }
  if (loaded.labels) {
    const auto labels = loaded.labels->read(loaded.data.space, loaded.data.inputs.rows());
    result.report.final_metrics = evaluate_student(result.model.student, loaded.data.inputs, labels, loaded.data.space);
  }
  save_checkpoint(out_dir, result.model, config);
  write_json(out_dir / "report.json", report_to_json(result.report, loaded.data.space));
  return result;
}

Metrics evaluate(const std::filesystem::path& checkpoint_dir, const std::filesystem::path& manifest_path) {
  const LoadedBank loaded = load_bank(manifest_path);
  if (!loaded.labels) throw Error("evaluate: manifest '" + manifest_path.string() + "' has no labels_file");
  const Checkpoint ckpt = load_checkpoint(checkpoint_dir);
  if (ckpt.model.student.input_dim() != loaded.data.inputs.cols() ||
      ckpt.model.student.num_classes() != loaded.data.space.num_classes()) {
    throw Error("evaluate: checkpoint '" + checkpoint_dir.string() + "' does not match manifest '" +
                manifest_path.string() + "' (input dim or class count)");
  }
  const auto labels = loaded.labels->read(loaded.data.space, loaded.data.inputs.rows());
  return evaluate_student(ckpt.model.student, loaded.data.inputs, labels, loaded.data.space);
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error("'" + path.string() + "': " + ex.what());
  }
}

void save_checkpoint(const std::filesystem::path& dir, const Model& model, const TrainConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create checkpoint directory '" + dir.string() + "'");

  Model copy = model;
  std::string blob;
  json entries = json::array();
  for (const auto& p : copy.params()) {
    const std::size_t rows = p.rows;
    const std::size_t cols = p.cols;
    const DenseMatrix m(rows, cols, std::vector<double>(p.value.begin(), p.value.end()));
    const std::string bytes = encode_dump(m);
    entries.push_back({{"name", p.name}, {"rows", rows}, {"cols", cols}, {"offset", blob.size()}, {"bytes", bytes.size()}});
    blob += bytes;
  }

  const StudentShape shape = copy.student.shape();
  json adapters = json::array();
  for (const auto& a : copy.adapters) adapters.push_back({{"id", a.teacher_id}, {"feature_dim", a.feature_dim()}});
  const json index{{"format", "uniform-checkpoint"},
                   {"version", 1},
                   {"params_file", "params.bin"},
                   {"student",
                    {{"input_dim", shape.input_dim},
                     {"hidden", shape.hidden},
                     {"feature_dim", shape.feature_dim},
                     {"num_classes", shape.num_classes},
                     {"temperature", shape.temperature}}},
                   {"adapters", adapters},
                   {"params", entries}};
  write_file_bytes(dir / "params.bin", blob);
  write_json(dir / "index.json", index);
  write_json(dir / "config.json", config.to_json());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const json index = read_json(dir / "index.json");
  Checkpoint ckpt;
  ckpt.config = TrainConfig::from_json(read_json(dir / "config.json"));
  try {
    if (index.at("format") != "uniform-checkpoint" || index.at("version") != 1) {
      throw Error("'" + (dir / "index.json").string() + "' is not a version 1 checkpoint index");
    }
    const auto& s = index.at("student");
    StudentShape shape;
    shape.input_dim = s.at("input_dim").get<std::size_t>();
    shape.hidden = s.at("hidden").get<std::vector<std::size_t>>();
    shape.feature_dim = s.at("feature_dim").get<std::size_t>();
    shape.num_classes = s.at("num_classes").get<std::size_t>();
    shape.temperature = s.at("temperature").get<double>();
    Rng unused(0);
    ckpt.model.student = StudentModel::create(shape, unused);
    for (const auto& a : index.at("adapters")) {
      ckpt.model.adapters.push_back(TeacherAdapter::create(a.at("id").get<std::string>(),
                                                           a.at("feature_dim").get<std::size_t>(), shape.feature_dim,
                                                           unused));
    }
    const std::string blob = read_file_bytes(dir / index.at("params_file").get<std::string>());
    std::map<std::string, json> by_name;
    for (const auto& e : index.at("params")) by_name[e.at("name").get<std::string>()] = e;
    const auto params = ckpt.model.params();
    if (params.size() != by_name.size()) throw Error("checkpoint: parameter count does not match architecture");
    for (const auto& p : params) {
      const auto it = by_name.find(p.name);
      if (it == by_name.end()) throw Error("checkpoint: missing parameter '" + p.name + "'");
      const auto offset = it->second.at("offset").get<std::size_t>();
      const auto bytes = it->second.at("bytes").get<std::size_t>();
      if (offset + bytes > blob.size()) throw Error("checkpoint: parameter '" + p.name + "' exceeds params.bin");
      const DenseMatrix m = decode_dump(std::string_view(blob).substr(offset, bytes), "params.bin:" + p.name);
      if (m.size() != p.value.size()) throw Error("checkpoint: shape mismatch for '" + p.name + "'");
      std::copy(m.flat().begin(), m.flat().end(), p.value.begin());
    }
  } catch (const json::exception& ex) {
    throw Error("checkpoint '" + dir.string() + "': " + ex.what());
  }
  return ckpt;
}

json metrics_to_json(const Metrics& m, const UnionLabelSpace& space) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json datasets = json::array();
  for (std::size_t d = 0; d < m.per_dataset_acc.size(); ++d) {
    datasets.push_back({{"name", space.datasets().at(d).name},
                        {"accuracy", opt(m.per_dataset_acc[d])},
                        {"samples", m.per_dataset_count[d]}});
  }
  json classes = json::array();
  for (std::size_t c = 0; c < m.per_class_acc.size(); ++c) {
    classes.push_back({{"label", space.class_label(c)}, {"accuracy", opt(m.per_class_acc[c])}});
  }
  return {{"avg_d", m.avg_d},
          {"avg_c", m.avg_c},
          {"classes_evaluated", m.classes_evaluated},
          {"classes_excluded", m.classes_excluded},
          {"per_dataset", datasets},
          {"per_class", classes}};
}

Metrics metrics_from_json(const json& j) {
  try {
    Metrics m;
    auto opt = [](const json& v) { return v.is_null() ? std::optional<double>{} : std::optional<double>{v.get<double>()}; };
    m.avg_d = j.at("avg_d").get<double>();
    m.avg_c = j.at("avg_c").get<double>();
    m.classes_evaluated = j.at("classes_evaluated").get<std::size_t>();
    m.classes_excluded = j.at("classes_excluded").get<std::size_t>();
    for (const auto& d : j.at("per_dataset")) {
      m.per_dataset_acc.push_back(opt(d.at("accuracy")));
      m.per_dataset_count.push_back(d.at("samples").get<std::size_t>());
    }
    for (const auto& c : j.at("per_class")) m.per_class_acc.push_back(opt(c.at("accuracy")));
    return m;
  } catch (const json::exception& ex) {
    throw Error(std::string("metrics: ") + ex.what());
  }
}

json report_to_json(const TrainReport& r, const UnionLabelSpace& space) {
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"logit", e.logit}, {"feature", e.feature}, {"rec", e.rec}, {"total", e.total}});
  }
  return {{"method", to_string(r.config.method)},
          {"seed", r.config.seed},
          {"config", r.config.to_json()},
          {"epochs", epochs},
          {"final_metrics", r.final_metrics ? metrics_to_json(*r.final_metrics, space) : json(nullptr)},
          {"clamped_steps", r.clamped_steps},
          {"wall_clock_seconds", r.wall_clock_seconds}};
}

TrainReport report_from_json(const json& j) {
  try {
    TrainReport r;
    r.config = TrainConfig::from_json(j.at("config"));
    for (const auto& e : j.at("epochs")) {
      r.epochs.push_back({e.at("epoch").get<std::size_t>(), e.at("logit").get<double>(), e.at("feature").get<double>(),
                          e.at("rec").get<double>(), e.at("total").get<double>()});
    }
    if (!j.at("final_metrics").is_null()) r.final_metrics = metrics_from_json(j["final_metrics"]);
    r.clamped_steps = j.at("clamped_steps").get<std::size_t>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return r;
  } catch (const json::exception& ex) {
    throw Error(std::string("report: ") + ex.what());
  }
}

}  // namespace uniform
