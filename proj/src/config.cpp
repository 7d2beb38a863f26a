// SPDX-License-Identifier: Apache-2.0
#include "uniform/config.hpp"

#include <fstream>
#include <set>

namespace uniform {

using nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::uniform: return "uniform";
    case Method::kd: return "kd";
    case Method::cflplus: return "cflplus";
  }
  return "?";
}

Method method_from_string(const std::string& text) {
  if (text == "uniform") return Method::uniform;
  if (text == "kd") return Method::kd;
  if (text == "cflplus") return Method::cflplus;
  throw Error("unknown method '" + text + "' (expected uniform, kd or cflplus)");
}

void TrainConfig::validate() const {
  if (alpha1 < 0 || alpha2 < 0 || beta1 < 0 || beta2 < 0) throw Error("config: loss weights must be non-negative");
  if (!(optimizer.lr >= 0.0)) throw Error("config: learning rate must be non-negative");
  if (epochs == 0) throw Error("config: epochs must be at least 1");
  if (batch_size == 0) throw Error("config: batch_size must be at least 1");
  if (common_dim == 0) throw Error("config: common_dim must be positive");
  if (!(temperature > 0.0)) throw Error("config: temperature must be positive");
  if (optimizer.momentum < 0 || optimizer.momentum >= 1) throw Error("config: momentum must be in [0, 1)");
  if (optimizer.beta1 < 0 || optimizer.beta1 >= 1 || optimizer.beta2 < 0 || optimizer.beta2 >= 1) {
    throw Error("config: adam betas must be in [0, 1)");
  }
  if (!(optimizer.eps > 0.0)) throw Error("config: adam eps must be positive");
}

json TrainConfig::to_json() const {
  json opt;
  if (optimizer.kind == OptimizerKind::adam) {
    opt = {{"type", "adam"}, {"lr", optimizer.lr}, {"b1", optimizer.beta1}, {"b2", optimizer.beta2}, {"eps", optimizer.eps}};
  } else {
    opt = {{"type", "sgd_momentum"}, {"lr", optimizer.lr}, {"momentum", optimizer.momentum}};
  }
  return {{"alpha1", alpha1},
          {"alpha2", alpha2},
          {"beta1", beta1},
          {"beta2", beta2},
          {"common_dim", common_dim},
          {"hidden", hidden},
          {"batch_size", batch_size},
          {"epochs", epochs},
          {"optimizer", opt},
          {"seed", seed},
          {"temperature", temperature},
          {"feature_metric", to_string(feature_metric)},
          {"detach_xhat", detach_xhat},
          {"logit_sign", logit_sign == LogitSign::corrected ? "corrected" : "as_printed"},
          {"method", to_string(method)}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  static const std::set<std::string> known{"alpha1", "alpha2", "beta1", "beta2", "common_dim", "hidden", "batch_size",
                                           "epochs", "optimizer", "seed", "temperature", "feature_metric",
                                           "detach_xhat", "logit_sign", "method"};
  if (!j.is_object()) throw Error("config: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error("config: unknown key '" + key + "'");
  }
  TrainConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("alpha1", c.alpha1);
    get("alpha2", c.alpha2);
    get("beta1", c.beta1);
    get("beta2", c.beta2);
    get("common_dim", c.common_dim);
    get("hidden", c.hidden);
    get("batch_size", c.batch_size);
    get("epochs", c.epochs);
    get("seed", c.seed);
    get("temperature", c.temperature);
    get("detach_xhat", c.detach_xhat);
    if (j.contains("feature_metric")) c.feature_metric = feature_metric_from_string(j["feature_metric"].get<std::string>());
    if (j.contains("method")) c.method = method_from_string(j["method"].get<std::string>());
    if (j.contains("logit_sign")) {
      const auto s = j["logit_sign"].get<std::string>();
      if (s == "corrected") {
        c.logit_sign = LogitSign::corrected;
      } else if (s == "as_printed") {
        c.logit_sign = LogitSign::as_printed;
      } else {
        throw Error("config: logit_sign must be 'corrected' or 'as_printed'");
      }
    }
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      const auto type = o.value("type", std::string("adam"));
      if (type == "adam") {
        c.optimizer.kind = OptimizerKind::adam;
        c.optimizer.lr = o.value("lr", c.optimizer.lr);
        c.optimizer.beta1 = o.value("b1", c.optimizer.beta1);
        c.optimizer.beta2 = o.value("b2", c.optimizer.beta2);
        c.optimizer.eps = o.value("eps", c.optimizer.eps);
      } else if (type == "sgd_momentum") {
        c.optimizer.kind = OptimizerKind::sgd_momentum;
        c.optimizer.lr = o.value("lr", 0.01);
        c.optimizer.momentum = o.value("momentum", c.optimizer.momentum);
      } else {
        throw Error("config: unknown optimizer type '" + type + "'");
      }
    }
  } catch (const json::exception& ex) {
    throw Error(std::string("config: ") + ex.what());
  }
  c.validate();
  return c;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw Error("config '" + path.string() + "': " + ex.what());
  }
  return from_json(j);
}

}  // namespace uniform
