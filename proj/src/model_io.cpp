#include "forest/model_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "forest/error.hpp"

namespace forest {

namespace {

constexpr const char* kChannelNames[3] = {"red", "green", "blue"};

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number()) {
    throw DataError(std::string("model JSON: missing numeric field '") + key + "'");
  }
  return doc.at(key).get<double>();
}

Json vector_json(const auto& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_json(const auto& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i)));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> read_vector(const Json& doc, const char* key) {
  const Json& arr = doc.at(key);
  if (!arr.is_array() || arr.size() != N) {
    throw DataError(std::string("model JSON: '") + key + "' must have " + std::to_string(N) +
                    " entries");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = arr.at(i).get<double>();
  return v;
}

template <int N>
Eigen::Matrix<double, N, N> read_matrix(const Json& doc, const char* key) {
  const Json& arr = doc.at(key);
  if (!arr.is_array() || arr.size() != N) {
    throw DataError(std::string("model JSON: '") + key + "' must be " + std::to_string(N) + "x" +
                    std::to_string(N));
  }
  Eigen::Matrix<double, N, N> m;
  for (int i = 0; i < N; ++i) {
    if (!arr.at(i).is_array() || arr.at(i).size() != N) {
      throw DataError(std::string("model JSON: bad row in '") + key + "'");
    }
    for (int j = 0; j < N; ++j) m(i, j) = arr.at(i).at(j).get<double>();
  }
  return m;
}

}  // namespace

std::string_view to_string(Method method) { return method == Method::Mdc ? "mdc" : "sdc"; }

Method parse_method(std::string_view text) {
  if (text == "mdc") return Method::Mdc;
  if (text == "sdc") return Method::Sdc;
  throw InvalidArgument("method must be 'mdc' or 'sdc', got '" + std::string(text) + "'");
}

Method method_of(const AnyModel& model) {
  return std::holds_alternative<MdcModel>(model) ? Method::Mdc : Method::Sdc;
}

Json to_json(const StableParams& p) {
  return Json{{"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}, {"delta", p.delta}};
}

StableParams stable_params_from_json(const Json& doc) {
  StableParams p{number(doc, "alpha"), number(doc, "beta"), number(doc, "sigma"),
                 number(doc, "delta")};
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
  return p;
}

Json to_json(const MdcModel& model) {
  Json refs = Json::array();
  for (const auto& r : model.references) {
    refs.push_back(Json{{"id", r.id},
                        {"n", r.stats.n},
                        {"mean", vector_json(r.stats.mean)},
                        {"cov", matrix_json(r.stats.cov)}});
  }
  return Json{{"method", "mdc"},
              {"threshold", model.threshold},
              {"ridge", model.ridge},
              {"references", std::move(refs)}};
}

Json to_json(const SdcModel& model) {
  Json refs = Json::array();
  for (const auto& r : model.references) {
    Json ref{{"id", r.id}};
    for (int c = 0; c < 3; ++c) {
      const auto& ch = r.channels[c];
      Json channel = to_json(ch.params);
      channel["z0"] = vector_json(ch.z0.z);
      channel["sigma_z"] = matrix_json(ch.sigma_z.m);
      ref[kChannelNames[c]] = std::move(channel);
    }
    refs.push_back(std::move(ref));
  }
  return Json{{"method", "sdc"},
              {"t", model.t},
              {"threshold", model.threshold},
              {"aggregation", std::string(to_string(model.aggregation))},
              {"ridge", model.ridge},
              {"references", std::move(refs)}};
}

Json to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

MdcModel mdc_model_from_json(const Json& doc) {
  try {
    MdcModel model;
    model.threshold = number(doc, "threshold");
    model.ridge = doc.contains("ridge") ? number(doc, "ridge") : kDefaultRidge;
    for (const auto& r : doc.at("references")) {
      MdcReference ref;
      ref.id = r.value("id", std::string{});
      ref.stats.n = r.at("n").get<std::size_t>();
      ref.stats.mean = read_vector<3>(r, "mean");
      ref.stats.cov = read_matrix<3>(r, "cov");
      model.references.push_back(std::move(ref));
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed MDC model: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid MDC model: ") + e.what());
  }
}

SdcModel sdc_model_from_json(const Json& doc) {
  try {
    SdcModel model;
    model.t = number(doc, "t");
    model.threshold = number(doc, "threshold");
    model.aggregation = parse_aggregation(doc.value("aggregation", std::string("min")));
    model.ridge = doc.contains("ridge") ? number(doc, "ridge") : kDefaultRidge;
    for (const auto& r : doc.at("references")) {
      SdcReference ref;
      ref.id = r.value("id", std::string{});
      for (int c = 0; c < 3; ++c) {
        const Json& ch = r.at(kChannelNames[c]);
        ChannelReference& out = ref.channels[c];
        out.params = stable_params_from_json(ch);
        out.z0 = EcfPoint{model.t, read_vector<2>(ch, "z0"), 0};
        out.sigma_z.m = read_matrix<2>(ch, "sigma_z");
      }
      model.references.push_back(std::move(ref));
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed SDC model: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid SDC model: ") + e.what());
  }
}

AnyModel model_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("method") || !doc.at("method").is_string()) {
    throw DataError("model JSON lacks a 'method' field");
  }
  const std::string method = doc.at("method").get<std::string>();
  if (method == "mdc") return mdc_model_from_json(doc);
  if (method == "sdc") return sdc_model_from_json(doc);
  throw DataError("unknown model method '" + method + "'");
}

Json to_json(const TrainingReport& report) {
  Json scores = Json::array();
  for (const auto& s : report.scores) {
    scores.push_back(Json{{"id", s.id},
                          {"label", std::string(to_string(s.label))},
                          {"fold", s.fold},
                          {"min_stat", number_or_null(s.min_stat)}});
  }
  Json curve = Json::array();
  for (const auto& p : report.curve) curve.push_back(Json::array({p.threshold, p.accuracy}));
  return Json{{"method", report.method},
              {"k", report.k},
              {"t_max", report.t_max},
              {"grid_steps", report.grid_steps},
              {"seed", report.seed},
              {"threshold", report.threshold},
              {"cv_accuracy", report.cv_accuracy},
              {"cv_accuracy_kind", "pooled over holdout folds"},
              {"warnings", report.warnings},
              {"accuracy_curve", std::move(curve)},
              {"scores", std::move(scores)}};
}

Json to_json(const FitReport& report) {
  Json fits = Json::array();
  for (const auto& f : report.fits) {
    Json params = Json::object();
    for (const auto& [name, value] : f.params) params[name] = value;
    Json entry{{"distribution", f.name}, {"params", std::move(params)}};
    entry["rmse"] = f.rmse ? Json(*f.rmse) : Json(nullptr);
    if (!f.note.empty()) entry["note"] = f.note;
    fits.push_back(std::move(entry));
  }
  return Json{{"n", report.n},
              {"bandwidth", report.bandwidth},
              {"grid_points", report.grid.size()},
              {"grid_min", report.grid.empty() ? 0.0 : report.grid.front()},
              {"grid_max", report.grid.empty() ? 0.0 : report.grid.back()},
              {"fits", std::move(fits)}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace forest
