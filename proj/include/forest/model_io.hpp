#pragma once

#include <filesystem>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "forest/fit_report.hpp"
#include "forest/mdc.hpp"
#include "forest/sdc.hpp"
#include "forest/trainer.hpp"

namespace forest {

using Json = nlohmann::ordered_json;

enum class Method { Mdc, Sdc };
std::string_view to_string(Method method);
Method parse_method(std::string_view text);

using AnyModel = std::variant<MdcModel, SdcModel>;
Method method_of(const AnyModel& model);

Json to_json(const MdcModel& model);
Json to_json(const SdcModel& model);
Json to_json(const AnyModel& model);
Json to_json(const TrainingReport& report);
Json to_json(const FitReport& report);
Json to_json(const StableParams& params);

/// Throws DataError on a malformed document.
MdcModel mdc_model_from_json(const Json& doc);
SdcModel sdc_model_from_json(const Json& doc);
AnyModel model_from_json(const Json& doc);
StableParams stable_params_from_json(const Json& doc);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; identical input gives identical bytes.
void write_json(const Json& doc, const std::filesystem::path& path);

inline void save_model(const AnyModel& model, const std::filesystem::path& path) {
  write_json(to_json(model), path);
}
inline AnyModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

}  // namespace forest
