// forestdetect: train, apply and inspect the forest/non-forest tile detectors.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical degeneracy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "CLI11.hpp"

#include "forest/detector.hpp"
#include "forest/error.hpp"
#include "forest/fit_report.hpp"
#include "forest/image_io.hpp"
#include "forest/model_io.hpp"
#include "forest/simulate.hpp"
#include "forest/trainer.hpp"

namespace fs = std::filesystem;
using namespace forest;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct SharedOptions {
  std::string method = "mdc";
  int tile_size = 10;
  int k = 5;
  double t_max = 0.0;
  int grid_steps = kDefaultGridSteps;
  double cf_t = kDefaultCfArgument;
  std::string aggregation = "min";
  std::uint64_t seed = 0;
  double ridge = kDefaultRidge;
  double divisor = kDefaultNormalizeDivisor;
  double self_check_level = SdcTrainOptions{}.self_check_level;
};

struct ImageArgs {
  std::string image;
  std::string red, green, blue;

  ImageSource source() const {
    ImageSource s;
    if (!image.empty()) {
      s.packed = image;
    } else if (!red.empty() && !green.empty() && !blue.empty()) {
      s.bands = {red, green, blue};
    } else {
      throw InvalidArgument("give --image or all of --red/--green/--blue");
    }
    return s;
  }
};

void add_image_args(CLI::App* cmd, ImageArgs& args) {
  cmd->add_option("--image", args.image, "Packed RGB image (PNG/PGM/TIFF)");
  cmd->add_option("--red", args.red, "Red band image");
  cmd->add_option("--green", args.green, "Green band image");
  cmd->add_option("--blue", args.blue, "Blue band image");
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- train ---------------------------------------------------------------

void run_train(const SharedOptions& opt, const std::string& manifest, const std::string& model_out,
               const std::string& report_out) {
  const LabeledDataset dataset = load_dataset(manifest, opt.divisor);
  dataset.require_both_labels();
  CvConfig cfg{opt.k, opt.t_max, opt.grid_steps, opt.seed};

  AnyModel model;
  TrainingReport report;
  if (parse_method(opt.method) == Method::Mdc) {
    auto trained = cross_validate_mdc(dataset, cfg, opt.ridge);
    model = std::move(trained.model);
    report = std::move(trained.report);
  } else {
    SdcTrainOptions sdc{opt.cf_t, parse_aggregation(opt.aggregation), opt.ridge, {},
                        opt.self_check_level};
    auto trained = cross_validate_sdc(dataset, cfg, sdc);
    model = std::move(trained.model);
    report = std::move(trained.report);
  }
  for (const auto& w : report.warnings) warn(w);

  ensure_parent(model_out);
  save_model(model, model_out);
  if (!report_out.empty()) {
    ensure_parent(report_out);
    write_json(to_json(report), report_out);
  }
  std::cout << "method " << report.method << "  images " << dataset.size() << "  threshold "
            << report.threshold << "  pooled CV accuracy " << report.cv_accuracy << '\n';
}

// --- classify ------------------------------------------------------------

void apply_chi2_level(AnyModel& model, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("--chi2-level must lie in (0, 1)");
  const int dof = method_of(model) == Method::Mdc ? 3 : 2;
  const double threshold =
      boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), 1.0 - level);
  std::visit([&](auto& m) { m.threshold = threshold; }, model);
}

void run_classify(const SharedOptions& opt, bool method_given, const ImageArgs& image_args,
                  const std::string& model_path, const std::string& mask_out,
                  const std::string& scores_out, int upscale, std::optional<double> chi2_level) {
  AnyModel model = load_model(model_path);
  if (method_given && parse_method(opt.method) != method_of(model)) {
    throw DataError("model file holds a " + std::string(to_string(method_of(model))) +
                    " model, but --method " + opt.method + " was requested");
  }
  if (chi2_level) apply_chi2_level(model, *chi2_level);

  const ImageSource source = image_args.source();
  const RgbImage image = read_image(source, opt.divisor);
  const ClassifiedImage result = classify_image(image, model, opt.tile_size, source.describe());
  if (result.constant_tiles > 0) {
    warn(std::to_string(result.constant_tiles) +
         " tile(s) have a constant channel (saturated or empty); they are scored as degenerate");
  }
  ensure_parent(mask_out);
  write_mask(result.mask, mask_out, upscale);
  if (!scores_out.empty()) {
    ensure_parent(scores_out);
    write_scores_csv(result.scores, scores_out);
  }
  std::size_t forest_tiles = 0;
  for (const bool f : result.mask.forest) forest_tiles += f ? 1 : 0;
  std::cout << "tiles " << result.mask.rows << "x" << result.mask.cols << "  forest "
            << forest_tiles << "/" << result.mask.forest.size() << '\n';
}

// --- eval ----------------------------------------------------------------

void run_eval(const SharedOptions& opt, const std::string& manifest, const std::string& model_path,
              const std::string& scores_out, const std::string& report_out) {
  const AnyModel model = load_model(model_path);
  const LabeledDataset dataset = load_dataset(manifest, opt.divisor);
  std::size_t errors = 0;
  std::ofstream csv;
  if (!scores_out.empty()) {
    ensure_parent(scores_out);
    csv.open(scores_out);
    if (!csv) throw DataError("cannot write " + scores_out);
    csv << "id,label,predicted,t_min\n";
  }
  for (const auto& item : dataset.items()) {
    const Decision d = classify_pixels(item.pixels, model);
    errors += d.label != item.label ? 1 : 0;
    if (csv.is_open()) {
      csv << item.id << ',' << to_string(item.label) << ',' << to_string(d.label) << ','
          << format_double(d.t_min) << '\n';
    }
  }
  const double error_rate =
      dataset.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(dataset.size());
  if (!report_out.empty()) {
    ensure_parent(report_out);
    write_json(Json{{"method", std::string(to_string(method_of(model)))},
                    {"images", dataset.size()},
                    {"errors", errors},
                    {"error_rate", error_rate},
                    {"accuracy", 1.0 - error_rate}},
               report_out);
  }
  std::cout << "images " << dataset.size() << "  errors " << errors << "  error rate "
            << error_rate << '\n';
}

// --- fit-report ----------------------------------------------------------

std::vector<double> read_sample_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw DataError(path.string() + ": not a number: '" + token + "'");
    }
  }
  return values;
}

void write_fit_table(std::ostream& out, const std::string& label, const FitReport& report) {
  out << "# " << label << "  n=" << report.n << "  bandwidth=" << report.bandwidth << '\n';
  out << "distribution  rmse          params\n";
  for (const auto& f : report.fits) {
    char head[64];
    std::snprintf(head, sizeof head, "%-13s %-13s ", f.name.c_str(),
                  f.rmse ? format_double(*f.rmse).substr(0, 12).c_str() : "-");
    out << head;
    for (const auto& [name, value] : f.params) out << name << '=' << value << ' ';
    if (!f.note.empty()) out << "(" << f.note << ")";
    out << '\n';
  }
}

void write_fit_grid(const fs::path& path, const FitReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "x,empirical";
  for (const auto& f : report.fits) out << ',' << f.name;
  out << '\n';
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    out << format_double(report.grid[i]) << ',' << format_double(report.empirical[i]);
    for (const auto& f : report.fits) {
      out << ',' << (f.density.empty() ? std::string() : format_double(f.density[i]));
    }
    out << '\n';
  }
}

void run_fit_report(const SharedOptions& opt, const ImageArgs& image_args,
                    const std::string& sample_file, const std::string& out_prefix, bool grid_csv) {
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  if (!sample_file.empty()) {
    samples.emplace_back("sample", read_sample_file(sample_file));
  } else {
    const RgbImage image = read_image(image_args.source(), opt.divisor);
    const PixelMatrix pixels = to_pixel_matrix(image);
    const char* names[3] = {"red", "green", "blue"};
    for (int c = 0; c < 3; ++c) {
      const auto col = pixels.channel(c);
      samples.emplace_back(names[c], std::vector<double>(col.begin(), col.end()));
    }
  }

  Json doc = Json::object();
  ensure_parent(out_prefix + ".json");
  std::ofstream table(out_prefix + ".txt");
  if (!table) throw DataError("cannot write " + out_prefix + ".txt");
  for (const auto& [name, values] : samples) {
    const FitReport report = fit_report(values);
    doc[name] = to_json(report);
    write_fit_table(table, name, report);
    write_fit_table(std::cout, name, report);
    if (grid_csv) write_fit_grid(out_prefix + "_" + name + ".csv", report);
  }
  write_json(doc, out_prefix + ".json");
}

// --- simulate ------------------------------------------------------------

void run_simulate(const SharedOptions& opt, const std::string& params_path,
                  const std::string& layout, const std::string& out_dir, int rows, int cols,
                  int count) {
  const SimulationParams params = simulation_params_from_json(read_json(params_path));
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  if (layout == "split") {
    const RgbImage scene = simulate_split(params.forest, params.non_forest, rows, cols, opt.seed);
    write_rgb16(scene, dir / "scene.png", opt.divisor);
    Json regions = Json::array();
    regions.push_back(Json{{"label", "forest"}, {"col_begin", 0}, {"col_end", cols / 2}});
    regions.push_back(Json{{"label", "non-forest"}, {"col_begin", cols / 2}, {"col_end", cols}});
    Json tiles = Json::array();
    if (opt.tile_size >= 2 && opt.tile_size <= std::min(rows, cols)) {
      for (int r = 0; r < rows / opt.tile_size; ++r) {
        for (int c = 0; c < cols / opt.tile_size; ++c) {
          const Label truth =
              split_tile_truth(c, opt.tile_size, cols, Label::Forest, Label::NonForest);
          tiles.push_back(Json{{"tile_row", r}, {"tile_col", c},
                               {"label", std::string(to_string(truth))}});
        }
      }
    }
    write_json(Json{{"layout", "split"},
                    {"image", "scene.png"},
                    {"rows", rows},
                    {"cols", cols},
                    {"seed", opt.seed},
                    {"normalize_divisor", opt.divisor},
                    {"params", to_json(params)},
                    {"regions", std::move(regions)},
                    {"tile_size", opt.tile_size},
                    {"tiles", std::move(tiles)}},
               dir / "manifest.json");
    std::cout << "wrote " << (dir / "scene.png").string() << '\n';
  } else if (layout == "tiles") {
    if (count < 1) throw InvalidArgument("--count must be positive");
    std::mt19937_64 rng(opt.seed);
    Json images = Json::array();
    for (const Label label : {Label::Forest, Label::NonForest}) {
      const ChannelLaws& laws = label == Label::Forest ? params.forest : params.non_forest;
      const std::string prefix = label == Label::Forest ? "forest_" : "nonforest_";
      for (int i = 0; i < count; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "%s%04d.png", prefix.c_str(), i);
        write_rgb16(simulate_patch(laws, opt.tile_size, opt.tile_size, rng), dir / name,
                    opt.divisor);
        images.push_back(Json{{"path", name}, {"label", std::string(to_string(label))},
                              {"id", std::string(name)}});
      }
    }
    write_json(Json{{"layout", "tiles"},
                    {"seed", opt.seed},
                    {"tile_size", opt.tile_size},
                    {"normalize_divisor", opt.divisor},
                    {"params", to_json(params)},
                    {"images", std::move(images)}},
               dir / "manifest.json");
    std::cout << "wrote " << 2 * count << " tiles to " << dir.string() << '\n';
  } else {
    throw InvalidArgument("--layout must be 'split' or 'tiles'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forest / non-forest detection on RGB Earth-observation tiles"};
  app.require_subcommand(1);
  SharedOptions opt;

  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--tile-size", opt.tile_size, "Tile edge length p in pixels")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
    cmd->add_option("--normalize-divisor", opt.divisor,
                    "Digital numbers are divided by this and clamped to 1")
        ->capture_default_str();
  };

  // train
  auto* train = app.add_subcommand("train", "Cross-validate a threshold and write a model");
  std::string manifest, model_out = "model.json", report_out;
  train->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
  train->add_option("--method", opt.method, "mdc or sdc")
      ->check(CLI::IsMember({"mdc", "sdc"}))
      ->capture_default_str();
  train->add_option("--out", model_out, "Model file")->capture_default_str();
  train->add_option("--report", report_out, "Training report (JSON)");
  train->add_option("--k", opt.k, "Number of folds")->capture_default_str();
  train->add_option("--t-max", opt.t_max, "Threshold grid upper bound (default: method-specific)");
  train->add_option("--grid-steps", opt.grid_steps, "Threshold grid steps")->capture_default_str();
  train->add_option("--cf-t", opt.cf_t, "CF argument t (sdc)")->capture_default_str();
  train->add_option("--aggregation", opt.aggregation, "Channel aggregation (sdc): min or max")
      ->check(CLI::IsMember({"min", "max"}))
      ->capture_default_str();
  train->add_option("--ridge", opt.ridge, "Diagonal regularization")->capture_default_str();
  train->add_option("--self-check-level", opt.self_check_level,
                    "Drop forest references whose own pixels reject their fitted laws at this "
                    "chi-square level (sdc; 0 keeps all)")
      ->capture_default_str();
  add_shared(train);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Classify every tile of an image");
  ImageArgs image_args;
  std::string model_path, mask_out = "mask.png", scores_out;
  int upscale = 1;
  std::optional<double> chi2_level;
  add_image_args(classify_cmd, image_args);
  classify_cmd->add_option("--model", model_path, "Model file")->required();
  classify_cmd->add_option("--mask", mask_out, "Output mask PNG")->capture_default_str();
  classify_cmd->add_option("--scores", scores_out, "Per-tile score CSV");
  classify_cmd->add_option("--upscale", upscale, "Draw each tile as NxN mask pixels")
      ->capture_default_str();
  auto* method_opt = classify_cmd->add_option("--method", opt.method, "Expected model method")
                         ->check(CLI::IsMember({"mdc", "sdc"}));
  classify_cmd->add_option("--chi2-level", chi2_level,
                           "Replace the trained threshold by the chi-square upper quantile at this "
                           "significance level");
  add_shared(classify_cmd);

  // eval
  auto* eval = app.add_subcommand("eval", "Score a labelled manifest with a model");
  std::string eval_report;
  eval->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--scores", scores_out, "Per-image CSV: id,label,predicted,t_min");
  eval->add_option("--report", eval_report, "Summary JSON");
  add_shared(eval);

  // fit-report
  auto* fit = app.add_subcommand("fit-report", "Compare Normal, Gamma and stable density fits");
  std::string sample_file, out_prefix = "fit";
  bool grid_csv = false;
  add_image_args(fit, image_args);
  fit->add_option("--sample", sample_file, "Whitespace-separated values instead of an image");
  fit->add_option("--out", out_prefix, "Output prefix for .json/.txt")->capture_default_str();
  fit->add_flag("--grid-csv", grid_csv, "Also write the density grid as CSV");
  add_shared(fit);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic scene or tile set");
  std::string params_path, layout = "split", out_dir = "sim";
  int rows = 200, cols = 200, count = 100;
  sim->add_option("--params", params_path, "Per-class stable laws (JSON)")->required();
  sim->add_option("--layout", layout, "split (two-region scene) or tiles (labelled tile set)")
      ->check(CLI::IsMember({"split", "tiles"}))
      ->capture_default_str();
  sim->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  sim->add_option("--rows", rows, "Scene height (split)")->capture_default_str();
  sim->add_option("--cols", cols, "Scene width (split)")->capture_default_str();
  sim->add_option("--count", count, "Tiles per class (tiles)")->capture_default_str();
  add_shared(sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) {
      run_train(opt, manifest, model_out, report_out);
    } else if (*classify_cmd) {
      run_classify(opt, method_opt->count() > 0, image_args, model_path, mask_out, scores_out,
                   upscale, chi2_level);
    } else if (*eval) {
      run_eval(opt, manifest, model_path, scores_out, eval_report);
    } else if (*fit) {
      run_fit_report(opt, image_args, sample_file, out_prefix, grid_csv);
    } else if (*sim) {
      run_simulate(opt, params_path, layout, out_dir, rows, cols, count);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateError& e) {
    std::cerr << "error: numerical degeneracy: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
