// Drives the forestdetect executable end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "forest/image_io.hpp"
#include "forest/model_io.hpp"
#include "forest/simulate.hpp"

namespace fs = std::filesystem;
using forest::Json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "forestdetect_test_cli";

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  fs::create_directories(kRoot);
  const fs::path out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
  const std::string cmd = std::string("\"") + FORESTDETECT_EXE + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kParams = R"({
  "forest": {"red": {"alpha": 1.7, "beta": 0, "sigma": 0.02, "delta": 0.16},
             "green": {"alpha": 1.7, "beta": 0, "sigma": 0.02, "delta": 0.24},
             "blue": {"alpha": 1.7, "beta": 0, "sigma": 0.02, "delta": 0.2}},
  "non_forest": {"red": {"alpha": 1.5, "beta": 0, "sigma": 0.03, "delta": 0.3},
                 "green": {"alpha": 1.5, "beta": 0, "sigma": 0.03, "delta": 0.33},
                 "blue": {"alpha": 1.5, "beta": 0, "sigma": 0.03, "delta": 0.28}}})";

// Simulated tile set and split scene shared by the cases below.
struct Fixture {
  fs::path dir = kRoot / "data";
  fs::path params = dir / "params.json";
  fs::path tiles = dir / "tiles";
  fs::path scene = dir / "scene";

  Fixture() {
    if (fs::exists(scene / "manifest.json")) return;
    fs::create_directories(dir);
    std::ofstream(params) << kParams;
    REQUIRE(run("simulate --params " + q(params) + " --layout tiles --count 200 --seed 3 --out-dir " + q(tiles)).code == 0);
    REQUIRE(run("simulate --params " + q(params) + " --layout split --rows 200 --cols 200 --seed 4 --out-dir " + q(scene)).code == 0);
  }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("train --manifest x.json --method knn").code == 2);
  CHECK(run("train").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("simulate writes a deterministic tile set and a split scene") {
  Fixture f;
  const Json manifest = forest::read_json(f.tiles / "manifest.json");
  CHECK(manifest["images"].size() == 400);
  CHECK(manifest["images"][0]["label"] == "forest");
  const Json truth = forest::read_json(f.scene / "manifest.json");
  CHECK(truth["regions"].size() == 2);
  CHECK(truth["regions"][0]["label"] == "forest");
  CHECK(truth["regions"][0]["col_end"] == 100);
  CHECK(truth["tiles"].size() == 400);

  const fs::path again = kRoot / "again";
  REQUIRE(run("simulate --params " + q(f.params) + " --layout split --rows 200 --cols 200 --seed 4 --out-dir " + q(again)).code == 0);
  CHECK(slurp(again / "scene.png") == slurp(f.scene / "scene.png"));
  CHECK(slurp(again / "manifest.json") == slurp(f.scene / "manifest.json"));
  REQUIRE(run("simulate --params " + q(f.params) + " --layout split --rows 200 --cols 200 --seed 5 --out-dir " + q(again)).code == 0);
  CHECK(slurp(again / "scene.png") != slurp(f.scene / "scene.png"));
}

TEST_CASE("train writes a model and report, byte-identical for a fixed seed") {
  Fixture f;
  for (const std::string method : {"mdc", "sdc"}) {
    const fs::path model = kRoot / (method + "_model.json"), report = kRoot / (method + "_report.json");
    const std::string args = "train --manifest " + q(f.tiles / "manifest.json") + " --method " + method +
                             " --seed 11 --out " + q(model) + " --report " + q(report);
    const Run r = run(args);
    REQUIRE(r.code == 0);
    const Json rep = forest::read_json(report);
    CHECK(rep["cv_accuracy"] == 1.0);
    CHECK(rep["method"] == method);
    CHECK(forest::read_json(model)["method"] == method);
    const std::string first = slurp(model), first_report = slurp(report);
    REQUIRE(run(args).code == 0);
    CHECK(slurp(model) == first);
    CHECK(slurp(report) == first_report);
  }
}

TEST_CASE("training flags reach the model") {
  Fixture f;
  const fs::path model = kRoot / "flags_model.json";
  REQUIRE(run("train --manifest " + q(f.tiles / "manifest.json") +
              " --method sdc --cf-t 4 --aggregation max --k 4 --grid-steps 200 --t-max 50 --ridge 1e-8 --out " + q(model)).code == 0);
  const Json m = forest::read_json(model);
  CHECK(m["t"] == 4.0);
  CHECK(m["aggregation"] == "max");
  CHECK(m["ridge"] == 1e-8);
}

TEST_CASE("a single-label manifest is a data error") {
  Fixture f;
  Json manifest = forest::read_json(f.tiles / "manifest.json");
  Json forest_only = Json::array();
  for (const auto& e : manifest["images"]) {
    if (e["label"] == "forest") {
      Json copy = e;
      copy["path"] = (f.tiles / e["path"].get<std::string>()).string();
      forest_only.push_back(copy);
    }
  }
  const fs::path path = kRoot / "forest_only.json";
  forest::write_json(forest_only, path);
  const Run r = run("train --manifest " + q(path) + " --out " + q(kRoot / "never.json"));
  CHECK(r.code == 3);
  CHECK(r.err.find("non-forest") != std::string::npos);
  CHECK(run("train --manifest " + q(kRoot / "missing.json")).code == 3);
}

TEST_CASE("classify renders the split scene") {
  Fixture f;
  for (const std::string method : {"mdc", "sdc"}) {
    const fs::path model = kRoot / (method + "_scene_model.json");
    REQUIRE(run("train --manifest " + q(f.tiles / "manifest.json") + " --method " + method + " --out " + q(model)).code == 0);
    const fs::path mask = kRoot / (method + "_mask.png"), csv = kRoot / (method + "_scores.csv");
    const Run r = run("classify --image " + q(f.scene / "scene.png") + " --model " + q(model) +
                      " --tile-size 10 --mask " + q(mask) + " --scores " + q(csv));
    REQUIRE(r.code == 0);
    int rows = 0, cols = 0;
    const auto px = forest::read_gray8(mask, rows, cols);
    CHECK(rows == 20);
    CHECK(cols == 20);
    int forest_left = 0, agree = 0;
    for (int rr = 0; rr < 20; ++rr) {
      for (int c = 0; c < 20; ++c) {
        const bool white = px[static_cast<std::size_t>(rr * 20 + c)] == 255;
        if (c < 10 && white) ++forest_left;
        agree += white == (c < 10);
      }
    }
    CHECK(forest_left >= 198);  // >= 99% of forest-region tiles
    CHECK(agree >= 392);        // >= 98% overall

    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "tile_row,tile_col,t_min,label");
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 400);

    const fs::path big = kRoot / (method + "_mask_big.png");
    REQUIRE(run("classify --image " + q(f.scene / "scene.png") + " --model " + q(model) +
                " --mask " + q(big) + " --upscale 10").code == 0);
    forest::read_gray8(big, rows, cols);
    CHECK(rows == 200);
  }
}

TEST_CASE("classify errors and warnings") {
  Fixture f;
  const fs::path model = kRoot / "err_model.json";
  REQUIRE(run("train --manifest " + q(f.tiles / "manifest.json") + " --out " + q(model)).code == 0);

  SUBCASE("image smaller than the tile") {
    const Run r = run("classify --image " + q(f.tiles / "forest_0000.png") + " --model " + q(model) +
                      " --tile-size 20 --mask " + q(kRoot / "x.png"));
    CHECK(r.code == 2);
  }
  SUBCASE("unreadable image") {
    CHECK(run("classify --image " + q(kRoot / "nothing.png") + " --model " + q(model) + " --mask " + q(kRoot / "x.png")).code == 3);
  }
  SUBCASE("model / method mismatch") {
    CHECK(run("classify --image " + q(f.scene / "scene.png") + " --model " + q(model) +
              " --method sdc --mask " + q(kRoot / "x.png")).code == 3);
  }
  SUBCASE("constant saturated image gives an all-black mask and a warning") {
    forest::RgbImage white;
    white.red = Eigen::MatrixXd::Ones(40, 40);
    white.green = white.red;
    white.blue = white.red;
    forest::write_rgb16(white, kRoot / "white.png");
    const Run r = run("classify --image " + q(kRoot / "white.png") + " --model " + q(model) + " --mask " + q(kRoot / "white_mask.png"));
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    int rows = 0, cols = 0;
    const auto px = forest::read_gray8(kRoot / "white_mask.png", rows, cols);
    CHECK(rows == 4);
    for (auto v : px) CHECK(v == 0);
  }
  SUBCASE("chi-square level overrides the threshold") {
    const Run r = run("classify --image " + q(f.scene / "scene.png") + " --model " + q(model) +
                      " --chi2-level 0.05 --mask " + q(kRoot / "chi.png"));
    CHECK(r.code == 0);
    CHECK(run("classify --image " + q(f.scene / "scene.png") + " --model " + q(model) +
              " --chi2-level 1.5 --mask " + q(kRoot / "chi.png")).code == 2);
  }
}

TEST_CASE("eval writes per-image scores and an error rate") {
  Fixture f;
  const fs::path model = kRoot / "eval_model.json";
  REQUIRE(run("train --manifest " + q(f.tiles / "manifest.json") + " --method sdc --out " + q(model)).code == 0);
  const fs::path test = kRoot / "eval_tiles";
  REQUIRE(run("simulate --params " + q(f.params) + " --layout tiles --count 25 --seed 99 --out-dir " + q(test)).code == 0);
  const fs::path csv = kRoot / "eval.csv", report = kRoot / "eval.json";
  REQUIRE(run("eval --manifest " + q(test / "manifest.json") + " --model " + q(model) + " --scores " + q(csv) + " --report " + q(report)).code == 0);
  const Json rep = forest::read_json(report);
  CHECK(rep["images"] == 50);
  CHECK(rep["error_rate"] == 0.0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,label,predicted,t_min");
  std::getline(in, line);
  CHECK(line.rfind("forest_0000.png,forest,forest,", 0) == 0);
}

TEST_CASE("fit-report from a sample file and from an image") {
  Fixture f;
  const fs::path sample = kRoot / "sample.txt";
  {
    std::ofstream out(sample);
    for (double v : forest::sample_stable({1.5, 0.0, 0.02, 0.2}, 1000, 5)) out << v << '\n';
  }
  const fs::path prefix = kRoot / "fit";
  const Run r = run("fit-report --sample " + q(sample) + " --out " + q(prefix) + " --grid-csv");
  REQUIRE(r.code == 0);
  const Json doc = forest::read_json(prefix.string() + ".json");
  REQUIRE(doc.contains("sample"));
  CHECK(doc["sample"]["fits"].size() == 3);
  CHECK(slurp(prefix.string() + ".txt").find("Stable") != std::string::npos);
  std::ifstream grid(prefix.string() + "_sample.csv");
  std::string line;
  std::getline(grid, line);
  CHECK(line == "x,empirical,Normal,Gamma,Stable");

  const fs::path img_prefix = kRoot / "fit_img";
  REQUIRE(run("fit-report --image " + q(f.scene / "scene.png") + " --out " + q(img_prefix)).code == 0);
  const Json img = forest::read_json(img_prefix.string() + ".json");
  CHECK(img.contains("red"));
  CHECK(img.contains("blue"));

  std::ofstream(kRoot / "short.txt") << "0.1 0.2 0.3\n";
  CHECK(run("fit-report --sample " + q(kRoot / "short.txt") + " --out " + q(prefix)).code == 2);
  std::ofstream(kRoot / "words.txt") << "0.1 zebra\n";
  CHECK(run("fit-report --sample " + q(kRoot / "words.txt") + " --out " + q(prefix)).code == 3);
}
