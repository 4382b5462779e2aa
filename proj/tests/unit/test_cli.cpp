// Copyright (c) 2026 The gghl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gghl/cli.hpp"
#include "gghl/error.hpp"
#include "gghl/synthetic.hpp"
#include "gghl/tensor_io.hpp"

using namespace gghl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome gghl_run(std::vector<std::string> args) {
  args.insert(args.begin(), "gghl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Three annotation files plus a class list.
fs::path make_dataset(const std::string& name) {
  const fs::path root = fs::temp_directory_path() / ("gghl_cli_" + name);
  fs::remove_all(root);
  fs::create_directories(root / "ann");
  const ClassList classes({"plane", "ship", "harbor"});
  std::ofstream(root / "classes.txt") << "plane\nship\nharbor\n";
  Rng rng(101);
  for (const char* stem : {"p0001", "p0002", "p0003"}) {
    std::ofstream f(root / "ann" / (std::string(stem) + ".txt"));
    f << "imagesource:GoogleEarth\ngsd:0.5\n";
    write_dota(f, random_scene(rng, 800, 15, 3, 10, 400), classes);
  }
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("encode a directory of three files") {
  const fs::path root = make_dataset("encode");
  const auto r = gghl_run({"encode", "--input", (root / "ann").string(), "--output", (root / "out").string(),
                           "--classes", (root / "classes.txt").string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto kv = cli::parse_key_values(r.out);
  CHECK(kv.at("files") == "3");
  CHECK(kv.at("file.p0002.objects") == "15");
  for (const char* stem : {"p0001", "p0002", "p0003"}) {
    CHECK(fs::exists(root / "out" / (std::string(stem) + ".gghl")));
    const LabelTensorSet labels = read_label_tensorset(root / "out" / (std::string(stem) + ".gghl"));
    CHECK(labels.scales.size() == 3);
    CHECK(labels.scales[0].num_classes == 3);
  }
}

TEST_CASE("encode is byte-identical across runs and thread counts") {
  const fs::path root = make_dataset("determinism");
  const int max_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> reports;
  std::vector<std::string> files;
  int run_id = 0;
  for (int threads : {1, 4, max_threads, 1, 4}) {
    const fs::path out = root / ("out" + std::to_string(run_id++));
    const auto r = gghl_run({"--threads", std::to_string(threads), "encode", "--input", (root / "ann").string(),
                             "--output", out.string(), "--classes", (root / "classes.txt").string()});
    REQUIRE(r.code == 0);
    std::string report = r.out;
    // Output paths differ by directory; drop those lines.
    std::istringstream is(report);
    std::string line, kept;
    while (std::getline(is, line)) {
      if (line.find(".output=") == std::string::npos) kept += line + "\n";
    }
    reports.push_back(kept);
    std::string all;
    for (const char* stem : {"p0001", "p0002", "p0003"}) all += slurp(out / (std::string(stem) + ".gghl"));
    files.push_back(all);
  }
  for (std::size_t i = 1; i < files.size(); ++i) {
    CHECK(files[i] == files[0]);
    CHECK(reports[i] == reports[0]);
  }

  // Thread-count fallback from the environment.
  setenv("GGHL_THREADS", "3", 1);
  const auto r = gghl_run({"encode", "--input", (root / "ann").string(), "--output", (root / "env").string(),
                           "--classes", (root / "classes.txt").string()});
  unsetenv("GGHL_THREADS");
  REQUIRE(r.code == 0);
  std::string all;
  for (const char* stem : {"p0001", "p0002", "p0003"}) all += slurp(root / "env" / (std::string(stem) + ".gghl"));
  CHECK(all == files[0]);
}

TEST_CASE("gradcheck is deterministic for a fixed seed") {
  const auto a = gghl_run({"gradcheck", "--seed", "7", "--sets", "3"});
  const auto b = gghl_run({"gradcheck", "--seed", "7", "--sets", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto kv = cli::parse_key_values(a.out);
  CHECK(kv.at("result") == "PASS");
  CHECK(std::stod(kv.at("max_rel_error")) <= 1e-4);
}

TEST_CASE("eval of detections equal to the ground truth prints mAP 1") {
  const fs::path root = make_dataset("eval");
  const ClassList classes = read_class_list(root / "classes.txt");
  fs::create_directories(root / "det");
  for (const auto& entry : fs::directory_iterator(root / "ann")) {
    std::vector<Detection> dets;
    for (const auto& a : parse_dota(entry.path(), classes)) dets.push_back({canonicalize_obb(a.vertices), a.class_id, 0.9});
    std::ofstream f(root / "det" / entry.path().filename());
    write_detections(f, dets, classes);
  }
  const auto r = gghl_run({"eval", "--detections", (root / "det").string(), "--ground-truth",
                           (root / "ann").string(), "--classes", (root / "classes.txt").string()});
  REQUIRE(r.code == 0);
  const auto kv = cli::parse_key_values(r.out);
  CHECK(kv.at("map") == "1");
  CHECK(kv.at("images") == "3");
  CHECK(kv.at("class.1.name") == "ship");
}

TEST_CASE("loss, decode, stats, viz and bench reports parse") {
  const fs::path root = make_dataset("misc");
  const std::string classes = (root / "classes.txt").string();
  REQUIRE(gghl_run({"encode", "--input", (root / "ann").string(), "--output", (root / "out").string(), "--classes",
                    classes})
              .code == 0);
  const fs::path labels_path = root / "out" / "p0001.gghl";
  const LabelTensorSet labels = read_label_tensorset(labels_path);
  write_tensorset(root / "perfect.gghl", perfect_predictions(labels));

  const auto loss = gghl_run({"loss", "--labels", labels_path.string(), "--predictions",
                              (root / "perfect.gghl").string()});
  REQUIRE(loss.code == 0);
  const auto lkv = cli::parse_key_values(loss.out);
  CHECK(std::stod(lkv.at("total")) < 1e-2);
  CHECK(lkv.count("scale2.cls") == 1);

  const auto dec = gghl_run({"decode", "--predictions", (root / "perfect.gghl").string(), "--classes", classes});
  REQUIRE(dec.code == 0);
  std::istringstream is(dec.out);
  const auto dets = parse_detections(is, read_class_list(classes));
  CHECK_FALSE(dets.empty());
  const auto dec_file = gghl_run({"decode", "--predictions", (root / "perfect.gghl").string(), "--classes", classes,
                                  "--output", (root / "dets.txt").string()});
  CHECK(cli::parse_key_values(dec_file.out).at("detections") == std::to_string(dets.size()));

  const auto st = gghl_run({"stats", "--input", (root / "ann").string(), "--classes", classes});
  REQUIRE(st.code == 0);
  CHECK(cli::parse_key_values(st.out).at("files") == "3");

  const auto viz = gghl_run({"viz", "--labels", labels_path.string(), "--output", (root / "png").string()});
  REQUIRE(viz.code == 0);
  const auto vkv = cli::parse_key_values(viz.out);
  CHECK(vkv.at("scales") == "3");
  CHECK(fs::exists(vkv.at("png.2")));
  const auto viz2 = gghl_run({"viz", "--annotations", (root / "ann" / "p0002.txt").string(), "--classes", classes,
                              "--output", (root / "png").string()});
  CHECK(viz2.code == 0);

  const auto bench = gghl_run({"bench", "--iterations", "5"});
  REQUIRE(bench.code == 0);
  const auto bkv = cli::parse_key_values(bench.out);
  CHECK(std::stod(bkv.at("ms_p95")) >= std::stod(bkv.at("ms_p50")));
  CHECK(bkv.count("images_per_sec") == 1);
}

TEST_CASE("exit codes and one-line diagnostics") {
  const fs::path root = make_dataset("errors");
  const auto no_sub = gghl_run({});
  CHECK(no_sub.code == cli::kExitUsage);
  const auto bad_flag = gghl_run({"gradcheck", "--bogus"});
  CHECK(bad_flag.code == cli::kExitUsage);
  CHECK_FALSE(bad_flag.err.empty());
  const auto help = gghl_run({"--help"});
  CHECK(help.code == cli::kExitOk);

  const auto missing = gghl_run({"loss", "--labels", "/nonexistent.gghl", "--predictions", "/nonexistent.gghl"});
  CHECK(missing.code == cli::kExitRuntime);
  CHECK(missing.err.find("IoError") != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  std::ofstream(root / "ann" / "broken.txt") << "1 2 3 4 5 6 7 plane 0\n";
  const auto format = gghl_run({"stats", "--input", (root / "ann").string(), "--classes",
                                (root / "classes.txt").string()});
  CHECK(format.code == cli::kExitRuntime);
  CHECK(format.err.find("broken.txt:1") != std::string::npos);
  CHECK(std::count(format.err.begin(), format.err.end(), '\n') == 1);

  const auto bad_value = gghl_run({"bench", "--tau", "-1", "--iterations", "1"});
  CHECK(bad_value.code == cli::kExitUsage);
}

TEST_CASE("the installed binary returns the same exit codes") {
  CHECK(std::system(GGHL_CLI_PATH " gradcheck --seed 1 --sets 1 > /dev/null") == 0);
  const int status = std::system(GGHL_CLI_PATH " nonsense > /dev/null 2>&1");
  CHECK(WEXITSTATUS(status) == cli::kExitUsage);
}

TEST_CASE("key/value grammar") {
  const auto kv = cli::parse_key_values("a=1\n\nb.c_d-e=x=y\n");
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b.c_d-e") == "x=y");
  auto code_of = [](const char* text) {
    try {
      cli::parse_key_values(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code_of("novalue\n") == ErrorCode::kParseError);
  CHECK(code_of("a=1\na=2\n") == ErrorCode::kParseError);
  CHECK(code_of("bad key=1\n") == ErrorCode::kParseError);
}
