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

#include "gghl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "gghl/decoder.hpp"
#include "gghl/error.hpp"
#include "gghl/evaluator.hpp"
#include "gghl/jol_loss.hpp"
#include "gghl/label_assigner.hpp"
#include "gghl/synthetic.hpp"
#include "gghl/tensor_io.hpp"

namespace gghl::cli {

namespace fs = std::filesystem;

namespace {

struct CliConfig {
  std::vector<int> strides{8, 16, 32};
  double tau = 3.0;
  double t_iou = 0.3;
  int img_size = 800;
  std::string classes_file;
  double conf = kDefaultConfidence;
  double nms = kDefaultNmsThreshold;
  double gamma = 2.0;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: GGHL_THREADS, then logical cores

  std::string input;
  std::string output;
  std::string labels;
  std::string predictions;
  std::string detections;
  std::string ground_truth;
  std::string annotations;

  double iou = 0.5;
  int sets = 100;
  double h = 1e-5;
  int iterations = 500;
  int objects = 30;
  bool no_owam = false;
  bool no_xi = false;
  bool normalize = false;
  bool objectness_score = false;
  std::string regression = "giou";
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(const std::string& key, const T& value) {
    if constexpr (std::is_floating_point_v<T>) {
      out_ << key << '=' << num(value) << '\n';
    } else {
      out_ << key << '=' << value << '\n';
    }
  }

 private:
  std::ostream& out_;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GGHL_THREADS")) {
    int v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AssignConfig assign_config(const CliConfig& c, int num_classes) {
  if (c.strides.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--strides needs exactly three values");
  AssignConfig cfg;
  std::copy(c.strides.begin(), c.strides.end(), cfg.strides.begin());
  cfg.tau = c.tau;
  cfg.t_iou = c.t_iou;
  cfg.img_size = c.img_size;
  cfg.num_classes = num_classes;
  cfg.validate();
  return cfg;
}

ClassList load_classes(const CliConfig& c) {
  if (c.classes_file.empty()) throw Error(ErrorCode::kInvalidArgument, "--classes is required");
  return read_class_list(c.classes_file);
}

LossOptions loss_options(const CliConfig& c) {
  LossOptions o;
  o.gamma = c.gamma;
  o.owam_weights = !c.no_owam;
  o.area_normalization = !c.no_xi;
  o.normalize_by_positives = c.normalize;
  if (c.regression == "giou") {
    o.regression = RegressionTerm::kGiou;
  } else if (c.regression == "quadratic") {
    o.regression = RegressionTerm::kQuadratic;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--regression must be giou or quadratic");
  }
  return o;
}

// Annotation files of a directory (sorted), or the single file given.
std::vector<fs::path> annotation_files(const fs::path& p) {
  if (!fs::exists(p)) throw Error(ErrorCode::kIoError, "no such file or directory: " + p.string());
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(p)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void put_stats(Report& r, const std::string& prefix, const LabelTensorSet& labels,
               std::span<const ObbAnnotation> anns, const AssignDiagnostics& diag) {
  const AssignmentStats st = assignment_stats(labels, anns);
  r.put(prefix + "objects", anns.size());
  long long total = 0;
  for (long long p : st.per_object_positives) total += p;
  r.put(prefix + "positives", total);
  r.put(prefix + "mismatch", st.mismatch);
  r.put(prefix + "fallback", diag.fallback_regions.size());
  for (const auto& s : st.per_scale) {
    const std::string k = prefix + "stride" + std::to_string(s.stride) + ".";
    r.put(k + "positives", s.positives);
    r.put(k + "negatives", s.negatives);
    r.put(k + "ratio", s.ratio);
  }
  for (std::size_t b = 0; b < st.heat_histogram.size(); ++b) {
    r.put(prefix + "heat_hist." + std::to_string(b), st.heat_histogram[b]);
  }
}

int cmd_encode(const CliConfig& c, std::ostream& out) {
  const ClassList classes = load_classes(c);
  const AssignConfig cfg = assign_config(c, classes.size());
  if (c.output.empty()) throw Error(ErrorCode::kInvalidArgument, "--output is required");
  const auto files = annotation_files(c.input);
  fs::create_directories(c.output);

  struct Result {
    std::string report;
    std::optional<Error> error;
  };
  std::vector<Result> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const auto anns = parse_dota(files[i], classes);
        AssignDiagnostics diag;
        const LabelTensorSet labels = generate_heatmaps(anns, cfg, &diag);
        const fs::path dst = fs::path(c.output) / (files[i].stem().string() + ".gghl");
        write_tensorset(dst, labels);
        std::ostringstream os;
        Report r(os);
        const std::string prefix = "file." + files[i].stem().string() + ".";
        r.put(prefix + "output", dst.generic_string());
        put_stats(r, prefix, labels, anns, diag);
        results[i].report = os.str();
      } catch (const Error& e) {
        results[i].error = e;
      }
    }
  };
  const int n = std::min<int>(resolve_threads(c.threads), static_cast<int>(std::max<std::size_t>(1, files.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (const auto& res : results) {
    if (res.error) throw *res.error;
  }
  Report r(out);
  r.put("files", files.size());
  for (const auto& res : results) out << res.report;
  return kExitOk;
}

int cmd_stats(const CliConfig& c, std::ostream& out) {
  const ClassList classes = load_classes(c);
  const AssignConfig cfg = assign_config(c, classes.size());
  Report r(out);
  const auto files = annotation_files(c.input);
  r.put("files", files.size());
  for (const auto& f : files) {
    const auto anns = parse_dota(f, classes);
    AssignDiagnostics diag;
    const LabelTensorSet labels = generate_heatmaps(anns, cfg, &diag);
    put_stats(r, "file." + f.stem().string() + ".", labels, anns, diag);
  }
  return kExitOk;
}

int cmd_loss(const CliConfig& c, std::ostream& out) {
  const LabelTensorSet labels = read_label_tensorset(c.labels);
  const PredictionTensorSet preds = read_prediction_tensorset(c.predictions);
  const LossBreakdown b = total_loss(labels, preds, loss_options(c));
  Report r(out);
  r.put("obj_pos", b.obj_pos);
  r.put("obj_neg", b.obj_neg);
  r.put("obb", b.obb);
  r.put("cls", b.cls);
  r.put("total", b.total);
  r.put("positives", b.positives);
  for (std::size_t m = 0; m < b.per_scale.size(); ++m) {
    const std::string k = "scale" + std::to_string(m) + ".";
    r.put(k + "obj_pos", b.per_scale[m].obj_pos);
    r.put(k + "obj_neg", b.per_scale[m].obj_neg);
    r.put(k + "obb", b.per_scale[m].obb);
    r.put(k + "cls", b.per_scale[m].cls);
  }
  return kExitOk;
}

int cmd_gradcheck(const CliConfig& c, std::ostream& out) {
  if (c.sets < 1) throw Error(ErrorCode::kInvalidArgument, "--sets must be positive");
  const LossOptions opts = loss_options(c);
  Rng rng(c.seed);
  double worst = 0.0;
  long long checked = 0;
  long long excluded = 0;
  std::string worst_entry;
  for (int i = 0; i < c.sets; ++i) {
    const LabelTensorSet labels = random_label_set(rng, 2, 16, 3);
    const PredictionTensorSet preds = random_predictions(rng, labels);
    const FiniteDiffReport rep = finite_diff_check(labels, preds, opts, c.h);
    checked += rep.checked;
    excluded += rep.excluded;
    if (rep.max_rel_error > worst) {
      worst = rep.max_rel_error;
      worst_entry = "set " + std::to_string(i) + " " + rep.worst_entry;
    }
  }
  constexpr double kTolerance = 1e-4;
  Report r(out);
  r.put("seed", c.seed);
  r.put("sets", c.sets);
  r.put("h", c.h);
  r.put("checked", checked);
  r.put("excluded", excluded);
  r.put("max_rel_error", worst);
  r.put("worst_entry", worst_entry.empty() ? std::string("none") : worst_entry);
  r.put("tolerance", kTolerance);
  const bool pass = worst <= kTolerance;
  r.put("result", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitRuntime;
}

int cmd_decode(const CliConfig& c, std::ostream& out) {
  const ClassList classes = load_classes(c);
  const PredictionTensorSet preds = read_prediction_tensorset(c.predictions);
  for (const auto& s : preds.scales) {
    if (s.num_classes != classes.size()) {
      throw Error(ErrorCode::kShapeMismatch, "prediction class count does not match the class list");
    }
  }
  DecodeOptions opts;
  if (c.objectness_score) opts.score_mode = ScoreMode::kObjectness;
  const auto dets = rotated_nms(decode_predictions(preds, c.conf, opts), c.nms);
  if (c.output.empty()) {
    write_detections(out, dets, classes);
  } else {
    std::ofstream f(c.output);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + c.output);
    write_detections(f, dets, classes);
    Report r(out);
    r.put("detections", dets.size());
    r.put("output", c.output);
  }
  return kExitOk;
}

int cmd_eval(const CliConfig& c, std::ostream& out) {
  const ClassList classes = load_classes(c);
  std::vector<EvalImage> images;
  const fs::path gt(c.ground_truth);
  const fs::path det(c.detections);
  if (fs::is_directory(gt)) {
    if (!fs::is_directory(det)) throw Error(ErrorCode::kInvalidArgument, "--detections must be a directory too");
    for (const auto& f : annotation_files(gt)) {
      EvalImage img;
      img.ground_truth = parse_dota(f, classes);
      const fs::path d = det / f.filename();
      if (fs::exists(d)) img.detections = parse_detections(d, classes);
      images.push_back(std::move(img));
    }
  } else {
    images.push_back({parse_detections(det, classes), parse_dota(gt, classes)});
  }
  const EvalReport rep = evaluate(images, classes.size(), c.iou);
  Report r(out);
  r.put("images", images.size());
  for (const auto& cr : rep.per_class) {
    const std::string k = "class." + std::to_string(cr.class_id) + ".";
    r.put(k + "name", classes.name(cr.class_id));
    r.put(k + "num_gt", cr.num_gt);
    r.put(k + "tp", cr.tp);
    r.put(k + "fp", cr.fp);
    r.put(k + "fn", cr.fn);
    r.put(k + "ap", cr.has_ground_truth ? num(cr.ap) : std::string("none"));
  }
  r.put("classes_evaluated", rep.classes_evaluated);
  r.put("map", rep.map);
  return kExitOk;
}

int cmd_viz(const CliConfig& c, std::ostream& out) {
  if (c.output.empty()) throw Error(ErrorCode::kInvalidArgument, "--output is required");
  LabelTensorSet labels;
  std::string stem;
  if (!c.labels.empty()) {
    labels = read_label_tensorset(c.labels);
    stem = fs::path(c.labels).stem().string();
  } else if (!c.annotations.empty()) {
    const ClassList classes = load_classes(c);
    labels = generate_heatmaps(parse_dota(c.annotations, classes), assign_config(c, classes.size()));
    stem = fs::path(c.annotations).stem().string();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "one of --labels or --annotations is required");
  }
  fs::create_directories(c.output);
  Report r(out);
  r.put("scales", labels.scales.size());
  for (std::size_t m = 0; m < labels.scales.size(); ++m) {
    const fs::path p = fs::path(c.output) / (stem + "_s" + std::to_string(labels.scales[m].stride) + ".png");
    render_heatmap_png(labels, m, p);
    r.put("png." + std::to_string(m), p.generic_string());
  }
  return kExitOk;
}

int cmd_bench(const CliConfig& c, std::ostream& out) {
  if (c.iterations < 1 || c.objects < 0) throw Error(ErrorCode::kInvalidArgument, "bad --iterations or --objects");
  const AssignConfig cfg = assign_config(c, 1);
  Rng rng(c.seed);
  const auto scene = random_scene(rng, cfg.img_size, c.objects, 1);
  std::vector<double> ms(static_cast<std::size_t>(c.iterations));
  long long sink = 0;
  for (auto& t : ms) {
    const auto t0 = std::chrono::steady_clock::now();
    const LabelTensorSet labels = generate_heatmaps(scene, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    sink += static_cast<long long>(labels.scales.size());
    t = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  std::vector<double> sorted = ms;
  std::sort(sorted.begin(), sorted.end());
  auto pct = [&](double q) {
    const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()))) - 1;
    return sorted[std::min(i, sorted.size() - 1)];
  };
  double sum = 0.0;
  for (double t : ms) sum += t;
  Report r(out);
  r.put("iterations", c.iterations);
  r.put("objects", c.objects);
  r.put("img_size", cfg.img_size);
  r.put("scales", sink / c.iterations);
  r.put("ms_p50", pct(0.5));
  r.put("ms_p95", pct(0.95));
  r.put("ms_mean", sum / static_cast<double>(ms.size()));
  r.put("images_per_sec", 1000.0 * static_cast<double>(ms.size()) / sum);
  return kExitOk;
}

void add_assign_flags(CLI::App* app, CliConfig& c) {
  app->add_option("--strides", c.strides, "three feature strides")->delimiter(',')->expected(3);
  app->add_option("--tau", c.tau, "scale-routing factor")->capture_default_str();
  app->add_option("--t-iou", c.t_iou, "IoU threshold of the candidate ellipse")->capture_default_str();
  app->add_option("--img-size", c.img_size, "input image side (px)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Oriented Gaussian label assignment and loss tooling", "gghl"};
  app.require_subcommand(1);
  app.add_option("--threads", c.threads, "worker threads (default: $GGHL_THREADS, then all cores)");

  auto* encode = app.add_subcommand("encode", "annotations -> label tensor files + stats");
  encode->add_option("--input", c.input, "DOTA file or directory of .txt files")->required();
  encode->add_option("--output", c.output, "output directory")->required();
  encode->add_option("--classes", c.classes_file, "class list file")->required();
  add_assign_flags(encode, c);

  auto* stats = app.add_subcommand("stats", "assignment statistics");
  stats->add_option("--input", c.input, "DOTA file or directory of .txt files")->required();
  stats->add_option("--classes", c.classes_file, "class list file")->required();
  add_assign_flags(stats, c);

  auto* loss = app.add_subcommand("loss", "loss breakdown of a label/prediction pair");
  loss->add_option("--labels", c.labels, "label tensor file")->required();
  loss->add_option("--predictions", c.predictions, "prediction tensor file")->required();
  loss->add_option("--gamma", c.gamma, "focal exponent")->capture_default_str();
  loss->add_option("--regression", c.regression, "giou or quadratic")->capture_default_str();
  loss->add_flag("--no-owam", c.no_owam, "disable prediction-adaptive weights");
  loss->add_flag("--no-xi", c.no_xi, "disable area normalization");
  loss->add_flag("--normalize", c.normalize, "divide by the positive count");

  auto* grad = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients on random sets");
  grad->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  grad->add_option("--sets", c.sets, "number of random tensor sets")->capture_default_str();
  grad->add_option("--step", c.h, "finite-difference step")->capture_default_str();
  grad->add_option("--gamma", c.gamma, "focal exponent")->capture_default_str();
  grad->add_option("--regression", c.regression, "giou or quadratic")->capture_default_str();

  auto* decode = app.add_subcommand("decode", "prediction tensors -> detections");
  decode->add_option("--predictions", c.predictions, "prediction tensor file")->required();
  decode->add_option("--classes", c.classes_file, "class list file")->required();
  decode->add_option("--conf", c.conf, "score threshold")->capture_default_str();
  decode->add_option("--nms", c.nms, "rotated NMS IoU threshold")->capture_default_str();
  decode->add_option("--output", c.output, "detection file (default: stdout)");
  decode->add_flag("--objectness-score", c.objectness_score, "score by objectness alone");

  auto* eval = app.add_subcommand("eval", "per-class AP and mAP");
  eval->add_option("--detections", c.detections, "detection file or directory")->required();
  eval->add_option("--ground-truth", c.ground_truth, "DOTA file or directory")->required();
  eval->add_option("--classes", c.classes_file, "class list file")->required();
  eval->add_option("--iou", c.iou, "match IoU threshold")->capture_default_str();

  auto* viz = app.add_subcommand("viz", "heatmap PNGs, one per scale");
  viz->add_option("--labels", c.labels, "label tensor file");
  viz->add_option("--annotations", c.annotations, "DOTA file (labels generated on the fly)");
  viz->add_option("--classes", c.classes_file, "class list file (with --annotations)");
  viz->add_option("--output", c.output, "output directory")->required();
  add_assign_flags(viz, c);

  auto* bench = app.add_subcommand("bench", "label-generation throughput on a synthetic scene");
  bench->add_option("--iterations", c.iterations, "timed iterations")->capture_default_str();
  bench->add_option("--objects", c.objects, "objects in the scene")->capture_default_str();
  bench->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  add_assign_flags(bench, c);

  // CLI11 consumes a reversed argument list without the program name.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*encode) return cmd_encode(c, out);
    if (*stats) return cmd_stats(c, out);
    if (*loss) return cmd_loss(c, out);
    if (*grad) return cmd_gradcheck(c, out);
    if (*decode) return cmd_decode(c, out);
    if (*eval) return cmd_eval(c, out);
    if (*viz) return cmd_viz(c, out);
    if (*bench) return cmd_bench(c, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    const std::string_view key = line.substr(0, eq);
    const bool key_ok = eq != std::string_view::npos && !key.empty() &&
                        std::all_of(key.begin(), key.end(), [](char ch) {
                          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-';
                        });
    if (!key_ok) throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": expected key=value");
    if (!out.emplace(std::string(key), std::string(line.substr(eq + 1))).second) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": duplicate key");
    }
  }
  return out;
}

}  // namespace gghl::cli
