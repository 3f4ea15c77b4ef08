// screenseg command-line tool: analyze, eval, anchors, nms-bench, gen, gradcheck.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "screenseg/screenseg.hpp"

namespace fs = std::filesystem;
using namespace screenseg;
using nlohmann::json;

namespace {

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SCREENSEG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

/// Runs fn(i) for i in [0, n) on `threads` workers. Results must be written
/// to per-index slots; the first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

Granularity parse_granularity(const std::string& s) {
  if (s == "char") return Granularity::Character;
  if (s == "word") return Granularity::Word;
  if (s == "line") return Granularity::Line;
  throw InputError("--granularity must be char, word or line");
}

TextSource parse_text_source(const std::string& s) {
  if (s == "ip") return TextSource::Ip;
  if (s == "dnn") return TextSource::Dnn;
  if (s == "both") return TextSource::Both;
  throw InputError("--text-source must be ip, dnn or both");
}

Backend parse_backend(const std::string& s, const AnchorConfig& anchors) {
  if (s == "heuristic") return HeuristicBackend{};
  const auto eq = s.find('=');
  if (eq != std::string::npos) {
    const auto kind = s.substr(0, eq);
    const auto path = s.substr(eq + 1);
    if (kind == "proposals") return ProposalsBackend{load_proposals(path)};
    if (kind == "tensor") return TensorBackend{load_tensor(path, anchors)};
  }
  throw InputError("--backend must be heuristic, proposals=FILE or tensor=FILE");
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string image;
  std::string backend = "heuristic";
  std::string scoremaps;
  std::string granularity = "line";
  std::string text_source = "ip";
  bool no_grids = false;
  std::string out;
  std::string overlay;
  bool timing = false;
};

int run_analyze(const AnalyzeArgs& a) {
  const RgbImage img = read_image(a.image);
  PipelineConfig cfg;
  cfg.granularity = parse_granularity(a.granularity);
  cfg.text_source = parse_text_source(a.text_source);
  cfg.grids = !a.no_grids;
  const Backend backend = parse_backend(a.backend, cfg.anchors);
  std::optional<ScoreMapPair> maps;
  if (!a.scoremaps.empty()) maps = load_score_maps(a.scoremaps);

  const auto t0 = std::chrono::steady_clock::now();
  const Analysis result = analyze(img, cfg, backend, maps ? &*maps : nullptr);
  const double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = tree_to_json(result.tree, img.width, img.height).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  if (!a.overlay.empty()) write_png(a.overlay, draw_overlay(img, result.tree));
  if (a.timing) {
    std::fprintf(stderr, "timing  %dx%d\n", img.width, img.height);
    for (const auto& t : result.timings) std::fprintf(stderr, "  %-12s %9.2f ms\n", t.stage.c_str(), t.ms);
    std::fprintf(stderr, "  %-12s %9.2f ms\n", "total", total);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

std::vector<ScoredBox> scored_detector_blocks(const std::vector<Block>& blocks) {
  std::vector<ScoredBox> out;
  for (const auto& b : blocks) {
    if (is_detector_class(b.cls)) out.push_back(ScoredBox{b.cls, b.rect, b.score});
  }
  return out;
}

/// Predictions for one image: a layout tree, an annotation-shaped file
/// (optional per-object "score"), or a proposals .jsonl file.
std::vector<ScoredBox> load_predictions(const fs::path& path) {
  if (path.extension() == ".jsonl") return to_scored(load_proposals(path.string()));
  const json j = read_json(path.string());
  if (j.contains("root")) return scored_detector_blocks(flatten_tree(tree_from_json(j)));
  try {
    std::vector<ScoredBox> out;
    const auto a = annotation_from_json(j);
    const auto& objs = j.at("objects");
    for (std::size_t i = 0; i < a.objects.size(); ++i) {
      const double score = objs[i].value("score", 1.0);
      check_score(score);
      if (is_detector_class(a.objects[i].cls)) out.push_back(ScoredBox{a.objects[i].cls, a.objects[i].rect, score});
    }
    return out;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<fs::path> annotation_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json" && e.path().filename() != "manifest.json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir, double iou_thresh, bool as_json, int threads) {
  if (!(iou_thresh > 0 && iou_thresh <= 1)) throw InputError("--iou must lie in (0, 1]");
  if (!fs::is_directory(pred_dir)) throw InputError(pred_dir + " is not a directory");
  const auto gts = annotation_files(gt_dir);
  if (gts.empty()) throw InputError("no annotation files in " + gt_dir);
  std::vector<ImageMatch> matches(gts.size());
  std::vector<int> missing(gts.size(), 0);
  parallel_for(gts.size(), threads, [&](std::size_t i) {
    const auto gt = load_annotation(gts[i].string());
    const auto stem = gts[i].stem().string();
    std::vector<ScoredBox> preds;
    const fs::path as_json_file = fs::path(pred_dir) / (stem + ".json");
    const fs::path as_jsonl = fs::path(pred_dir) / (stem + ".jsonl");
    if (fs::exists(as_json_file)) {
      preds = load_predictions(as_json_file);
    } else if (fs::exists(as_jsonl)) {
      preds = load_predictions(as_jsonl);
    } else {
      missing[i] = 1;
    }
    matches[i] = match_image(preds, gt.objects, iou_thresh);
  });
  Evaluator ev(iou_thresh);
  for (const auto& m : matches) ev.add(m);
  const auto report = ev.report();
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (missing[i]) std::fprintf(stderr, "warning: no prediction for %s (counted as empty)\n", gts[i].stem().c_str());
  }
  if (as_json) {
    auto j = report_to_json(report);
    j["images"] = gts.size();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << format_report(report) << "images: " << gts.size() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// anchors

std::vector<Annotation> load_annotation_set(const std::string& path) {
  std::vector<Annotation> out;
  if (fs::is_directory(path)) {
    for (const auto& f : annotation_files(path)) out.push_back(load_annotation(f.string()));
    return out;
  }
  const json j = read_json(path);
  try {
    if (j.is_array()) {
      for (const auto& a : j) out.push_back(annotation_from_json(a));
    } else if (j.contains("annotations")) {
      for (const auto& a : j.at("annotations")) out.push_back(annotation_from_json(a));
    } else {
      out.push_back(annotation_from_json(j));
    }
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return out;
}

int run_anchors(const std::string& path, int k, int width, int height, std::uint64_t seed, bool as_json) {
  if (width < 1 || height < 1) throw InputError("--width and --height must be positive");
  const auto anns = load_annotation_set(path);
  const auto res = kmeans_anchor_shapes(anns, k, width, height, seed);
  if (as_json) {
    json shapes = json::array();
    for (const auto& s : res.shapes) shapes.push_back({s.w, s.h});
    std::cout << json{{"schema", "screenseg/1"}, {"k", k},         {"width", width},
                      {"height", height},        {"seed", seed},   {"iterations", res.iterations},
                      {"shapes", shapes}}
                     .dump(2)
              << "\n";
  } else {
    std::printf("screenseg/1 anchors  k=%d  model %dx%d  seed %llu\n", k, width, height,
                static_cast<unsigned long long>(seed));
    std::printf("%8s %8s\n", "w", "h");
    for (const auto& s : res.shapes) std::printf("%8.2f %8.2f\n", s.w, s.h);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// nms-bench

struct BenchArgs {
  std::uint64_t seed = 7;
  int images = 1000;
  double jitter = 0.15;
  int per_gt = 8;
  int false_positives = 2;
  double greedy_iou = 0.5;
  double soft_floor = 0.001;
  double weighted_iou = 0.2;
  bool json = false;
};

int run_nms_bench(const BenchArgs& a, int threads) {
  if (a.images < 1) throw InputError("--images must be >= 1");
  if (a.per_gt < 1) throw InputError("--per-gt must be >= 1");
  if (a.jitter < 0) throw InputError("--jitter must be >= 0");
  const char* names[3] = {"greedy", "soft", "weighted"};
  std::vector<std::array<ImageMatch, 3>> per_image(static_cast<std::size_t>(a.images));
  const ScreenSpec spec;
  parallel_for(per_image.size(), threads, [&](std::size_t i) {
    const auto s = derive_seed(a.seed, "nms-bench", i);
    const auto layout = plan_layout(s, spec);
    const auto props = gen_proposal_cloud(layout.annotation, a.per_gt, a.jitter, s, a.false_positives);
    const auto& gts = layout.annotation.objects;
    per_image[i][0] = match_image(to_scored(greedy_nms(props, a.greedy_iou)), gts, 0.75);
    per_image[i][1] = match_image(to_scored(soft_nms(props, a.soft_floor)), gts, 0.75);
    per_image[i][2] = match_image(to_scored(weighted_nms(props, a.weighted_iou)), gts, 0.75);
  });
  std::array<Evaluator, 3> ev{Evaluator(0.75), Evaluator(0.75), Evaluator(0.75)};
  for (const auto& m : per_image) {
    for (int k = 0; k < 3; ++k) ev[k].add(m[k]);
  }
  std::array<EvalReport, 3> reports;
  for (int k = 0; k < 3; ++k) reports[k] = ev[k].report();

  if (a.json) {
    json methods = json::object();
    for (int k = 0; k < 3; ++k) {
      json aps = json::object();
      for (const auto& [c, v] : reports[k].ap) aps[std::string(to_string(c))] = v;
      methods[names[k]] = {{"ap", aps},
                           {"map", reports[k].map ? json(*reports[k].map) : json(nullptr)},
                           {"precision", reports[k].overall.precision()},
                           {"recall", reports[k].overall.recall()}};
    }
    std::cout << json{{"schema", "screenseg/1"}, {"seed", a.seed},     {"images", a.images},
                      {"jitter", a.jitter},      {"per_gt", a.per_gt}, {"false_positives", a.false_positives},
                      {"iou", 0.75},             {"ap_interpolation", "all-point"}, {"methods", methods}}
                     .dump(2)
              << "\n";
    return 0;
  }
  std::printf("screenseg/1 nms-bench  seed %llu  images %d  jitter %.3f  per-gt %d  false-positives %d\n",
              static_cast<unsigned long long>(a.seed), a.images, a.jitter, a.per_gt, a.false_positives);
  std::printf("AP at IoU >= 0.75, all-point interpolation; greedy IoU %.2f, soft floor %.3f, weighted IoU %.2f\n",
              a.greedy_iou, a.soft_floor, a.weighted_iou);
  std::printf("%-10s %8s %8s %8s %8s %10s %8s\n", "method", "image", "text", "icon", "mAP", "precision", "recall");
  for (int k = 0; k < 3; ++k) {
    const auto& r = reports[k];
    auto ap = [&](BlockClass c) {
      const auto it = r.ap.find(c);
      return it == r.ap.end() ? 0.0 : it->second;
    };
    std::printf("%-10s %8.4f %8.4f %8.4f %8.4f %10.4f %8.4f\n", names[k], ap(BlockClass::Image), ap(BlockClass::Text),
                ap(BlockClass::Icon), r.map.value_or(0.0), r.overall.precision(), r.overall.recall());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::uint64_t seed = 1;
  int count = 1;
  std::string spec;
  std::string out;
  bool proposals = false;
  double jitter = 0.05;
  int per_gt = 8;
  bool scoremaps = false;
};

int run_gen(const GenArgs& a, int threads) {
  if (a.count < 0) throw InputError("--count must be >= 0");
  ScreenSpec spec;
  if (!a.spec.empty()) spec = spec_from_json(read_json(a.spec));
  spec.validate();
  fs::create_directories(a.out);
  std::vector<std::string> names(static_cast<std::size_t>(a.count));
  parallel_for(names.size(), threads, [&](std::size_t i) {
    const std::uint64_t s = a.seed + i;
    char name[64];
    std::snprintf(name, sizeof name, "synth_%06llu", static_cast<unsigned long long>(s));
    names[i] = name;
    const auto shot = gen_screenshot(s, spec);
    const fs::path base = fs::path(a.out) / name;
    write_png(base.string() + ".png", shot.image);
    auto sidecar = screenshot_to_json(shot, s);
    sidecar["image_id"] = name;
    write_text(base.string() + ".json", sidecar.dump(2) + "\n");
    if (a.proposals) {
      save_proposals(base.string() + ".jsonl", gen_proposal_cloud(shot.annotation, a.per_gt, a.jitter, s));
    }
    if (a.scoremaps) {
      save_score_maps(base.string() + ".sseg", generate_score_maps(shot.chars, spec.width, spec.height));
    }
  });
  json seeds = json::array();
  for (int i = 0; i < a.count; ++i) seeds.push_back(a.seed + static_cast<std::uint64_t>(i));
  write_text((fs::path(a.out) / "manifest.json").string(),
             json{{"schema", "screenseg/1"}, {"spec", spec_to_json(spec)}, {"seeds", seeds}, {"images", names}}.dump(2) +
                 "\n");
  std::printf("wrote %d screenshots to %s\n", a.count, a.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck

int run_gradcheck(int trials, std::uint64_t seed, bool as_json) {
  if (trials < 1) throw InputError("--trials must be >= 1");
  const auto rows = run_gradient_suite(trials, seed);
  bool ok = true;
  if (as_json) {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"loss", r.loss}, {"trials", r.trials}, {"max_rel_err", r.max_rel_err},
                     {"tolerance", r.tolerance}, {"passed", r.passed()}});
      ok = ok && r.passed();
    }
    std::cout << json{{"schema", "screenseg/1"}, {"seed", seed}, {"rows", out}}.dump(2) << "\n";
  } else {
    std::printf("screenseg/1 gradcheck  central differences, step 1e-5  seed %llu\n",
                static_cast<unsigned long long>(seed));
    std::printf("%-14s %7s %14s %10s  %s\n", "loss", "trials", "max rel err", "tolerance", "result");
    for (const auto& r : rows) {
      std::printf("%-14s %7d %14.3e %10.0e  %s\n", r.loss.c_str(), r.trials, r.max_rel_err, r.tolerance,
                  r.passed() ? "ok" : "FAIL");
      ok = ok && r.passed();
    }
  }
  if (!ok) throw InvariantError("analytic and numeric gradients disagree");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screenseg: screenshot layout analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "Worker threads for batch commands (default: $SCREENSEG_THREADS or 1)");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze one screenshot into a layout tree");
  analyze_cmd->add_option("image", an.image, "PNG or PPM screenshot")->required();
  analyze_cmd->add_option("--backend", an.backend, "heuristic | proposals=FILE | tensor=FILE");
  analyze_cmd->add_option("--scoremaps", an.scoremaps, "Character/affinity score-map file");
  analyze_cmd->add_option("--granularity", an.granularity, "char | word | line");
  analyze_cmd->add_option("--text-source", an.text_source, "ip | dnn | both");
  analyze_cmd->add_flag("--no-grids", an.no_grids, "Skip grid detection (flat tree)");
  analyze_cmd->add_option("--out", an.out, "Write the tree JSON here instead of stdout");
  analyze_cmd->add_option("--overlay", an.overlay, "Write an annotated PNG");
  analyze_cmd->add_flag("--timing", an.timing, "Print per-stage timings to stderr");

  std::string pred_dir, gt_dir;
  double eval_iou = 0.75;
  bool eval_json = false;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against annotations");
  eval_cmd->add_option("--pred", pred_dir, "Directory of predictions (tree/annotation .json or proposals .jsonl)")
      ->required();
  eval_cmd->add_option("--gt", gt_dir, "Directory of annotation .json files")->required();
  eval_cmd->add_option("--iou", eval_iou, "IoU threshold");
  eval_cmd->add_flag("--json", eval_json, "Emit JSON");

  std::string ann_path;
  int k = 9, aw = 272, ah = 480;
  std::uint64_t anchor_seed = 0;
  bool anchors_json = false;
  auto* anchors_cmd = app.add_subcommand("anchors", "k-means anchor shapes from annotations");
  anchors_cmd->add_option("--annotations", ann_path, "Annotation file (object or array) or directory")->required();
  anchors_cmd->add_option("--k", k, "Number of shapes");
  anchors_cmd->add_option("--width", aw, "Model input width");
  anchors_cmd->add_option("--height", ah, "Model input height");
  anchors_cmd->add_option("--seed", anchor_seed, "Seed");
  anchors_cmd->add_flag("--json", anchors_json, "Emit JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("nms-bench", "AP of greedy, soft and weighted NMS on proposal clouds");
  bench_cmd->add_option("--seed", bench.seed, "Seed");
  bench_cmd->add_option("--images", bench.images, "Synthetic layouts");
  bench_cmd->add_option("--jitter", bench.jitter, "Proposal jitter (fraction of box size)");
  bench_cmd->add_option("--per-gt", bench.per_gt, "Proposals per ground-truth box");
  bench_cmd->add_option("--false-positives", bench.false_positives, "Background false positives per image");
  bench_cmd->add_flag("--json", bench.json, "Emit JSON");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic screenshots with annotations");
  gen_cmd->add_option("--seed", gen.seed, "First seed (image i uses seed + i)");
  gen_cmd->add_option("--count", gen.count, "Number of screenshots");
  gen_cmd->add_option("--spec", gen.spec, "Spec JSON (counts, size, background)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_flag("--proposals", gen.proposals, "Also write jittered oracle proposals (.jsonl)");
  gen_cmd->add_option("--jitter", gen.jitter, "Oracle proposal jitter");
  gen_cmd->add_option("--per-gt", gen.per_gt, "Oracle proposals per object");
  gen_cmd->add_flag("--scoremaps", gen.scoremaps, "Also write ground-truth score maps (.sseg)");

  int trials = 100;
  std::uint64_t grad_seed = 1;
  bool grad_json = false;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the loss gradients");
  grad_cmd->add_option("--trials", trials, "Random points per loss");
  grad_cmd->add_option("--seed", grad_seed, "Seed");
  grad_cmd->add_flag("--json", grad_json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  const int threads = thread_count(threads_flag);
  try {
    if (*analyze_cmd) return run_analyze(an);
    if (*eval_cmd) return run_eval(pred_dir, gt_dir, eval_iou, eval_json, threads);
    if (*anchors_cmd) return run_anchors(ann_path, k, aw, ah, anchor_seed, anchors_json);
    if (*bench_cmd) return run_nms_bench(bench, threads);
    if (*gen_cmd) return run_gen(gen, threads);
    if (*grad_cmd) return run_gradcheck(trials, grad_seed, grad_json);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
