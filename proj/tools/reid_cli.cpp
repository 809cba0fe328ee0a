// Command-line front end; talks to the library exclusively through reid.h.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reid/reid.h"

namespace {

struct Failure {
  reid_status status;
};

void check(reid_status st) {
  if (st != REID_OK) throw Failure{st};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Settings = std::unique_ptr<reid_settings, Deleter<reid_settings, reid_settings_free>>;
using Image = std::unique_ptr<reid_image, Deleter<reid_image, reid_image_free>>;
using Cache = std::unique_ptr<reid_cache, Deleter<reid_cache, reid_cache_free>>;
using Model = std::unique_ptr<reid_model, Deleter<reid_model, reid_model_free>>;
using Report = std::unique_ptr<reid_report, Deleter<reid_report, reid_report_free>>;

// Flags shared by several subcommands; unset ones leave the config untouched.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> reg;
  std::optional<int> dims;
  std::optional<double> threshold;
  std::optional<int> pca_dims;
  std::optional<int> trials;
  std::optional<std::string> shot;
  std::optional<int> threads;
  std::string probe_cam;
  std::string gallery_cam;
};

Settings make_settings(const CommonFlags& f) {
  reid_settings* raw = nullptr;
  if (f.config.empty()) {
    check(reid_settings_create(&raw));
  } else {
    check(reid_settings_load(f.config.c_str(), &raw));
  }
  Settings s(raw);
  auto set = [&](const char* key, const std::string& value) {
    check(reid_settings_set(s.get(), key, value.c_str()));
  };
  auto real = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  if (f.seed) set("seed", std::to_string(*f.seed));
  if (f.reg) {
    set("regularizer", real(*f.reg));
    set("metric_reg", real(*f.reg));
  }
  if (f.dims) set("max_dims", std::to_string(*f.dims));
  if (f.threshold) set("eigen_threshold", real(*f.threshold));
  if (f.pca_dims) set("pca_dims", std::to_string(*f.pca_dims));
  if (f.trials) set("trials", std::to_string(*f.trials));
  if (f.shot) set("shot", *f.shot);
  if (f.threads) set("threads", std::to_string(*f.threads));
  check(reid_settings_validate(s.get()));
  return s;
}

void add_config_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Flat key = value configuration file");
  cmd->add_option("--seed", f.seed, "Random seed");
}

void add_learning_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--reg", f.reg, "Covariance regularizer (default 0.001)");
  cmd->add_option("--dims", f.dims, "Upper bound on the XQDA subspace dimension");
  cmd->add_option("--threshold", f.threshold, "Keep XQDA eigenvalues above this (default 1)");
  cmd->add_option("--pca-dims", f.pca_dims, "PCA dimension for kissme/mahalanobis (default 100)");
  cmd->add_option("--probe-cam", f.probe_cam, "Camera id of the probe view");
  cmd->add_option("--gallery-cam", f.gallery_cam, "Camera id of the gallery view");
}

void log_to_stderr(const char* msg, void*) { std::fprintf(stderr, "error: %s\n", msg); }

int run_extract(const CommonFlags& f, const std::string& manifest, const std::string& out) {
  Settings s = make_settings(f);
  size_t dim = 0;
  check(reid_settings_feature_dim(s.get(), &dim));
  reid_extract_summary summary{};
  check(reid_extract_manifest(manifest.c_str(), s.get(), out.c_str(), &log_to_stderr, nullptr, &summary));
  std::printf("extracted %zu of %zu images, dim %zu -> %s\n", summary.images - summary.failed,
              summary.images, dim, out.c_str());
  std::printf("time per image: mean %.4f s, p95 %.4f s\n", summary.mean_seconds, summary.p95_seconds);
  if (summary.failed) {
    std::fprintf(stderr, "%zu image(s) failed\n", summary.failed);
    return REID_ERR_DATA;
  }
  return 0;
}

Cache open_cache(const std::string& path, const CommonFlags& f, const reid_settings* s) {
  reid_cache* raw = nullptr;
  check(reid_cache_open(path.c_str(), &raw));
  Cache cache(raw);
  if (!f.config.empty()) check(reid_cache_check(cache.get(), s));
  return cache;
}

int run_train(const CommonFlags& f, const std::string& cache_path, const std::string& method_name,
              const std::string& out) {
  Settings s = make_settings(f);
  Cache cache = open_cache(cache_path, f, s.get());
  reid_method method;
  check(reid_method_parse(method_name.c_str(), &method));

  const auto t0 = std::chrono::steady_clock::now();
  reid_model* raw = nullptr;
  check(reid_train(cache.get(), method, s.get(), f.probe_cam.c_str(), f.gallery_cam.c_str(), &raw));
  Model model(raw);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(reid_model_save(model.get(), out.c_str()));

  std::printf("method: %s\n", reid_method_name(method));
  std::printf("input dim: %zu\n", reid_model_input_dim(model.get()));
  std::printf("regularizer: %g\n", reid_model_regularizer(model.get()));
  if (method == REID_METHOD_XQDA) {
    const size_t r = reid_model_eigenvalues(model.get(), nullptr, 0);
    std::vector<double> eig(r);
    reid_model_eigenvalues(model.get(), eig.data(), eig.size());
    std::printf("r: %zu\n", r);
    std::printf("eigenvalues:");
    for (size_t i = 0; i < std::min<size_t>(r, 10); ++i) std::printf(" %.4f", eig[i]);
    std::printf("%s\n", r > 10 ? " ..." : "");
  } else {
    std::printf("pca dims: %zu\n", reid_model_dims(model.get()));
  }
  std::printf("training time: %.3f s\n", secs);
  std::printf("model written to %s\n", out.c_str());
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_eval(const CommonFlags& f, const std::string& cache_path, const std::string& out,
             std::string methods_arg, const std::string& model_path, std::string svg_path,
             const std::string& sweep_arg) {
  Settings s = make_settings(f);
  Cache cache = open_cache(cache_path, f, s.get());

  std::vector<int> sweep;
  for (const auto& item : split_list(sweep_arg)) {
    try {
      sweep.push_back(std::stoi(item));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --sweep-dims expects integers, got '%s'\n", item.c_str());
      return REID_ERR_USAGE;
    }
  }
  if (methods_arg.empty() && model_path.empty() && sweep.empty()) methods_arg = "xqda";
  std::vector<reid_method> methods;
  for (const auto& name : split_list(methods_arg)) {
    reid_method m;
    check(reid_method_parse(name.c_str(), &m));
    methods.push_back(m);
  }
  Model model;
  if (!model_path.empty()) {
    reid_model* raw = nullptr;
    check(reid_model_load(model_path.c_str(), &raw));
    model.reset(raw);
  }

  reid_eval_options opts{};
  opts.methods = methods.data();
  opts.method_count = methods.size();
  opts.model = model.get();
  opts.probe_cam = f.probe_cam.c_str();
  opts.gallery_cam = f.gallery_cam.c_str();
  opts.sweep_dims = sweep.data();
  opts.sweep_count = sweep.size();
  reid_report* raw = nullptr;
  check(reid_evaluate(cache.get(), s.get(), &opts, &raw));
  Report report(raw);

  const std::filesystem::path out_path(out);
  if (svg_path.empty()) svg_path = std::filesystem::path(out).replace_extension(".svg").string();
  if (sweep.empty()) {
    check(reid_report_write_csv(report.get(), out.c_str()));
  } else {
    check(reid_report_write_sweep_csv(report.get(), out.c_str()));
    const auto cmc_path = std::filesystem::path(out).replace_extension(".cmc.csv").string();
    check(reid_report_write_csv(report.get(), cmc_path.c_str()));
  }
  check(reid_report_write_svg(report.get(), svg_path.c_str()));

  std::printf("%-22s %8s %8s %8s\n", "method", "rank-1", "rank-10", "rank-20");
  for (size_t i = 0; i < reid_report_method_count(report.get()); ++i) {
    std::printf("%-22s %7.2f%% %7.2f%% %7.2f%%\n", reid_report_method_label(report.get(), i),
                100.0 * reid_report_rate(report.get(), i, 1), 100.0 * reid_report_rate(report.get(), i, 10),
                100.0 * reid_report_rate(report.get(), i, 20));
  }
  if (!sweep.empty()) {
    std::printf("\n%6s %8s\n", "dims", "rank-1");
    for (size_t i = 0; i < reid_report_sweep_count(report.get()); ++i) {
      int dims = 0;
      double r1 = 0, r1s = 0;
      check(reid_report_sweep_row(report.get(), i, &dims, &r1, &r1s, nullptr, nullptr));
      std::printf("%6d %7.2f%% (sd %.2f)\n", dims, 100.0 * r1, 100.0 * r1s);
    }
  }
  std::printf("report: %s, plot: %s\n", out.c_str(), svg_path.c_str());
  return 0;
}

int run_retinex(const CommonFlags& f, const std::string& in, const std::string& out, bool resize) {
  Settings s = make_settings(f);
  reid_image* raw = nullptr;
  check(reid_image_load(in.c_str(), &raw));
  Image img(raw);
  if (resize) {
    reid_image* sized = nullptr;
    int width = 0, height = 0;
    check(reid_settings_geometry(s.get(), &width, &height));
    check(reid_image_resize(img.get(), width, height, &sized));
    img.reset(sized);
  }
  reid_image* enhanced = nullptr;
  int degenerate = 0;
  check(reid_image_retinex(img.get(), s.get(), &enhanced, &degenerate));
  Image result(enhanced);
  if (degenerate) std::fprintf(stderr, "warning: flat Retinex response, wrote a constant image\n");
  check(reid_image_save(result.get(), out.c_str()));
  std::printf("%dx%d -> %s\n", reid_image_width(result.get()), reid_image_height(result.get()), out.c_str());
  return 0;
}

int run_bench(const CommonFlags& f, size_t images, int train_dim, int train_samples) {
  Settings s = make_settings(f);
  reid_bench_result r{};
  check(reid_bench(s.get(), images, train_dim, train_samples, &r));
  std::printf("LOMO extraction: %zu images, mean %.4f s, p95 %.4f s per image\n", r.images,
              r.extract_mean_seconds, r.extract_p95_seconds);
  std::printf("XQDA training: d=%d, %d samples per view, %.3f s, r=%zu\n", r.train_dim,
              r.train_samples_per_view, r.train_seconds, r.train_retained_dims);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Person re-identification with LOMO features and XQDA metric learning"};
  app.require_subcommand(1);
  CommonFlags flags;

  std::string manifest, cache_path, out, method = "xqda", methods, model_path, svg, sweep, in;
  bool resize = false;
  size_t bench_images = 100;
  int bench_dim = 600, bench_samples = 632;

  auto* extract = app.add_subcommand("extract", "Describe every image of a manifest into a feature cache");
  extract->add_option("manifest", manifest, "CSV with image_path,person_id,camera_id")->required();
  extract->add_option("out", out, "Feature cache to write")->required();
  add_config_flags(extract, flags);
  extract->add_option("--threads", flags.threads, "Worker threads (default: all cores)");

  auto* train = app.add_subcommand("train", "Learn a metric from a feature cache");
  train->add_option("cache", cache_path, "Feature cache")->required();
  train->add_option("out", out, "Model file to write")->required();
  train->add_option("--method", method, "xqda, kissme or mahalanobis");
  add_config_flags(train, flags);
  add_learning_flags(train, flags);

  auto* eval = app.add_subcommand("eval", "Run the multi-trial CMC protocol");
  eval->add_option("cache", cache_path, "Feature cache")->required();
  eval->add_option("out", out, "CSV report to write")->required();
  eval->add_option("--method", methods, "Comma-separated: xqda,kissme,mahalanobis,euclidean,cosine");
  eval->add_option("--model", model_path, "Score every trial with this trained model");
  eval->add_option("--svg", svg, "CMC plot path (default: report path with .svg)");
  eval->add_option("--sweep-dims", sweep, "Comma-separated XQDA subspace dimensions to sweep");
  eval->add_option("--trials", flags.trials, "Number of random splits");
  eval->add_option("--shot", flags.shot, "single or multi")->check(CLI::IsMember({"single", "multi"}));
  add_config_flags(eval, flags);
  add_learning_flags(eval, flags);

  auto* retinex = app.add_subcommand("retinex", "Write the Retinex-enhanced version of an image");
  retinex->add_option("in", in, "PNG or PPM input")->required();
  retinex->add_option("out", out, "Output (.png or PPM)")->required();
  retinex->add_flag("--resize", resize, "Resize to the configured geometry first");
  add_config_flags(retinex, flags);

  auto* bench = app.add_subcommand("bench", "Time descriptor extraction and XQDA training");
  bench->add_option("--images", bench_images, "Synthetic images to describe");
  bench->add_option("--train-dim", bench_dim, "Feature dimension for the training benchmark");
  bench->add_option("--train-samples", bench_samples, "Samples per view for the training benchmark");
  add_config_flags(bench, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : REID_ERR_USAGE;
  }

  try {
    if (*extract) return run_extract(flags, manifest, out);
    if (*train) return run_train(flags, cache_path, method, out);
    if (*eval) return run_eval(flags, cache_path, out, methods, model_path, svg, sweep);
    if (*retinex) return run_retinex(flags, in, out, resize);
    if (*bench) return run_bench(flags, bench_images, bench_dim, bench_samples);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", reid_last_error());
    return f.status;
  }
  return REID_ERR_USAGE;
}
