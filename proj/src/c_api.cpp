#include "reid/reid.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <random>
#include <string>

#include "reid/error.hpp"
#include "reid/pipeline.hpp"
#include "reid/synthetic.hpp"

struct reid_settings {
  reid::Settings value;
};

struct reid_image {
  reid::RgbImage value;
};

struct reid_cache {
  reid::FeatureCache value;
};

struct reid_model {
  reid::AnyModel value;
};

struct reid_report {
  reid::ProtocolReport value;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
reid_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return REID_OK;
  } catch (const reid::UsageError& e) {
    g_last_error = e.what();
    return REID_ERR_USAGE;
  } catch (const reid::DataError& e) {
    g_last_error = e.what();
    return REID_ERR_DATA;
  } catch (const reid::NumericError& e) {
    g_last_error = e.what();
    return REID_ERR_NUMERIC;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return REID_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REID_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return REID_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw reid::UsageError(std::string(what) + " must not be NULL");
}

std::string opt_string(const char* s) { return s ? std::string(s) : std::string(); }

reid_method to_c(reid::MethodKind k) { return static_cast<reid_method>(static_cast<int>(k)); }

reid::MethodKind from_c(reid_method m) {
  if (m < REID_METHOD_XQDA || m > REID_METHOD_COSINE) throw reid::UsageError("invalid method value");
  return static_cast<reid::MethodKind>(static_cast<int>(m));
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw reid::DataError(std::string("cannot write '") + path + "'");
}

}  // namespace

extern "C" {

const char* reid_version(void) { return "1.0.0"; }

const char* reid_last_error(void) { return g_last_error.c_str(); }

reid_status reid_settings_create(reid_settings** out) {
  return guarded([&] {
    require(out, "out");
    *out = new reid_settings{};
  });
}

reid_status reid_settings_load(const char* path, reid_settings** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new reid_settings{reid::load_settings(path)};
  });
}

reid_status reid_settings_set(reid_settings* settings, const char* key, const char* value) {
  return guarded([&] {
    require(settings, "settings");
    require(key, "key");
    require(value, "value");
    settings->value.set(key, value);
  });
}

reid_status reid_settings_validate(const reid_settings* settings) {
  return guarded([&] {
    require(settings, "settings");
    settings->value.validate();
  });
}

reid_status reid_settings_feature_dim(const reid_settings* settings, size_t* out) {
  return guarded([&] {
    require(settings, "settings");
    require(out, "out");
    const auto& s = settings->value;
    *out = reid::lomo_dim(s.lomo, s.width, s.height);
  });
}

reid_status reid_settings_geometry(const reid_settings* settings, int* width, int* height) {
  return guarded([&] {
    require(settings, "settings");
    require(width, "width");
    require(height, "height");
    *width = settings->value.width;
    *height = settings->value.height;
  });
}

reid_status reid_settings_digest(const reid_settings* settings, uint8_t out[32]) {
  return guarded([&] {
    require(settings, "settings");
    require(out, "out");
    const auto d = settings->value.feature_digest();
    std::memcpy(out, d.data(), d.size());
  });
}

uint64_t reid_settings_seed(const reid_settings* settings) {
  return settings ? settings->value.protocol.seed : 0;
}

void reid_settings_free(reid_settings* settings) { delete settings; }

reid_status reid_image_load(const char* path, reid_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new reid_image{reid::load_image(path)};
  });
}

reid_status reid_image_create(int width, int height, const uint8_t* rgb, reid_image** out) {
  return guarded([&] {
    require(rgb, "rgb");
    require(out, "out");
    reid::RgbImage img(width, height);
    for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] = rgb[i];
    *out = new reid_image{std::move(img)};
  });
}

int reid_image_width(const reid_image* image) { return image ? image->value.width() : 0; }

int reid_image_height(const reid_image* image) { return image ? image->value.height() : 0; }

reid_status reid_image_resize(const reid_image* image, int width, int height, reid_image** out) {
  return guarded([&] {
    require(image, "image");
    require(out, "out");
    *out = new reid_image{reid::resize_bilinear(image->value, width, height)};
  });
}

reid_status reid_image_retinex(const reid_image* image, const reid_settings* settings,
                               reid_image** out, int* degenerate) {
  return guarded([&] {
    require(image, "image");
    require(settings, "settings");
    require(out, "out");
    bool flat = false;
    *out = new reid_image{reid::multiscale_retinex(image->value, settings->value.lomo.retinex, &flat)};
    if (degenerate) *degenerate = flat ? 1 : 0;
  });
}

reid_status reid_image_save(const reid_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    reid::save_image(image->value, path);
  });
}

void reid_image_free(reid_image* image) { delete image; }

reid_status reid_extract(const reid_image* image, const reid_settings* settings, double* out,
                         size_t len) {
  return guarded([&] {
    require(image, "image");
    require(settings, "settings");
    require(out, "out");
    const auto values = reid::describe_image(image->value, settings->value);
    if (values.size() != len) {
      throw reid::UsageError("output buffer holds " + std::to_string(len) + " values, descriptor has " +
                             std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), out);
  });
}

reid_status reid_extract_manifest(const char* manifest_path, const reid_settings* settings,
                                  const char* cache_path, reid_log_fn log, void* user,
                                  reid_extract_summary* summary) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(settings, "settings");
    require(cache_path, "cache_path");
    const auto rows = reid::load_manifest(manifest_path);
    reid::LogFn sink;
    if (log) sink = [log, user](const std::string& msg) { log(msg.c_str(), user); };
    const auto s = reid::extract_manifest(rows, settings->value, cache_path, sink);
    if (summary) *summary = {s.images, s.failed, s.mean_seconds, s.p95_seconds};
  });
}

reid_status reid_cache_open(const char* path, reid_cache** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new reid_cache{reid::read_feature_cache(path)};
  });
}

size_t reid_cache_count(const reid_cache* cache) { return cache ? cache->value.records.size() : 0; }

size_t reid_cache_dim(const reid_cache* cache) { return cache ? cache->value.dim : 0; }

reid_status reid_cache_check(const reid_cache* cache, const reid_settings* settings) {
  return guarded([&] {
    require(cache, "cache");
    require(settings, "settings");
    reid::check_digest(cache->value, settings->value);
  });
}

void reid_cache_free(reid_cache* cache) { delete cache; }

reid_status reid_method_parse(const char* name, reid_method* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = to_c(reid::parse_method(name));
  });
}

const char* reid_method_name(reid_method method) {
  if (method < REID_METHOD_XQDA || method > REID_METHOD_COSINE) return "unknown";
  return reid::method_name(from_c(method));
}

reid_status reid_train(const reid_cache* cache, reid_method method, const reid_settings* settings,
                       const char* probe_cam, const char* gallery_cam, reid_model** out) {
  return guarded([&] {
    require(cache, "cache");
    require(settings, "settings");
    require(out, "out");
    settings->value.xqda.validate();
    reid::CameraSelection cams{opt_string(probe_cam), opt_string(gallery_cam)};
    *out = new reid_model{reid::train_from_cache(cache->value, from_c(method), settings->value, cams)};
  });
}

reid_status reid_model_load(const char* path, reid_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new reid_model{reid::load_model(path)};
  });
}

reid_status reid_model_save(const reid_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    std::visit([&](const auto& m) { reid::save_model(m, path); }, model->value);
  });
}

reid_method reid_model_method(const reid_model* model) {
  if (!model) return REID_METHOD_XQDA;
  if (std::holds_alternative<reid::XqdaModel>(model->value)) return REID_METHOD_XQDA;
  return std::get<reid::MetricModel>(model->value).kind == reid::MetricKind::kKissme
             ? REID_METHOD_KISSME
             : REID_METHOD_MAHALANOBIS;
}

size_t reid_model_input_dim(const reid_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return static_cast<size_t>(m.input_dim()); }, model->value);
}

size_t reid_model_dims(const reid_model* model) {
  if (!model) return 0;
  if (const auto* x = std::get_if<reid::XqdaModel>(&model->value)) return static_cast<size_t>(x->dims());
  return static_cast<size_t>(std::get<reid::MetricModel>(model->value).M.rows());
}

double reid_model_regularizer(const reid_model* model) {
  if (!model) return 0.0;
  return std::visit([](const auto& m) { return m.regularizer; }, model->value);
}

size_t reid_model_eigenvalues(const reid_model* model, double* out, size_t cap) {
  if (!model) return 0;
  const auto* x = std::get_if<reid::XqdaModel>(&model->value);
  if (!x) return 0;
  const auto n = static_cast<size_t>(x->eigenvalues.size());
  for (size_t i = 0; out && i < std::min(n, cap); ++i) out[i] = x->eigenvalues(static_cast<Eigen::Index>(i));
  return n;
}

reid_status reid_model_distance(const reid_model* model, const double* x, const double* z,
                                size_t len, double* out) {
  return guarded([&] {
    require(model, "model");
    require(x, "x");
    require(z, "z");
    require(out, "out");
    const Eigen::Map<const reid::Vector> xv(x, static_cast<Eigen::Index>(len));
    const Eigen::Map<const reid::Vector> zv(z, static_cast<Eigen::Index>(len));
    *out = std::visit([&](const auto& m) { return reid::distance(m, xv, zv); }, model->value);
  });
}

void reid_model_free(reid_model* model) { delete model; }

reid_status reid_evaluate(const reid_cache* cache, const reid_settings* settings,
                          const reid_eval_options* options, reid_report** out) {
  return guarded([&] {
    require(cache, "cache");
    require(settings, "settings");
    require(options, "options");
    require(out, "out");
    const auto& s = settings->value;
    std::vector<reid::MethodSpec> specs;
    for (size_t i = 0; i < options->method_count; ++i) {
      require(options->methods, "options->methods");
      reid::MethodSpec spec;
      spec.kind = from_c(options->methods[i]);
      spec.xqda = s.xqda;
      spec.pca_dims = s.pca_dims;
      spec.metric_reg = s.metric_reg;
      specs.push_back(spec);
    }
    if (options->model) {
      reid::MethodSpec spec;
      spec.kind = from_c(reid_model_method(options->model));
      spec.pretrained = reid::make_scorer(options->model->value);
      spec.label = std::string(reid::method_name(spec.kind)) + " (model)";
      specs.push_back(spec);
    }
    std::vector<int> sweep;
    if (options->sweep_count) {
      require(options->sweep_dims, "options->sweep_dims");
      sweep.assign(options->sweep_dims, options->sweep_dims + options->sweep_count);
    }
    const reid::CameraSelection cams{opt_string(options->probe_cam), opt_string(options->gallery_cam)};
    const reid::ProtocolData data = reid::protocol_data(cache->value, cams);
    *out = new reid_report{reid::run_protocol(data, specs, s.protocol, sweep, s.xqda)};
  });
}

size_t reid_report_method_count(const reid_report* report) {
  return report ? report->value.methods.size() : 0;
}

const char* reid_report_method_label(const reid_report* report, size_t method) {
  if (!report || method >= report->value.methods.size()) return "";
  return report->value.methods[method].label.c_str();
}

size_t reid_report_ranks(const reid_report* report) {
  if (!report || report->value.methods.empty()) return 0;
  return report->value.methods.front().mean.size();
}

double reid_report_rate(const reid_report* report, size_t method, int rank) {
  if (!report || method >= report->value.methods.size()) return 0.0;
  return reid::rate_at(report->value.methods[method].mean, rank);
}

double reid_report_rate_std(const reid_report* report, size_t method, int rank) {
  if (!report || method >= report->value.methods.size()) return 0.0;
  return reid::rate_at(report->value.methods[method].stddev, rank);
}

size_t reid_report_sweep_count(const reid_report* report) {
  return report ? report->value.sweep.size() : 0;
}

reid_status reid_report_sweep_row(const reid_report* report, size_t row, int* dims, double* rank1,
                                  double* rank1_std, double* rank10, double* rank20) {
  return guarded([&] {
    require(report, "report");
    if (row >= report->value.sweep.size()) throw reid::UsageError("sweep row out of range");
    const auto& r = report->value.sweep[row];
    if (dims) *dims = r.dims;
    if (rank1) *rank1 = r.rank1_mean;
    if (rank1_std) *rank1_std = r.rank1_std;
    if (rank10) *rank10 = r.rank10_mean;
    if (rank20) *rank20 = r.rank20_mean;
  });
}

reid_status reid_report_write_csv(const reid_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    write_text(path, reid::report_csv(report->value));
  });
}

reid_status reid_report_write_sweep_csv(const reid_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    write_text(path, reid::sweep_csv(report->value));
  });
}

reid_status reid_report_write_svg(const reid_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    write_text(path, reid::report_svg(report->value));
  });
}

void reid_report_free(reid_report* report) { delete report; }

reid_status reid_bench(const reid_settings* settings, size_t images, int train_dim,
                       int train_samples_per_view, reid_bench_result* out) {
  return guarded([&] {
    require(settings, "settings");
    require(out, "out");
    const auto& s = settings->value;
    s.validate();
    if (images == 0 || train_dim < 2 || train_samples_per_view < 4 || train_samples_per_view % 2) {
      throw reid::UsageError("bench needs images >= 1, train_dim >= 2 and an even sample count >= 4");
    }
    using clock = std::chrono::steady_clock;
    std::mt19937_64 rng(s.protocol.seed);
    std::vector<double> times;
    for (size_t i = 0; i < images; ++i) {
      const reid::RgbImage img = reid::synthetic_person_image(rng, s.width, s.height);
      const auto t0 = clock::now();
      const auto fv = reid::extract_lomo(img, s.lomo);
      times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
      if (fv.values.empty()) throw reid::NumericError("empty descriptor");
    }
    double total = 0.0;
    for (double t : times) total += t;
    std::sort(times.begin(), times.end());

    reid::BenchmarkSpec spec;
    spec.identities = train_samples_per_view / 2;
    spec.dim = train_dim;
    spec.low_noise_dims = train_dim;
    spec.samples_per_view = 2;
    spec.seed = s.protocol.seed;
    const reid::ProtocolData data = reid::synthetic_benchmark(spec);
    reid::CrossViewDataset ds;
    std::vector<Eigen::Index> xs, zs;
    for (std::size_t i = 0; i < data.view.size(); ++i) {
      (data.view[i] == 0 ? xs : zs).push_back(static_cast<Eigen::Index>(i));
      (data.view[i] == 0 ? ds.y : ds.l).push_back(data.person[i]);
    }
    ds.X = data.features(Eigen::all, xs);
    ds.Z = data.features(Eigen::all, zs);

    const auto t0 = clock::now();
    const reid::XqdaModel model = reid::train_xqda(ds, s.xqda);
    const double train_seconds = std::chrono::duration<double>(clock::now() - t0).count();

    *out = {images,
            total / static_cast<double>(images),
            times[static_cast<size_t>(std::ceil(0.95 * static_cast<double>(times.size()))) - 1],
            train_dim,
            train_samples_per_view,
            train_seconds,
            static_cast<size_t>(model.dims())};
  });
}

}  // extern "C"
