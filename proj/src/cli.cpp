#include "ggd/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "ggd/pipeline.hpp"

namespace ggd::cli {

namespace {

using nlohmann::json;

// JSON config files: {"denoise": {"rho": 7, ...}, "sweep": {"epsilons": [40, 60], ...}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        j[name] = results.size() == 1 ? json(results.front()) : json(results);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

// Exit-code carrying failure, caught in run().
struct Failure {
  ExitCode code;
  std::string message;
};

Image load_or_fail(const std::string& path) {
  try {
    return load_image(path);
  } catch (const std::exception& e) {
    throw Failure{io_failure, e.what()};
  }
}

void save_or_fail(const Image& image, const std::string& path) {
  try {
    save_image(image, path);
  } catch (const std::exception& e) {
    throw Failure{io_failure, e.what()};
  }
}

// The image exactly as it lands on disk.
Image as_written(const Image& image) {
  std::vector<double> v(image.pixel_count());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = quantize(image[k]);
  return Image(image.side(), std::move(v));
}

std::string format_delta(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "delta=%.6f", v);
  return buf;
}

void set_threads(int threads) {
  if (threads < 0) throw Failure{bad_arguments, "--threads must be >= 0"};
  if (threads > 0) omp_set_num_threads(threads);
}

struct CommonFlags {
  double beta = 3.0;
  double gamma = 5.0;
  std::string backend = "dijkstra";
  std::string solver = "auto";
  int threads = 0;
  bool override_guard = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "GLD pixel-distance penalty")->capture_default_str();
    cmd->add_option("--gamma", gamma, "GLD weight scale")->capture_default_str();
    cmd->add_option("--backend", backend, "all-pairs shortest paths backend")
        ->check(CLI::IsMember({"floyd", "dijkstra"}))
        ->capture_default_str();
    cmd->add_option("--solver", solver, "eigensolver")
        ->check(CLI::IsMember({"auto", "lanczos", "dense"}))
        ->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0 = auto)")->capture_default_str();
    cmd->add_flag("--override-memory-guard", override_guard,
                  "allow images above the vertex limit");
  }
};

struct DenoiseFlags {
  std::string in, out, truth, method = "ggd";
  std::size_t rho = 5, delta = 10, L = 15;
  bool min_eigenvalue = false;
  CommonFlags common;
};

struct NoiseFlags {
  std::string in, out;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct CompareFlags {
  std::string a, b;
};

struct SweepFlags {
  std::string in, truth, out, checkpoint_dir;
  std::vector<double> epsilons;
  std::vector<std::size_t> rhos, deltas, Ls;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  bool quiet = false;
  CommonFlags common;
};

struct InfoFlags {
  std::size_t n = 0, rho = 5, delta = 10;
};

int cmd_denoise(const DenoiseFlags& f, std::ostream& out, std::ostream& err) {
  set_threads(f.common.threads);
  DenoiseConfig config;
  config.method = parse_method(f.method);
  config.rho = f.rho;
  config.delta = f.delta;
  config.L = f.L;
  config.beta = f.common.beta;
  config.gamma = f.common.gamma;
  config.backend = parse_backend(f.common.backend);
  config.eigen.solver = parse_solver(f.common.solver);
  config.override_memory_guard = f.common.override_guard;
  config.report_min_eigenvalue = f.min_eigenvalue && config.method == Method::ggd;
  if (f.rho % 2 == 0) throw Failure{bad_arguments, "patch length must be odd"};

  const Image noisy = load_or_fail(f.in);
  std::optional<Image> truth;
  if (!f.truth.empty()) {
    truth = load_or_fail(f.truth);
    if (truth->side() != noisy.side())
      throw Failure{bad_arguments, "--truth image size differs from --in"};
  }
  try {
    config.validate(noisy.side());
  } catch (const std::invalid_argument& e) {
    throw Failure{bad_arguments, e.what()};
  }

  DenoiseResult result;
  try {
    result = denoise(noisy, config);
  } catch (const std::exception& e) {
    throw Failure{pipeline_failure, e.what()};
  }
  for (const auto& w : result.diagnostics.warnings) err << "warning: " << w << '\n';
  save_or_fail(result.image, f.out);
  if (result.min_eigenvalue) out << "min_eigenvalue=" << *result.min_eigenvalue << '\n';
  if (truth) out << format_delta(reconstruction_error(*truth, as_written(result.image))) << '\n';
  return ok;
}

int cmd_add_noise(const NoiseFlags& f, std::ostream&) {
  if (!(f.epsilon >= 0.0)) throw Failure{bad_arguments, "--epsilon must be >= 0"};
  const Image clean = load_or_fail(f.in);
  save_or_fail(add_uniform_noise(clean, {f.epsilon, f.seed}), f.out);
  return ok;
}

int cmd_compare(const CompareFlags& f, std::ostream& out) {
  const Image a = load_or_fail(f.a);
  const Image b = load_or_fail(f.b);
  if (a.side() != b.side()) throw Failure{bad_arguments, "images differ in size"};
  try {
    out << format_delta(reconstruction_error(a, b)) << '\n';
  } catch (const std::invalid_argument& e) {
    throw Failure{bad_arguments, e.what()};
  }
  return ok;
}

int cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
  set_threads(f.common.threads);
  SweepGrid grid;
  grid.epsilons = f.epsilons;
  grid.rhos = f.rhos;
  grid.deltas = f.deltas;
  grid.Ls = f.Ls;
  grid.seeds = f.seeds;
  for (const auto& m : f.methods) grid.methods.push_back(parse_method(m));
  grid.beta = f.common.beta;
  grid.gamma = f.common.gamma;
  grid.backend = parse_backend(f.common.backend);
  grid.eigen.solver = parse_solver(f.common.solver);
  grid.override_memory_guard = f.common.override_guard;
  if (!f.checkpoint_dir.empty()) grid.checkpoint_dir = f.checkpoint_dir;
  if (grid.cell_count() == 0) throw Failure{bad_arguments, "every sweep grid list needs at least one value"};
  for (double e : grid.epsilons)
    if (!(e >= 0.0)) throw Failure{bad_arguments, "epsilons must be >= 0"};

  const Image source = load_or_fail(f.in);
  std::optional<Image> truth;
  if (!f.truth.empty()) {
    truth = load_or_fail(f.truth);
    if (truth->side() != source.side())
      throw Failure{bad_arguments, "--truth image size differs from --in"};
  }
  std::ofstream csv(f.out);
  if (!csv) throw Failure{io_failure, "cannot write " + f.out};

  const std::size_t total = grid.cell_count();
  std::size_t done = 0;
  const SweepProgress progress = [&](const SweepRow& r) {
    ++done;
    if (!r.error.empty())
      err << "row failed (" << to_string(r.method) << " eps=" << r.epsilon << " seed=" << r.seed
          << " rho=" << r.rho << " delta=" << r.delta << " L=" << r.L << "): " << r.error << '\n';
    else if (!f.quiet)
      err << '[' << done << '/' << total << "] " << to_string(r.method) << " eps=" << r.epsilon
          << " rho=" << r.rho << " delta=" << r.delta << " L=" << r.L << " "
          << format_delta(*r.delta_output) << '\n';
  };

  SweepReport report;
  try {
    report = run_sweep(source, grid, progress, truth ? &*truth : nullptr);
  } catch (const std::invalid_argument& e) {
    throw Failure{bad_arguments, e.what()};
  } catch (const std::exception& e) {
    throw Failure{pipeline_failure, e.what()};
  }
  report.write_csv(csv);
  csv.close();
  if (!csv) throw Failure{io_failure, "write failed: " + f.out};

  const SweepRow* best = nullptr;
  std::size_t failed = 0;
  for (const auto& r : report.rows) {
    if (!r.delta_output) {
      ++failed;
      continue;
    }
    if (!best || *r.delta_output < *best->delta_output) best = &r;
  }
  out << "rows=" << report.rows.size() << " failed=" << failed << '\n';
  if (best) {
    out << "best: method=" << to_string(best->method) << " epsilon=" << best->epsilon
        << " seed=" << best->seed << " rho=" << best->rho << " delta=" << best->delta
        << " L=" << best->L << ' ' << format_delta(*best->delta_output) << '\n';
  }
  return failed == report.rows.size() ? pipeline_failure : ok;
}

int cmd_info(const InfoFlags& f, std::ostream& out) {
  if (f.n == 0) throw Failure{bad_arguments, "--n must be >= 1"};
  try {
    validate_patch_side(f.rho, f.n);
  } catch (const std::invalid_argument& e) {
    throw Failure{bad_arguments, e.what()};
  }
  const MemoryEstimate e = estimate_memory(f.n, f.rho, f.delta);
  out << "vertices=" << e.vertices << '\n'
      << "distance_matrix=" << format_bytes(e.distance_bytes) << '\n'
      << "patches=" << format_bytes(e.patch_bytes) << '\n'
      << "graph=" << format_bytes(e.graph_bytes) << '\n'
      << "total=" << format_bytes(e.total_bytes()) << '\n'
      << "memory_guard=" << (e.exceeds_guard() ? "exceeded" : "ok") << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patch-space geodesic Gramian image denoising"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with per-subcommand defaults; flags take precedence");

  DenoiseFlags dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "Denoise an image");
  denoise_cmd->add_option("--in", dn.in, "noisy input image")->required();
  denoise_cmd->add_option("--out", dn.out, "denoised output image")->required();
  denoise_cmd->add_option("--method", dn.method)
      ->check(CLI::IsMember({"ggd", "gld"}))
      ->capture_default_str();
  denoise_cmd->add_option("--rho", dn.rho, "patch side (odd)")->capture_default_str();
  denoise_cmd->add_option("--delta", dn.delta, "nearest neighbours per patch")->capture_default_str();
  denoise_cmd->add_option("--L", dn.L, "eigenvector threshold")->capture_default_str();
  denoise_cmd->add_option("--truth", dn.truth, "ground truth; prints the error of the output");
  denoise_cmd->add_flag("--min-eigenvalue", dn.min_eigenvalue,
                        "also report the most negative Gramian eigenvalue");
  dn.common.attach(denoise_cmd);

  NoiseFlags nf;
  auto* noise_cmd = app.add_subcommand("add-noise", "Add seeded uniform noise");
  noise_cmd->add_option("--in", nf.in)->required();
  noise_cmd->add_option("--out", nf.out)->required();
  noise_cmd->add_option("--epsilon", nf.epsilon, "noise amplitude")->required();
  noise_cmd->add_option("--seed", nf.seed)->capture_default_str();

  CompareFlags cf;
  auto* compare_cmd = app.add_subcommand("compare", "Print the relative error between two images");
  compare_cmd->add_option("--a", cf.a)->required();
  compare_cmd->add_option("--b", cf.b)->required();

  const CLI::Validator non_empty(
      [](std::string& v) { return v.empty() ? std::string("empty grid list entry") : std::string(); },
      "NONEMPTY");
  SweepFlags sf;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid and write CSV");
  sweep_cmd->add_option("--in", sf.in, "clean image to corrupt")->required();
  sweep_cmd->add_option("--truth", sf.truth, "reference for errors (default: --in)");
  sweep_cmd->add_option("--epsilons", sf.epsilons)->delimiter(',')->check(non_empty)->required();
  sweep_cmd->add_option("--rhos", sf.rhos)->delimiter(',')->check(non_empty)->required();
  sweep_cmd->add_option("--deltas", sf.deltas)->delimiter(',')->check(non_empty)->required();
  sweep_cmd->add_option("--Ls", sf.Ls)->delimiter(',')->check(non_empty)->required();
  sweep_cmd->add_option("--methods", sf.methods)
      ->delimiter(',')
      ->check(non_empty)
      ->check(CLI::IsMember({"ggd", "gld"}))
      ->required();
  sweep_cmd->add_option("--seeds", sf.seeds)->delimiter(',')->check(non_empty)->required();
  sweep_cmd->add_option("--out", sf.out, "CSV output")->required();
  sweep_cmd->add_option("--checkpoint-dir", sf.checkpoint_dir,
                        "persist geodesic matrices and bases here");
  sweep_cmd->add_flag("--quiet", sf.quiet, "no per-row progress");
  sf.common.attach(sweep_cmd);

  InfoFlags inf;
  auto* info_cmd = app.add_subcommand("info", "Projected memory footprint");
  info_cmd->add_option("--n", inf.n, "image side")->required();
  info_cmd->add_option("--rho", inf.rho)->capture_default_str();
  info_cmd->add_option("--delta", inf.delta)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return io_failure;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return bad_arguments;
  }

  try {
    if (*denoise_cmd) return cmd_denoise(dn, out, err);
    if (*noise_cmd) return cmd_add_noise(nf, out);
    if (*compare_cmd) return cmd_compare(cf, out);
    if (*sweep_cmd) return cmd_sweep(sf, out, err);
    if (*info_cmd) return cmd_info(inf, out);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return bad_arguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return pipeline_failure;
  }
  return bad_arguments;
}

}  // namespace ggd::cli
