#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ggd/pipeline.hpp"

namespace ggd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Keyed {
  std::array<std::size_t, 6> key;  // method, epsilon, seed, rho, delta, L positions
  SweepRow row;
};

std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::size_t SweepGrid::cell_count() const {
  return epsilons.size() * rhos.size() * deltas.size() * Ls.size() * methods.size() * seeds.size();
}

void SweepReport::write_csv(std::ostream& out) const {
  const auto opt = [](const std::optional<double>& v, const char* fmt) {
    return v ? format_number(fmt, *v) : std::string("NA");
  };
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << format_number("%g", r.epsilon) << ',' << r.seed << ','
        << r.rho << ',' << r.delta << ',' << r.L << ',' << opt(r.beta, "%g") << ','
        << opt(r.gamma, "%g") << ',' << format_number("%.10f", r.delta_input) << ','
        << opt(r.delta_output, "%.10f") << ',' << format_number("%.3f", r.wall_time_s) << '\n';
  }
}

SweepReport run_sweep(const Image& source, const SweepGrid& grid, const SweepProgress& progress,
                      const Image* reference) {
  if (grid.epsilons.empty() || grid.rhos.empty() || grid.deltas.empty() || grid.Ls.empty() ||
      grid.methods.empty() || grid.seeds.empty())
    throw std::invalid_argument("every sweep grid list needs at least one value");
  const Image& truth = reference ? *reference : source;
  if (truth.side() != source.side())
    throw std::invalid_argument("reference and source images differ in size");

  const std::size_t n = source.side();
  const std::size_t vertices = source.pixel_count();
  std::size_t delta_max = 0;
  for (auto d : grid.deltas)
    if (d >= 1 && d < vertices) delta_max = std::max(delta_max, d);
  std::size_t basis_max = 0;
  for (auto L : grid.Ls)
    if (L >= 1 && L <= vertices) basis_max = std::max(basis_max, L);

  std::vector<Keyed> out;
  out.reserve(grid.cell_count());

  for (std::size_t ie = 0; ie < grid.epsilons.size(); ++ie) {
    for (std::size_t is = 0; is < grid.seeds.size(); ++is) {
      const Image noisy = add_uniform_noise(source, {grid.epsilons[ie], grid.seeds[is]});
      const double delta_input = reconstruction_error(truth, noisy);

      for (std::size_t im = 0; im < grid.methods.size(); ++im) {
        for (std::size_t ir = 0; ir < grid.rhos.size(); ++ir) {
          DenoiseConfig config;
          config.method = grid.methods[im];
          config.rho = grid.rhos[ir];
          config.beta = grid.beta;
          config.gamma = grid.gamma;
          config.backend = grid.backend;
          config.eigen = grid.eigen;
          config.override_memory_guard = grid.override_memory_guard;

          const auto emit = [&](std::size_t id, std::size_t il, double seconds,
                                std::optional<double> delta_output, std::string error) {
            SweepRow row;
            row.method = config.method;
            row.epsilon = grid.epsilons[ie];
            row.seed = grid.seeds[is];
            row.rho = config.rho;
            row.delta = grid.deltas[id];
            row.L = grid.Ls[il];
            if (config.method == Method::gld) {
              row.beta = grid.beta;
              row.gamma = grid.gamma;
            }
            row.delta_input = delta_input;
            row.delta_output = delta_output;
            row.wall_time_s = seconds;
            row.error = std::move(error);
            if (progress) progress(row);
            out.push_back({{im, ie, is, ir, id, il}, std::move(row)});
          };

          // Neighbour table shared by every delta of this (noise, method, rho).
          std::optional<KnnTable> knn;
          double knn_seconds = 0.0;
          std::string knn_error;
          if (delta_max > 0) {
            const auto start = Clock::now();
            try {
              validate_patch_side(config.rho, n);
              knn = knn_table(extract_patches(noisy, config.rho), delta_max, metric_for(config));
            } catch (const std::exception& e) {
              knn_error = e.what();
            }
            knn_seconds = seconds_since(start);
          }

          for (std::size_t id = 0; id < grid.deltas.size(); ++id) {
            config.delta = grid.deltas[id];
            config.L = std::max<std::size_t>(basis_max, 1);
            std::optional<SpectralStage> stage;
            std::string stage_error = knn_error;
            double stage_seconds = knn_seconds;
            if (stage_error.empty()) {
              const auto start = Clock::now();
              try {
                if (basis_max == 0)
                  throw std::invalid_argument("eigenvector threshold must satisfy 1 <= L <= n^2");
                StageReuse reuse;
                reuse.knn = knn ? &*knn : nullptr;
                reuse.checkpoint_dir = grid.checkpoint_dir;
                stage = prepare_stage(noisy, config, basis_max, reuse);
              } catch (const std::exception& e) {
                stage_error = e.what();
              }
              stage_seconds += seconds_since(start);
            }

            for (std::size_t il = 0; il < grid.Ls.size(); ++il) {
              if (!stage) {
                emit(id, il, stage_seconds, std::nullopt, stage_error);
                continue;
              }
              const auto start = Clock::now();
              try {
                const Image denoised = reconstruct(*stage, grid.Ls[il]);
                const double err = reconstruction_error(truth, denoised);
                emit(id, il, stage_seconds + seconds_since(start), err, "");
              } catch (const std::exception& e) {
                emit(id, il, stage_seconds + seconds_since(start), std::nullopt, e.what());
              }
            }
          }
        }
      }
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
  SweepReport report;
  report.rows.reserve(out.size());
  for (auto& k : out) report.rows.push_back(std::move(k.row));
  return report;
}

}  // namespace ggd
