#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bhrt/render.hpp"

namespace bhrt {

enum class BenchMode { threads, multiprocess };

/// One timed render. For mode == threads, `workers` is the thread-pool
/// size and threads_per_worker is 1; for multiprocess runs, `workers`
/// counts processes. run_index == -1 flags a per-configuration mean row
/// in CSV output.
struct TimingRecord {
    BenchMode mode = BenchMode::threads;
    int workers = 1;
    int threads_per_worker = 1;
    int width = 0;
    int height = 0;
    int spp = 1;
    double epsilon = 0.0;
    int run_index = 0;
    double wall_seconds = 0.0;
};

/// Performs one render at the given parallelism; the default runs
/// render_image and discards the image.
using RenderRunner = std::function<void(const SceneConfig&, int workers)>;

/// Fixed workload, sweeping worker counts; `repeats` runs per count.
/// Timing spans the render call only (background loading and file I/O are
/// excluded by construction).
std::vector<TimingRecord> run_strong_scaling(const SceneConfig& scene,
                                             const std::vector<int>& worker_counts, int repeats,
                                             BenchMode mode = BenchMode::threads,
                                             const RenderRunner& runner = {});

/// Workload grows with the worker count: each pair is (workers, width),
/// height stays fixed at the template's.
std::vector<TimingRecord> run_weak_scaling(const SceneConfig& scene_template,
                                           const std::vector<std::pair<int, int>>& pairs,
                                           int repeats, BenchMode mode = BenchMode::threads,
                                           const RenderRunner& runner = {});

/// Header + one row per record + per-configuration mean rows (run=-1).
/// Numeric fields round-trip exactly.
std::string emit_csv(const std::vector<TimingRecord>& records);

/// Parses emit_csv output (mean rows included). Throws UsageError on
/// malformed input.
std::vector<TimingRecord> parse_csv(const std::string& csv);

/// Mean wall seconds of the run rows (run >= 0) for a worker count.
double mean_wall_seconds(const std::vector<TimingRecord>& records, int workers);

}  // namespace bhrt
