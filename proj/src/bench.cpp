#include "bhrt/bench.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

#include "bhrt/config.hpp"

namespace bhrt {

namespace {

double time_render(const SceneConfig& scene, int workers, const RenderRunner& runner) {
    const auto start = std::chrono::steady_clock::now();
    if (runner) {
        runner(scene, workers);
    } else {
        render_image(scene, workers);
    }
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

TimingRecord make_record(const SceneConfig& scene, BenchMode mode, int workers, int run_index,
                         double seconds) {
    TimingRecord rec;
    rec.mode = mode;
    rec.workers = workers;
    rec.threads_per_worker = 1;
    rec.width = scene.camera.width;
    rec.height = scene.camera.height;
    rec.spp = scene.samples.spp;
    rec.epsilon = scene.trace.epsilon;
    rec.run_index = run_index;
    rec.wall_seconds = seconds;
    return rec;
}

const char* mode_name(BenchMode mode) {
    return mode == BenchMode::threads ? "threads" : "multiprocess";
}

BenchMode mode_from(const std::string& name) {
    if (name == "threads") return BenchMode::threads;
    if (name == "multiprocess") return BenchMode::multiprocess;
    throw UsageError("bench CSV: unknown mode '" + name + "'");
}

// Configuration identity: everything except run index and time.
std::string config_key(const TimingRecord& r) {
    std::ostringstream key;
    key << mode_name(r.mode) << '|' << r.workers << '|' << r.threads_per_worker << '|' << r.width
        << '|' << r.height << '|' << r.spp << '|' << format_double(r.epsilon);
    return key.str();
}

}  // namespace

std::vector<TimingRecord> run_strong_scaling(const SceneConfig& scene,
                                             const std::vector<int>& worker_counts, int repeats,
                                             BenchMode mode, const RenderRunner& runner) {
    if (repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
    if (worker_counts.empty()) throw std::invalid_argument("bench: worker_counts is empty");
    std::vector<TimingRecord> records;
    records.reserve(worker_counts.size() * static_cast<std::size_t>(repeats));
    for (const int workers : worker_counts) {
        if (workers < 1) throw std::invalid_argument("bench: worker counts must be >= 1");
        for (int run = 0; run < repeats; ++run)
            records.push_back(
                make_record(scene, mode, workers, run, time_render(scene, workers, runner)));
    }
    return records;
}

std::vector<TimingRecord> run_weak_scaling(const SceneConfig& scene_template,
                                           const std::vector<std::pair<int, int>>& pairs,
                                           int repeats, BenchMode mode,
                                           const RenderRunner& runner) {
    if (repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
    if (pairs.empty()) throw std::invalid_argument("bench: pairs is empty");
    std::vector<TimingRecord> records;
    records.reserve(pairs.size() * static_cast<std::size_t>(repeats));
    for (const auto& [workers, width] : pairs) {
        if (workers < 1 || width < 1)
            throw std::invalid_argument("bench: workers and width must be >= 1");
        SceneConfig scene = scene_template;
        scene.camera.width = width;
        for (int run = 0; run < repeats; ++run)
            records.push_back(
                make_record(scene, mode, workers, run, time_render(scene, workers, runner)));
    }
    return records;
}

std::string emit_csv(const std::vector<TimingRecord>& records) {
    std::ostringstream out;
    out << "mode,workers,threads_per_worker,width,height,spp,epsilon,run,wall_seconds\n";

    const auto emit_row = [&out](const TimingRecord& r) {
        out << mode_name(r.mode) << ',' << r.workers << ',' << r.threads_per_worker << ','
            << r.width << ',' << r.height << ',' << r.spp << ',' << format_double(r.epsilon) << ','
            << r.run_index << ',' << format_double(r.wall_seconds) << '\n';
    };

    for (const TimingRecord& r : records) emit_row(r);

    // Per-configuration means, in first-appearance order, flagged run=-1.
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, int>> sums;
    for (const TimingRecord& r : records) {
        const std::string key = config_key(r);
        auto [it, inserted] = sums.try_emplace(key, 0.0, 0);
        if (inserted) order.push_back(key);
        it->second.first += r.wall_seconds;
        it->second.second += 1;
    }
    for (const std::string& key : order) {
        const auto& [sum, count] = sums.at(key);
        // Recover the representative record for this configuration.
        for (const TimingRecord& r : records) {
            if (config_key(r) == key) {
                TimingRecord mean = r;
                mean.run_index = -1;
                mean.wall_seconds = sum / count;
                emit_row(mean);
                break;
            }
        }
    }
    return out.str();
}

std::vector<TimingRecord> parse_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "mode,workers,threads_per_worker,width,height,spp,epsilon,run,wall_seconds")
        throw UsageError("bench CSV: missing or unexpected header");

    std::vector<TimingRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 9) throw UsageError("bench CSV: expected 9 fields per row");

        TimingRecord r;
        r.mode = mode_from(fields[0]);
        r.workers = static_cast<int>(parse_int(fields[1], "workers"));
        r.threads_per_worker = static_cast<int>(parse_int(fields[2], "threads_per_worker"));
        r.width = static_cast<int>(parse_int(fields[3], "width"));
        r.height = static_cast<int>(parse_int(fields[4], "height"));
        r.spp = static_cast<int>(parse_int(fields[5], "spp"));
        r.epsilon = parse_double(fields[6], "epsilon");
        r.run_index = static_cast<int>(parse_int(fields[7], "run"));
        r.wall_seconds = parse_double(fields[8], "wall_seconds");
        records.push_back(r);
    }
    return records;
}

double mean_wall_seconds(const std::vector<TimingRecord>& records, int workers) {
    double sum = 0.0;
    int count = 0;
    for (const TimingRecord& r : records) {
        if (r.workers == workers && r.run_index >= 0) {
            sum += r.wall_seconds;
            ++count;
        }
    }
    if (count == 0)
        throw UsageError("bench: no runs recorded for " + std::to_string(workers) + " workers");
    return sum / count;
}

}  // namespace bhrt
