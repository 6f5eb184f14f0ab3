// bhrt - black hole ray tracer CLI.
//
// Subcommands: render (single process), coordinator/worker (multi-process
// over TCP), bench (scaling sweeps to CSV). Exit codes: 0 ok, 1 usage,
// 2 I/O, 3 numerical failure, 4 protocol error.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "bhrt/bench.hpp"
#include "bhrt/config.hpp"
#include "bhrt/netrender.hpp"
#include "bhrt/render.hpp"

namespace {

using bhrt::KvMap;
using bhrt::UsageError;

// One source of truth for every flag: name, default, help text. Values
// resolve as defaults < --config file < explicit command-line flags.
struct OptionSpec {
    const char* key;
    const char* def;
    const char* help;
};

constexpr OptionSpec kSceneOptions[] = {
    {"mass", "1", "black hole mass M (geometric units; 0 = flat space)"},
    {"center", "0,0,0", "black hole world position x,y,z"},
    {"cam-pos", "0,0,-20", "camera position x,y,z"},
    {"look-at", "0,0,0", "camera look-at point x,y,z"},
    {"fov", "60", "vertical field of view in degrees"},
    {"fov-rad", "", "vertical field of view in radians (overrides --fov)"},
    {"width", "256", "image width in pixels"},
    {"height", "256", "image height in pixels"},
    {"spp", "1", "antialiasing samples per pixel"},
    {"seed", "1", "sample jitter seed (64-bit)"},
    {"epsilon", "0.05", "target polyline segment length"},
    {"escape-radius", "auto", "escape radius; auto = max(1e4*M, 2*camera distance)"},
    {"max-windings", "10", "full turns of phi before a ray counts as stalled"},
    {"rel-tol", "1e-10", "integrator relative tolerance"},
    {"abs-tol", "1e-12", "integrator absolute tolerance"},
};

class Options {
public:
    Options(CLI::App* cmd, std::initializer_list<OptionSpec> extra) {
        for (const OptionSpec& spec : kSceneOptions) add(cmd, spec);
        for (const OptionSpec& spec : extra) add(cmd, spec);
        cmd->add_option("--config", config_path_,
                        "key=value config file; command-line flags take precedence");
    }

    // defaults < config file < flags.
    void resolve() {
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in) throw bhrt::IoError("cannot open config file '" + config_path_ + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            for (const auto& [key, value] : bhrt::parse_kv(buf.str())) {
                if (values_.find(key) == values_.end())
                    throw UsageError("config file: unknown key '" + key + "'");
                if (!given_.count(key)) values_[key] = value;
            }
        }
    }

    const std::string& str(const std::string& key) const { return values_.at(key); }
    bool empty(const std::string& key) const { return values_.at(key).empty(); }

    double number(const std::string& key) const {
        return bhrt::parse_double(values_.at(key), "--" + key);
    }
    int integer(const std::string& key) const {
        return static_cast<int>(bhrt::parse_int(values_.at(key), "--" + key));
    }

private:
    void add(CLI::App* cmd, const OptionSpec& spec) {
        const std::string key = spec.key;
        values_[key] = spec.def;
        CLI::Option* opt = cmd->add_option_function<std::string>(
            "--" + key,
            [this, key](const std::string& v) {
                values_[key] = v;
                given_.insert(key);
            },
            spec.help);
        if (*spec.def) opt->default_str(spec.def);
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> given_;
    std::string config_path_;
};

unsigned default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

int resolve_threads(const Options& opt) {
    const int threads = opt.integer("threads");
    if (threads < 0) throw UsageError("invalid --threads: must be >= 0 (0 = auto)");
    return threads == 0 ? static_cast<int>(default_threads()) : threads;
}

bhrt::SceneConfig build_scene(const Options& opt) {
    bhrt::SceneConfig scene;
    scene.hole.mass = opt.number("mass");
    if (scene.hole.mass < 0.0) throw UsageError("invalid --mass: must be >= 0");
    scene.hole.center = bhrt::parse_vec3(opt.str("center"), "--center");

    scene.camera.position = bhrt::parse_vec3(opt.str("cam-pos"), "--cam-pos");
    scene.camera.look_at = bhrt::parse_vec3(opt.str("look-at"), "--look-at");
    if (!opt.empty("fov-rad")) {
        scene.camera.vertical_fov = opt.number("fov-rad");
    } else {
        scene.camera.vertical_fov = opt.number("fov") * std::numbers::pi / 180.0;
    }
    if (!(scene.camera.vertical_fov > 0.0) || !(scene.camera.vertical_fov < std::numbers::pi))
        throw UsageError("invalid --fov: vertical fov must be in (0, 180) degrees");
    scene.camera.width = opt.integer("width");
    scene.camera.height = opt.integer("height");
    if (scene.camera.width < 1) throw UsageError("invalid --width: must be >= 1");
    if (scene.camera.height < 1) throw UsageError("invalid --height: must be >= 1");

    scene.samples.spp = opt.integer("spp");
    if (scene.samples.spp < 1) throw UsageError("invalid --spp: must be >= 1");
    scene.samples.seed = bhrt::parse_uint64(opt.str("seed"), "--seed");

    scene.trace.epsilon = opt.number("epsilon");
    if (!(scene.trace.epsilon > 0.0)) throw UsageError("invalid --epsilon: must be > 0");
    if (opt.str("escape-radius") == "auto") {
        scene.trace.escape_radius = bhrt::default_escape_radius(
            scene.hole.mass, bhrt::distance(scene.camera.position, scene.hole.center));
    } else {
        scene.trace.escape_radius = opt.number("escape-radius");
        if (!(scene.trace.escape_radius > 0.0))
            throw UsageError("invalid --escape-radius: must be > 0");
    }
    scene.trace.max_windings = opt.integer("max-windings");
    if (scene.trace.max_windings < 1) throw UsageError("invalid --max-windings: must be >= 1");
    scene.trace.rel_tol = opt.number("rel-tol");
    if (!(scene.trace.rel_tol > 0.0)) throw UsageError("invalid --rel-tol: must be > 0");
    scene.trace.abs_tol = opt.number("abs-tol");
    if (!(scene.trace.abs_tol > 0.0)) throw UsageError("invalid --abs-tol: must be > 0");
    return scene;
}

std::string required(const Options& opt, const std::string& key) {
    if (opt.empty(key)) throw UsageError("missing required --" + key);
    return opt.str(key);
}

std::vector<int> parse_count_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(bhrt::parse_int(item, key)));
    if (out.empty()) throw UsageError("invalid " + key + ": empty list");
    return out;
}

// "1x128,2x256" -> [(1,128), (2,256)]
std::vector<std::pair<int, int>> parse_pair_list(const std::string& text, const std::string& key) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t x = item.find('x');
        if (x == std::string::npos)
            throw UsageError("invalid " + key + ": expected WORKERSxWIDTH, got '" + item + "'");
        out.push_back({static_cast<int>(bhrt::parse_int(item.substr(0, x), key)),
                       static_cast<int>(bhrt::parse_int(item.substr(x + 1), key))});
    }
    if (out.empty()) throw UsageError("invalid " + key + ": empty list");
    return out;
}

int cmd_render(const Options& opt) {
    bhrt::SceneConfig scene = build_scene(opt);
    const std::string background = required(opt, "background");
    const std::string output = required(opt, "output");

    const bhrt::ImageBuffer bg = bhrt::load_ppm_file(background);
    scene.background = &bg;
    bhrt::validate_scene(scene);

    const int threads = resolve_threads(opt);
    const bhrt::ImageBuffer image = bhrt::render_image(scene, threads);
    bhrt::save_ppm_file(image, output);
    std::cerr << "wrote " << output << " (" << image.width() << "x" << image.height() << ", "
              << threads << " threads)\n";
    return 0;
}

int cmd_coordinator(const Options& opt) {
    bhrt::SceneConfig scene = build_scene(opt);
    const std::string background = required(opt, "background");
    const std::string output = required(opt, "output");
    const int worker_count = opt.integer("workers");
    if (worker_count < 1) throw UsageError("invalid --workers: must be >= 1");

    const bhrt::ImageBuffer bg = bhrt::load_ppm_file(background);
    scene.background = &bg;
    bhrt::validate_scene(scene);

    const auto [host, port] = bhrt::parse_endpoint(required(opt, "listen"));
    bhrt::TcpListener listener(host, port);
    std::cout << "listening on " << host << ":" << listener.port() << std::endl;

    std::vector<std::unique_ptr<bhrt::FdStream>> streams;
    std::vector<bhrt::ByteStream*> workers;
    for (int i = 0; i < worker_count; ++i) {
        streams.push_back(listener.accept());
        workers.push_back(streams.back().get());
    }
    std::cerr << worker_count << " workers connected\n";

    const bhrt::ImageBuffer image = bhrt::run_coordinator(scene, workers);
    bhrt::save_ppm_file(image, output);
    std::cerr << "wrote " << output << "\n";
    return 0;
}

int cmd_worker(const Options& opt) {
    const auto [host, port] = bhrt::parse_endpoint(required(opt, "connect"));
    const std::unique_ptr<bhrt::FdStream> stream = bhrt::connect_tcp(host, port);
    bhrt::run_worker(*stream, resolve_threads(opt));
    return 0;
}

int cmd_bench(const Options& opt) {
    bhrt::SceneConfig scene = build_scene(opt);
    const std::string background = required(opt, "background");
    const std::string output = required(opt, "output");
    const int repeats = opt.integer("repeats");
    if (repeats < 1) throw UsageError("invalid --repeats: must be >= 1");

    const bhrt::ImageBuffer bg = bhrt::load_ppm_file(background);
    scene.background = &bg;
    bhrt::validate_scene(scene);

    const std::string sweep = opt.str("sweep");
    std::vector<bhrt::TimingRecord> records;
    if (sweep == "strong") {
        records = bhrt::run_strong_scaling(
            scene, parse_count_list(opt.str("worker-counts"), "--worker-counts"), repeats);
    } else if (sweep == "weak") {
        records = bhrt::run_weak_scaling(
            scene, parse_pair_list(opt.str("weak-pairs"), "--weak-pairs"), repeats);
    } else {
        throw UsageError("invalid --sweep: expected 'strong' or 'weak'");
    }

    const std::string csv = bhrt::emit_csv(records);
    std::ofstream out(output, std::ios::trunc);
    if (!out) throw bhrt::IoError("cannot open '" + output + "' for writing");
    out << csv;
    if (!out) throw bhrt::IoError("write failed for '" + output + "'");
    std::cerr << "wrote " << output << " (" << records.size() << " runs)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bhrt - black hole ray tracer"};
    app.require_subcommand(1);

    CLI::App* render = app.add_subcommand("render", "render one image to a PPM file");
    Options render_opt(render, {
        {"background", "", "background sky image (binary PPM, required)"},
        {"output", "", "output image path (required)"},
        {"threads", "0", "render threads (0 = all hardware threads)"},
    });

    CLI::App* coordinator =
        app.add_subcommand("coordinator", "accept workers and assemble a distributed render");
    Options coordinator_opt(coordinator, {
        {"background", "", "background sky image (binary PPM, required)"},
        {"output", "", "output image path (required)"},
        {"listen", "127.0.0.1:4900", "listen endpoint host:port (port 0 = pick a free port)"},
        {"workers", "1", "number of worker connections to wait for"},
    });

    CLI::App* worker = app.add_subcommand("worker", "connect to a coordinator and render a band");
    Options worker_opt(worker, {
        {"connect", "127.0.0.1:4900", "coordinator endpoint host:port"},
        {"threads", "0", "render threads (0 = all hardware threads)"},
    });

    CLI::App* bench = app.add_subcommand("bench", "timed scaling sweeps, written as CSV");
    Options bench_opt(bench, {
        {"background", "", "background sky image (binary PPM, required)"},
        {"output", "", "CSV output path (required)"},
        {"sweep", "strong", "sweep type: strong (fixed work) or weak (work grows)"},
        {"worker-counts", "1,2,4", "strong sweep thread counts, comma separated"},
        {"weak-pairs", "1x128,2x256,4x512", "weak sweep WORKERSxWIDTH pairs"},
        {"repeats", "5", "timed runs per configuration"},
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (render->parsed()) {
            render_opt.resolve();
            return cmd_render(render_opt);
        }
        if (coordinator->parsed()) {
            coordinator_opt.resolve();
            return cmd_coordinator(coordinator_opt);
        }
        if (worker->parsed()) {
            worker_opt.resolve();
            return cmd_worker(worker_opt);
        }
        bench_opt.resolve();
        return cmd_bench(bench_opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const bhrt::ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return 4;
    } catch (const bhrt::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const bhrt::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
