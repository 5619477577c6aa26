#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "traytilt/dynamics.hpp"
#include "traytilt/entropy.hpp"
#include "traytilt/experiment.hpp"
#include "traytilt/friction.hpp"
#include "traytilt/geometry.hpp"
#include "traytilt/report.hpp"
#include "traytilt/study.hpp"
#include "traytilt/svgplot.hpp"

namespace fs = std::filesystem;
using namespace traytilt;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 ok, 2 config/validation, 3 simulation failure budget, 4 I/O.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimBudget = 3;
constexpr int kExitIo = 4;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool parse_pair(const std::string& s, double& a, double& b) {
    return std::sscanf(s.c_str(), "%lfx%lf", &a, &b) == 2;
}

bool parse_grid(const std::string& s, int& a, int& b, int& g) {
    return std::sscanf(s.c_str(), "%dx%dx%d", &a, &b, &g) == 3;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int workers, std::uint64_t seed_override, bool verbose) {
    const std::string started = iso8601_now();
    const auto t0 = std::chrono::steady_clock::now();

    std::string config_bytes;
    try {
        config_bytes = read_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    Study study;
    try {
        study = load_study(config_path);
        if (seed_override != 0) {
            for (StudyVariant& v : study.variants) {
                v.config.master_seed = seed_override;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config_path"] = config_path;
    manifest["config_fnv1a64"] = fnv1a64(config_bytes);
    manifest["started_utc"] = started;
    manifest["workers"] = workers;
    manifest["study"] = study.name;
    auto& outputs = manifest["outputs"] = nlohmann::json::array();

    int exit_status = kExitOk;
    try {
        fs::create_directories(out_dir);
        const bool single = study.variants.size() == 1;
        std::vector<std::vector<double>> trends;
        nlohmann::json variant_meta = nlohmann::json::array();

        for (const StudyVariant& variant : study.variants) {
            if (verbose) {
                std::cerr << "running variant '" << variant.label << "' (M="
                          << variant.config.trials << ", N="
                          << variant.config.sequence.actions.size() << ")\n";
            }
            const ExperimentResult res =
                run_experiment(variant.config, workers);
            const PoseLog log = pose_log_from_records(res.records);
            const TrendData trend =
                compute_trend(log, variant.config.voxel_grid());

            const std::string suffix =
                single ? "" : "_" + (variant.label.empty() ? "v" : variant.label);
            const fs::path trend_path = fs::path(out_dir) / ("trend" + suffix + ".csv");
            const fs::path trials_path = fs::path(out_dir) / ("trials" + suffix + ".csv");
            write_trend_csv(trend_path, trend);
            write_trials_csv(trials_path, log);
            outputs.push_back(trend_path.string());
            outputs.push_back(trials_path.string());
            trends.push_back(trend.h_bits);

            nlohmann::json vm;
            vm["label"] = variant.label;
            vm["failures"] = res.failures;
            vm["max_penetration"] = res.max_penetration;
            const auto conv = convergence_index(trend.h_bits,
                                                study.convergence_threshold_bits);
            vm["convergence_step"] =
                conv ? nlohmann::json(*conv) : nlohmann::json(nullptr);
            variant_meta.push_back(vm);
        }

        if (!single) {
            const AggregateTrend agg =
                aggregate_trends(trends, study.convergence_threshold_bits);
            const fs::path agg_path = fs::path(out_dir) / "aggregate.csv";
            write_aggregate_csv(agg_path, agg);
            outputs.push_back(agg_path.string());
        }
        manifest["variants"] = variant_meta;
    } catch (const FailureBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_status = kExitSimBudget;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_status = kExitConfig;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_status = kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_status = kExitConfig;
    }

    manifest["finished_utc"] = iso8601_now();
    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest["exit_status"] = exit_status;
    try {
        write_file_atomic(fs::path(out_dir) / "manifest.json",
                          manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (exit_status == kExitOk) exit_status = kExitIo;
    }
    return exit_status;
}

int cmd_entropy(const std::string& poses_path, const std::string& tray_spec,
                const std::string& grid_spec, const std::string& out_path) {
    double a = 0.2, b = 0.2;
    int alpha = 4, beta = 4, gamma = 4;
    if (!parse_pair(tray_spec, a, b)) {
        std::cerr << "error: bad --tray spec '" << tray_spec
                  << "' (expected AxB)\n";
        return kExitConfig;
    }
    if (!parse_grid(grid_spec, alpha, beta, gamma)) {
        std::cerr << "error: bad --grid spec '" << grid_spec
                  << "' (expected AxBxC)\n";
        return kExitConfig;
    }
    try {
        const PoseLog log = read_poses_csv(poses_path);
        const VoxelGrid grid(Tray(a, b), alpha, beta, gamma);
        const TrendData trend = compute_trend(log, grid);
        write_trend_csv(out_path, trend);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_plot(const std::vector<std::string>& trend_files,
             const std::string& out_path, const std::string& title) {
    try {
        std::vector<std::vector<double>> trends;
        for (const std::string& f : trend_files) {
            trends.push_back(read_trend_h_bits(f));
        }
        write_file_atomic(out_path, render_trend_svg(trends, title));
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tray-tilting simulator and pose-entropy analysis"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a study from a config file");
    std::string run_config, run_out = "out";
    int run_workers = 0;
    std::uint64_t run_seed = 0;
    bool run_verbose = false;
    run->add_option("--config", run_config, "study config JSON")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_option("--workers", run_workers, "worker threads (0 = hardware)");
    run->add_option("--seed", run_seed,
                    "override the config master seed (0 = use config)");
    run->add_flag("--verbose", run_verbose, "progress to stderr");

    // entropy
    auto* entropy = app.add_subcommand(
        "entropy", "Per-step entropy trend from a pose log CSV");
    std::string ent_poses, ent_tray = "0.2x0.2", ent_grid = "4x4x4",
                ent_out = "entropy_trend.csv";
    entropy->add_option("--poses", ent_poses, "trial,step,x,y,theta[,settled] CSV")
        ->required();
    entropy->add_option("--tray", ent_tray, "tray size AxB in meters");
    entropy->add_option("--grid", ent_grid, "voxel grid AxBxC");
    entropy->add_option("--out", ent_out, "output trend CSV");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate shape/field/sequence files");
    gen->require_subcommand(1);

    auto* gen_shape = gen->add_subcommand("shape", "Write a shape preset");
    std::string gs_preset = "allen_key_l", gs_out = "shape.shape",
                gs_out_dir;
    std::uint64_t gs_seed = kTrianglePresetSeed;
    gen_shape->add_option("--preset", gs_preset,
                          "allen_key_l, tri_01..tri_15, or triangles (all 15)");
    gen_shape->add_option("--out", gs_out, "output file");
    gen_shape->add_option("--out-dir", gs_out_dir,
                          "output directory (preset=triangles)");
    gen_shape->add_option("--seed", gs_seed, "triangle generation seed");

    auto* gen_field = gen->add_subcommand("field", "Write a friction field");
    std::string gf_level = "uniform", gf_tray = "0.2x0.2", gf_out = "field.json";
    double gf_mu0 = 0.3, gf_amplitude = -1.0;
    int gf_grid_n = 8;
    std::uint64_t gf_seed = 0;
    gen_field->add_option("--level", gf_level, "uniform|low|medium|high");
    gen_field->add_option("--amplitude", gf_amplitude,
                          "explicit amplitude (overrides --level)");
    gen_field->add_option("--mu0", gf_mu0, "mean friction coefficient");
    gen_field->add_option("--grid-n", gf_grid_n, "node grid resolution");
    gen_field->add_option("--seed", gf_seed, "field seed");
    gen_field->add_option("--tray", gf_tray, "tray size AxB in meters");
    gen_field->add_option("--out", gf_out, "output file");

    auto* gen_seq = gen->add_subcommand("sequence", "Write an action sequence");
    int gq_n = 50;
    std::uint64_t gq_seed = 0;
    double gq_tilt_deg = 30.0;
    std::string gq_out = "sequence.json";
    gen_seq->add_option("--n", gq_n, "number of tilts");
    gen_seq->add_option("--seed", gq_seed, "sequence seed");
    gen_seq->add_option("--tilt-deg", gq_tilt_deg, "tilt angle, degrees");
    gen_seq->add_option("--out", gq_out, "output file");

    // plot
    auto* plot = app.add_subcommand("plot", "Render trend CSVs as SVG");
    std::vector<std::string> plot_files;
    std::string plot_out = "trend.svg", plot_title;
    plot->add_option("files", plot_files, "trend CSV files")->required();
    plot->add_option("--out", plot_out, "output SVG");
    plot->add_option("--title", plot_title, "plot title");

    // ricerule
    auto* rice = app.add_subcommand(
        "ricerule", "Trial count suggested for a voxel count");
    std::int64_t rice_voxels = 0;
    rice->add_option("--voxels", rice_voxels, "total voxel count")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_config, run_out, run_workers, run_seed,
                           run_verbose);
        }
        if (entropy->parsed()) {
            return cmd_entropy(ent_poses, ent_tray, ent_grid, ent_out);
        }
        if (gen->parsed()) {
            if (gen_shape->parsed()) {
                if (gs_preset == "triangles") {
                    if (gs_out_dir.empty()) {
                        std::cerr << "error: --out-dir required for "
                                     "preset=triangles\n";
                        return kExitConfig;
                    }
                    fs::create_directories(gs_out_dir);
                    for (int k = 1; k <= 15; ++k) {
                        const PartShape s = triangle_shape(k, gs_seed);
                        save_shape(s.name(), s.vertices(), s.density(),
                                   fs::path(gs_out_dir) / (s.name() + ".shape"));
                    }
                } else {
                    const PartShape s = gs_preset == "allen_key_l"
                                            ? allen_key_shape()
                                            : shape_preset(gs_preset);
                    save_shape(s.name(), s.vertices(), s.density(), gs_out);
                }
                return kExitOk;
            }
            if (gen_field->parsed()) {
                double a = 0.2, b = 0.2;
                if (!parse_pair(gf_tray, a, b)) {
                    std::cerr << "error: bad --tray spec\n";
                    return kExitConfig;
                }
                const double amplitude =
                    gf_amplitude >= 0.0
                        ? gf_amplitude
                        : noise_amplitude(parse_noise_level(gf_level));
                FrictionField::generate(gf_mu0, amplitude, gf_grid_n, gf_seed,
                                        Tray(a, b))
                    .save(gf_out);
                return kExitOk;
            }
            if (gen_seq->parsed()) {
                const ActionSequence seq = generate_sequence(
                    gq_n, gq_seed, gq_tilt_deg * std::numbers::pi / 180.0);
                save_sequence(seq, gq_out);
                return kExitOk;
            }
        }
        if (plot->parsed()) {
            return cmd_plot(plot_files, plot_out, plot_title);
        }
        if (rice->parsed()) {
            const RiceRule r = rice_rule_trials(rice_voxels);
            std::cout << "voxels=" << rice_voxels << " trials=" << r.trials
                      << " exact=" << fmt17(r.exact) << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
