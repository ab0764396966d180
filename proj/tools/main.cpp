#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "latedit/config.hpp"
#include "latedit/corpus.hpp"
#include "latedit/image_io.hpp"
#include "latedit/ito.hpp"
#include "latedit/manifest.hpp"
#include "latedit/metrics.hpp"

namespace fs = std::filesystem;
using namespace latedit;

namespace {

constexpr const char* kCsvHeader =
    "run_id,method,class_o,row_o,col_o,class_e,row_e,col_e,"
    "lambda,gamma,t_u,k,t_E,tau,n_seeds,sigma_blur,seed,"
    "l1_full,l1_background,edit_success,original_retained,mask_iou,duration_ms";

struct ConditionFlags {
    int class_id = -1;
    int row = -1;
    int col = -1;

    Condition build() const {
        Condition c;
        if (class_id >= 0) c.class_id = class_id;
        if (row >= 0 || col >= 0) {
            if (row < 0 || col < 0) {
                throw CLI::ValidationError("layout needs both --row and --col");
            }
            c.layout = GridPos{row, col};
        }
        return c;
    }
    bool full() const { return class_id >= 0 && row >= 0 && col >= 0; }
};

fs::path resolve_out_dir(const std::string& flag, const RunConfig& config,
                         const std::string& run_name) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("LATEDIT_OUT_ROOT")) {
        return fs::path(env) / run_name;
    }
    return fs::path(config.output.dir) / run_name;
}

void write_mask_files(const fs::path& dir, const std::string& stem,
                      const EditMask& mask, double sigma_blur,
                      RunManifest* manifest) {
    const fs::path soft_path = dir / (stem + "_soft.pgm");
    const fs::path binary_path = dir / (stem + "_binary.pbm");
    const fs::path sidecar_path = dir / (stem + ".json");
    write_pgm16_map(soft_path, mask.soft, mask.height, mask.width);
    write_pbm(binary_path, mask.binary, mask.height, mask.width);
    nlohmann::json sidecar = {{"tau", mask.tau},
                              {"sigma_blur", sigma_blur},
                              {"peak", mask.peak},
                              {"seeds", mask.seeds}};
    std::ofstream out(sidecar_path);
    out << sidecar.dump(2) << "\n";
    if (manifest) {
        manifest->add_artifact(stem + "_soft", soft_path);
        manifest->add_artifact(stem + "_binary", binary_path);
        manifest->add_artifact(stem + "_sidecar", sidecar_path);
    }
}

std::string csv_row(const std::string& run_id, const std::string& method,
                    const GroundTruth& truth, const EditParams& p,
                    const MetricsRecord& rec, double duration_ms) {
    std::ostringstream row;
    row << run_id << ',' << method << ',' << truth.class_original << ','
        << truth.pos_original.row << ',' << truth.pos_original.col << ','
        << truth.class_edit << ',' << truth.pos_edit.row << ','
        << truth.pos_edit.col << ',' << p.lambda << ',' << p.gamma << ','
        << p.t_u << ',' << p.k << ',' << p.t_E << ',' << p.tau << ','
        << p.n_seeds << ',' << p.sigma_blur << ',' << p.seed << ','
        << rec.l1_full << ',' << rec.l1_background << ','
        << (rec.edit_success ? 1 : 0) << ',' << (rec.original_retained ? 1 : 0)
        << ',' << rec.mask_iou << ',' << duration_ms;
    return row.str();
}

void append_csv(const fs::path& path, const std::vector<std::string>& rows) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open report: " + path.string());
    if (fresh) out << kCsvHeader << "\n";
    for (const std::string& row : rows) out << row << "\n";
}

nlohmann::json condition_json(const Condition& c) {
    nlohmann::json j;
    j["class"] = c.class_id ? nlohmann::json(*c.class_id) : nlohmann::json();
    if (c.layout) {
        j["row"] = c.layout->row;
        j["col"] = c.layout->col;
    } else {
        j["row"] = nullptr;
        j["col"] = nullptr;
    }
    return j;
}

Condition condition_from_json(const nlohmann::json& j) {
    Condition c;
    if (!j.at("class").is_null()) c.class_id = j.at("class").get<int>();
    if (!j.at("row").is_null()) {
        c.layout = GridPos{j.at("row").get<int>(), j.at("col").get<int>()};
    }
    return c;
}

// Runs one edit (and optionally the blending baseline), writing every
// artifact plus a manifest that reproduces the run.
int execute_edit(const RunConfig& config, const LatentImage& x0,
                 const std::optional<fs::path>& input_path, const Condition& cond_o,
                 const Condition& cond_e, bool with_baseline,
                 const EditMask* mask_override, const fs::path& out_dir,
                 const std::string& command) {
    const auto started = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);

    const SceneMixture mix = build_mixture(config.scene);
    const NoiseSchedule sched = config.build_noise_schedule();

    RunManifest manifest(command, config);
    manifest.set_condition("original", condition_json(cond_o));
    manifest.set_condition("edit", condition_json(cond_e));
    if (input_path) {
        manifest.set_note("input_path", fs::absolute(*input_path).string());
    }

    EditResult result =
        run_edit(x0, cond_o, cond_e, config.edit, mix, sched, mask_override);

    const IntensityMapping mapping;
    const fs::path input_copy = out_dir / "input.ppm";
    write_netpbm16(input_copy, x0, mapping);
    manifest.add_artifact("input", input_copy);

    const fs::path edited_path = out_dir / "edited.ppm";
    write_netpbm16(edited_path, result.edited, mapping);
    manifest.add_artifact("edited", edited_path);

    if (result.guidance) {
        const fs::path guidance_path = out_dir / "guidance.ppm";
        write_netpbm16(guidance_path, *result.guidance, mapping);
        manifest.add_artifact("guidance", guidance_path);
    }
    manifest.set_note("guidance_skipped", result.guidance_skipped);
    write_mask_files(out_dir, "mask", result.mask, config.edit.sigma_blur, &manifest);

    std::vector<std::string> rows;
    nlohmann::json metrics_json = nlohmann::json::object();
    if (cond_o.class_id && cond_o.layout && cond_e.class_id && cond_e.layout) {
        const GroundTruth truth{*cond_o.class_id, *cond_o.layout, *cond_e.class_id,
                                *cond_e.layout};
        const MetricsRecord rec = evaluate(result, truth, mix);
        result.metrics = rec;
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        rows.push_back(csv_row("edit", "ours", truth, config.edit, rec, ms));
        metrics_json["ours"] = {{"l1_full", rec.l1_full},
                                {"l1_background", rec.l1_background},
                                {"edit_success", rec.edit_success},
                                {"original_retained", rec.original_retained},
                                {"mask_iou", rec.mask_iou}};
        if (with_baseline) {
            const EditResult base = diffedit_baseline(x0, cond_o, cond_e,
                                                      config.edit, mix, sched,
                                                      mask_override);
            const fs::path base_path = out_dir / "edited_baseline.ppm";
            write_netpbm16(base_path, base.edited, mapping);
            manifest.add_artifact("edited_baseline", base_path);
            const MetricsRecord brec = evaluate(base, truth, mix);
            rows.push_back(csv_row("edit", "diffedit", truth, config.edit, brec, 0.0));
            metrics_json["diffedit"] = {{"l1_full", brec.l1_full},
                                        {"l1_background", brec.l1_background},
                                        {"edit_success", brec.edit_success},
                                        {"original_retained", brec.original_retained},
                                        {"mask_iou", brec.mask_iou}};
        }
        append_csv(out_dir / "metrics.csv", rows);
        manifest.add_artifact("metrics", out_dir / "metrics.csv");
    } else if (with_baseline) {
        const EditResult base = diffedit_baseline(x0, cond_o, cond_e, config.edit,
                                                  mix, sched, mask_override);
        const fs::path base_path = out_dir / "edited_baseline.ppm";
        write_netpbm16(base_path, base.edited, mapping);
        manifest.add_artifact("edited_baseline", base_path);
    }
    manifest.set_metrics(metrics_json);

    manifest.set_duration_ms(std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count());
    manifest.save(out_dir / "manifest.json");
    std::cout << "wrote " << (out_dir / "manifest.json").string() << "\n";
    return 0;
}

int cmd_demo(const RunConfig& config, const std::string& out_flag) {
    const fs::path out_dir = resolve_out_dir(out_flag, config, "demo");
    fs::create_directories(out_dir);

    // default position edit: first class moved across the grid diagonal
    const GridPos from{config.scene.anchor_rows.front(),
                       config.scene.anchor_cols.front()};
    const GridPos to{config.scene.anchor_rows.back(),
                     config.scene.anchor_cols.back()};
    const LatentImage x0 = render_scene(config.scene, 0, from);
    const LatentImage target = render_scene(config.scene, 0, to);
    write_netpbm16(out_dir / "target.ppm", target);

    return execute_edit(config, x0, std::nullopt, Condition::of(0, from),
                        Condition::of(0, to), false, nullptr, out_dir, "demo");
}

int cmd_sweep(RunConfig config, const std::vector<double>& lambdas,
              const std::vector<int>& tus, const std::vector<int>& ks,
              const std::vector<double>& taus, std::size_t corpus_size,
              std::uint64_t corpus_seed, int threads, const std::string& out_flag) {
    const fs::path out_dir = resolve_out_dir(out_flag, config, "sweep");
    fs::create_directories(out_dir);

    const SceneMixture mix = build_mixture(config.scene);
    const NoiseSchedule sched = config.build_noise_schedule();
    const auto corpus = make_edit_corpus(config.scene, corpus_size, corpus_seed);

    struct Cell {
        double lambda;
        int t_u;
        int k;
        double tau;
    };
    std::vector<Cell> cells;
    for (double lam : lambdas) {
        for (int tu : tus) {
            for (int k : ks) {
                for (double tau : taus) cells.push_back({lam, tu, k, tau});
            }
        }
    }

    struct Task {
        std::size_t cell;
        std::size_t item;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t i = 0; i < corpus.size(); ++i) tasks.push_back({c, i});
    }

    std::vector<std::string> rows(tasks.size());
    std::vector<LatentImage> edited(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Cell& cell = cells[tasks[idx].cell];
            const GroundTruth& truth = corpus[tasks[idx].item];
            EditParams p = config.edit;
            p.lambda = cell.lambda;
            p.t_u = std::min(cell.t_u, p.t_E);
            p.k = cell.k;
            p.tau = cell.tau;
            const std::string run_id = "cell" + std::to_string(tasks[idx].cell) +
                                       "_item" + std::to_string(tasks[idx].item);
            try {
                const auto started = std::chrono::steady_clock::now();
                const LatentImage x0 =
                    render_scene(config.scene, truth.class_original, truth.pos_original);
                const EditResult r = run_edit(
                    x0, Condition::of(truth.class_original, truth.pos_original),
                    Condition::of(truth.class_edit, truth.pos_edit), p, mix, sched);
                const MetricsRecord rec = evaluate(r, truth, mix);
                const double ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - started)
                                      .count();
                rows[idx] = csv_row(run_id, "ours", truth, p, rec, ms);
                edited[idx] = r.edited;
            } catch (const std::exception& e) {
                // report and keep sweeping
                ++failures;
                rows[idx] = run_id + ",error,,,,,,,,,,,,,,,,,,,,,";
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "cell failed (" << run_id << "): " << e.what() << "\n";
            }
        }
    };

    const int n_threads =
        threads > 0 ? threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    append_csv(out_dir / "sweep.csv", rows);

    // one contact sheet per swept axis, the other axes held at their first value
    auto sheet_for = [&](const std::string& name, auto values,
                         auto cell_matches) {
        if (values.size() < 2) return;
        std::vector<LatentImage> tiles;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            for (std::size_t v = 0; v < values.size(); ++v) {
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    if (!cell_matches(cells[c], values[v])) continue;
                    const std::size_t idx = c * corpus.size() + i;
                    if (edited[idx].size() > 0) tiles.push_back(edited[idx]);
                    break;
                }
            }
        }
        if (tiles.empty()) return;
        const LatentImage sheet = contact_sheet(
            tiles, static_cast<int>(corpus.size()), static_cast<int>(values.size()));
        write_netpbm16(out_dir / ("sheet_" + name + ".ppm"), sheet);
    };
    sheet_for("lambda", lambdas, [&](const Cell& c, double v) {
        return c.lambda == v && c.t_u == tus.front() && c.k == ks.front() &&
               c.tau == taus.front();
    });
    sheet_for("t_u", tus, [&](const Cell& c, int v) {
        return c.t_u == v && c.lambda == lambdas.front() && c.k == ks.front() &&
               c.tau == taus.front();
    });
    sheet_for("k", ks, [&](const Cell& c, int v) {
        return c.k == v && c.lambda == lambdas.front() && c.t_u == tus.front() &&
               c.tau == taus.front();
    });
    sheet_for("tau", taus, [&](const Cell& c, double v) {
        return c.tau == v && c.lambda == lambdas.front() && c.t_u == tus.front() &&
               c.k == ks.front();
    });

    RunManifest manifest("sweep", config);
    manifest.set_note("corpus_size", corpus.size());
    manifest.set_note("corpus_seed", corpus_seed);
    manifest.set_note("cells", cells.size());
    manifest.set_note("failures", failures.load());
    manifest.add_artifact("report", out_dir / "sweep.csv");
    manifest.save(out_dir / "manifest.json");
    std::cout << "wrote " << (out_dir / "sweep.csv").string() << " ("
              << tasks.size() << " rows, " << failures.load() << " failures)\n";
    return failures.load() == tasks.size() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimisation-based latent image editing on an analytic scene model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_flag;
    app.add_option("--config", config_path, "JSON configuration document");
    app.add_option("--out", out_flag, "output directory (default: $LATEDIT_OUT_ROOT)");

    // demo
    CLI::App* demo = app.add_subcommand("demo", "render a scene and run a stock edit");
    std::uint64_t demo_seed = 0;
    bool demo_has_seed = false;
    demo->add_option("--seed", demo_seed, "base RNG seed")
        ->each([&](const std::string&) { demo_has_seed = true; });

    // edit
    CLI::App* edit = app.add_subcommand("edit", "edit an image under a new condition");
    std::string input_path;
    std::string from_manifest;
    std::string mask_path;
    ConditionFlags oflags, eflags;
    bool with_baseline = false;
    double lambda = -1.0, gamma = -1.0, tau = -1.0, sigma_blur = -1.0,
           encode_ratio = -1.0;
    int t_u = -1, k = -1, n_seeds = -1;
    std::uint64_t edit_seed = 0;
    bool edit_has_seed = false;
    edit->add_option("--input", input_path, "input image (16-bit PPM)");
    edit->add_option("--from-manifest", from_manifest,
                     "re-run a previous edit from its manifest");
    edit->add_option("--class-o", oflags.class_id, "original class id");
    edit->add_option("--row-o", oflags.row, "original anchor row");
    edit->add_option("--col-o", oflags.col, "original anchor col");
    edit->add_option("--class-e", eflags.class_id, "edit class id");
    edit->add_option("--row-e", eflags.row, "edit anchor row");
    edit->add_option("--col-e", eflags.col, "edit anchor col");
    edit->add_option("--lambda", lambda, "preservation weight");
    edit->add_option("--gamma", gamma, "optimiser learning rate");
    edit->add_option("--t-u", t_u, "optimised timesteps");
    edit->add_option("--k", k, "gradient steps per timestep");
    edit->add_option("--tau", tau, "mask threshold");
    edit->add_option("--n-seeds", n_seeds, "mask averaging seeds");
    edit->add_option("--sigma-blur", sigma_blur, "mask smoothing sigma");
    edit->add_option("--encode-ratio", encode_ratio, "encoding ratio");
    edit->add_option("--mask", mask_path, "user-painted binary mask (PBM) override");
    edit->add_option("--seed", edit_seed, "base RNG seed")
        ->each([&](const std::string&) { edit_has_seed = true; });
    edit->add_flag("--baseline", with_baseline, "also run the blending baseline");

    // mask
    CLI::App* mask_cmd = app.add_subcommand("mask", "estimate the edit mask only");
    std::string mask_input;
    ConditionFlags moflags, meflags;
    double m_tau = -1.0, m_sigma_blur = -1.0;
    int m_n_seeds = -1;
    std::uint64_t mask_seed = 0;
    bool mask_has_seed = false;
    mask_cmd->add_option("--input", mask_input, "input image (16-bit PPM)");
    mask_cmd->add_option("--class-o", moflags.class_id, "original class id");
    mask_cmd->add_option("--row-o", moflags.row, "original anchor row");
    mask_cmd->add_option("--col-o", moflags.col, "original anchor col");
    mask_cmd->add_option("--class-e", meflags.class_id, "edit class id");
    mask_cmd->add_option("--row-e", meflags.row, "edit anchor row");
    mask_cmd->add_option("--col-e", meflags.col, "edit anchor col");
    mask_cmd->add_option("--tau", m_tau, "mask threshold");
    mask_cmd->add_option("--n-seeds", m_n_seeds, "mask averaging seeds");
    mask_cmd->add_option("--sigma-blur", m_sigma_blur, "mask smoothing sigma");
    mask_cmd->add_option("--seed", mask_seed, "base RNG seed")
        ->each([&](const std::string&) { mask_has_seed = true; });

    // sweep
    CLI::App* sweep = app.add_subcommand("sweep", "factorial parameter sweep");
    std::vector<double> lambdas{0.6};
    std::vector<int> tus{15};
    std::vector<int> ks{1};
    std::vector<double> taus{0.1};
    std::size_t corpus_size = 12;
    std::uint64_t corpus_seed = 2024;
    int threads = 0;
    sweep->add_option("--lambdas", lambdas, "lambda grid")->delimiter(',');
    sweep->add_option("--tus", tus, "t_u grid")->delimiter(',');
    sweep->add_option("--ks", ks, "k grid")->delimiter(',');
    sweep->add_option("--taus", taus, "tau grid")->delimiter(',');
    sweep->add_option("--corpus", corpus_size, "corpus size");
    sweep->add_option("--corpus-seed", corpus_seed, "corpus subsampling seed");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_config(config_path);
        } else {
            config.finalize();
        }

        if (demo->parsed()) {
            if (demo_has_seed) config.edit.seed = demo_seed;
            config.finalize();
            return cmd_demo(config, out_flag);
        }

        if (edit->parsed()) {
            Condition cond_o, cond_e;
            std::optional<fs::path> in_path;
            LatentImage x0;
            std::string command = "edit";
            if (!from_manifest.empty()) {
                const RunManifest prev = RunManifest::load(from_manifest);
                config = prev.config();
                cond_o = condition_from_json(prev.conditions().at("original"));
                cond_e = condition_from_json(prev.conditions().at("edit"));
                const auto& notes = prev.json().at("notes");
                if (notes.contains("input_path")) {
                    in_path = fs::path(notes.at("input_path").get<std::string>());
                    x0 = read_netpbm16(*in_path);
                } else {
                    x0 = read_netpbm16(
                        prev.json().at("artifacts").at("input").get<std::string>());
                }
                command = prev.command();
            } else {
                if (lambda >= 0.0) config.edit.lambda = lambda;
                if (gamma > 0.0) config.edit.gamma = gamma;
                if (t_u >= 0) config.edit.t_u = t_u;
                if (k > 0) config.edit.k = k;
                if (tau > 0.0) config.edit.tau = tau;
                if (n_seeds > 0) config.edit.n_seeds = n_seeds;
                if (sigma_blur >= 0.0) config.edit.sigma_blur = sigma_blur;
                if (encode_ratio > 0.0) config.encode_ratio = encode_ratio;
                if (edit_has_seed) config.edit.seed = edit_seed;
                config.finalize();
                cond_o = oflags.build();
                cond_e = eflags.build();
                if (input_path.empty()) {
                    throw std::runtime_error("edit needs --input or --from-manifest");
                }
                in_path = input_path;
                x0 = read_netpbm16(input_path);
            }
            if (x0.height != config.scene.height || x0.width != config.scene.width ||
                x0.channels != config.scene.channels) {
                throw std::runtime_error("input image does not match the scene canvas");
            }
            EditMask painted;
            const EditMask* override_ptr = nullptr;
            if (!mask_path.empty()) {
                int mh = 0, mw = 0;
                painted = EditMask::zeros(config.scene.height, config.scene.width,
                                          config.edit.tau);
                painted.binary = read_pbm(mask_path, mh, mw);
                if (mh != config.scene.height || mw != config.scene.width) {
                    throw std::runtime_error("mask override does not match the canvas");
                }
                for (std::size_t i = 0; i < painted.binary.size(); ++i) {
                    painted.soft[i] = painted.binary[i] ? 1.0 : 0.0;
                }
                painted.peak = 1.0;
                override_ptr = &painted;
            }
            const fs::path out_dir = resolve_out_dir(out_flag, config, "edit");
            return execute_edit(config, x0, in_path, cond_o, cond_e, with_baseline,
                                override_ptr, out_dir, command);
        }

        if (mask_cmd->parsed()) {
            if (m_tau > 0.0) config.edit.tau = m_tau;
            if (m_n_seeds > 0) config.edit.n_seeds = m_n_seeds;
            if (m_sigma_blur >= 0.0) config.edit.sigma_blur = m_sigma_blur;
            if (mask_has_seed) config.edit.seed = mask_seed;
            config.finalize();
            if (mask_input.empty()) {
                throw std::runtime_error("mask needs --input");
            }
            const LatentImage x0 = read_netpbm16(mask_input);
            const SceneMixture mix = build_mixture(config.scene);
            const NoiseSchedule sched = config.build_noise_schedule();
            const EditMask mask = estimate_mask(x0, moflags.build(), meflags.build(),
                                                config.edit, mix, sched);
            const fs::path out_dir = resolve_out_dir(out_flag, config, "mask");
            fs::create_directories(out_dir);
            RunManifest manifest("mask", config);
            manifest.set_condition("original", condition_json(moflags.build()));
            manifest.set_condition("edit", condition_json(meflags.build()));
            write_mask_files(out_dir, "mask", mask, config.edit.sigma_blur, &manifest);
            manifest.save(out_dir / "manifest.json");
            std::cout << "wrote " << (out_dir / "manifest.json").string() << "\n";
            return 0;
        }

        if (sweep->parsed()) {
            config.finalize();
            return cmd_sweep(config, lambdas, tus, ks, taus, corpus_size, corpus_seed,
                             threads, out_flag);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
