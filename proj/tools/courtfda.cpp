// courtfda: shot charts -> bivariate densities -> MFPCA -> k-medoids.
//
// Exit codes: 0 ok, 1 unexpected error, 2 usage/config, 10 ingest,
// 11 density, 12 mfpca, 13 cluster, 14 evaluate, 15 bootstrap, 16 export.

#include "courtfda/bootstrap.hpp"
#include "courtfda/cluster.hpp"
#include "courtfda/density.hpp"
#include "courtfda/fda.hpp"
#include "courtfda/heatmap.hpp"
#include "courtfda/metrics.hpp"
#include "courtfda/model_io.hpp"
#include "courtfda/parallel.hpp"
#include "courtfda/pipeline.hpp"
#include "courtfda/reports.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using courtfda::pipeline::PipelineConfig;
using courtfda::pipeline::Stage;
using courtfda::pipeline::in_stage;

void add_dataset_options(CLI::App* app, PipelineConfig& cfg) {
    app->add_option("--input", cfg.input, "Shot events (CSV or JSON array)");
    app->add_option("--min-attempts", cfg.min_attempts, "Keep players with more attempts than this")
        ->capture_default_str();
    app->add_option("--court-width", cfg.court_width, "Sideline to sideline, feet")->capture_default_str();
    app->add_option("--court-depth", cfg.court_depth, "Baseline to mid-court, feet")->capture_default_str();
    app->add_option("--grid", cfg.grid, "Nodes per axis of the square grid")->capture_default_str();
}

const courtfda::density::FunctionalSample& find_sample(
    const std::vector<courtfda::density::FunctionalSample>& samples, const std::string& id) {
    const auto it = std::find_if(samples.begin(), samples.end(),
                                 [&](const auto& s) { return s.player_id == id; });
    if (it == samples.end()) throw courtfda::Error("player '" + id + "' is not in the retained set");
    return *it;
}

void write_json_or_print(const std::string& path, const nlohmann::json& j) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        courtfda::reports::write_json(path, j);
    }
}

void write_score_files(const std::string& dir, const courtfda::reports::ScoreTable& table) {
    courtfda::reports::write_json((fs::path(dir) / "scores.json").string(), courtfda::reports::to_json(table));
    std::ofstream csv(fs::path(dir) / "scores.csv", std::ios::binary);
    courtfda::reports::write_scores_csv(csv, table);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional shot-chart analysis: densities, MFPCA, k-medoids, stability"};
    app.require_subcommand(1);
    app.fallthrough();

    PipelineConfig cfg;
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker cap (default: COURT_FDA_THREADS or all cores)");

    // ingest
    std::string out_dir = ".";
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse, drop out-of-bounds attempts, filter players");
    add_dataset_options(ingest_cmd, cfg);
    ingest_cmd->add_option("--out", out_dir, "Directory for players.csv and events.csv");

    // density
    std::string dump_dir;
    auto* density_cmd = app.add_subcommand("density", "Estimate per-player missed/made densities");
    add_dataset_options(density_cmd, cfg);
    density_cmd->add_option("--dump-densities", dump_dir, "Write one x,y,value CSV per player and component")
        ->required();

    // mfpca
    auto* mfpca_cmd = app.add_subcommand("mfpca", "Multivariate functional PCA");
    mfpca_cmd->require_subcommand(1);
    std::string model_path;
    std::optional<double> variance;
    auto* fit_cmd = mfpca_cmd->add_subcommand("fit", "Fit the model, write model.json, scores and heatmaps");
    add_dataset_options(fit_cmd, cfg);
    auto* comp_opt = fit_cmd->add_option("--components", cfg.components, "Number of components K")
                         ->capture_default_str();
    fit_cmd->add_option("--variance", variance, "Smallest K reaching this explained-variance fraction")
        ->excludes(comp_opt);
    fit_cmd->add_option("--out", out_dir, "Output directory");

    auto* scores_cmd = mfpca_cmd->add_subcommand("scores", "Project densities onto a fitted model");
    add_dataset_options(scores_cmd, cfg);
    scores_cmd->add_option("--model", model_path, "model.json")->required();
    scores_cmd->add_option("--out", out_dir, "Output directory");

    std::string player_id;
    std::size_t recon_k = 0;
    auto* recon_cmd = mfpca_cmd->add_subcommand("reconstruct", "Truncated reconstruction of one player");
    add_dataset_options(recon_cmd, cfg);
    recon_cmd->add_option("--model", model_path, "model.json")->required();
    recon_cmd->add_option("--player", player_id, "player_id")->required();
    recon_cmd->add_option("--k", recon_k, "Components to keep")->required();
    recon_cmd->add_option("--out", out_dir, "Output directory");

    // cluster
    std::string scores_path;
    std::string weights = "equal";
    auto* cluster_cmd = app.add_subcommand("cluster", "k-medoids on standardized scores");
    cluster_cmd->add_option("--scores", scores_path, "scores.json")->required();
    cluster_cmd->add_option("--k", cfg.clusters, "Cluster count")->capture_default_str();
    cluster_cmd->add_option("--weights", weights, "equal | variance")
        ->check(CLI::IsMember({"equal", "variance"}))
        ->capture_default_str();
    cluster_cmd->add_option("--seed", cfg.seed, "Accepted for interface stability; PAM is deterministic");
    cluster_cmd->add_option("--out", out_dir, "Output directory");

    // evaluate
    std::string clusters_path;
    std::string against = "nba";
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("evaluate", "Confusion matrix, ARI and silhouette");
    eval_cmd->add_option("--clusters", clusters_path, "clusters_<scheme>.json")->required();
    eval_cmd->add_option("--against", against, "nba, or another clusters file")->capture_default_str();
    eval_cmd->add_option("--scores", scores_path, "scores.json; enables the silhouette");
    eval_cmd->add_option("--out", eval_out, "Output JSON file (stdout if omitted)");

    // bootstrap
    auto* boot_cmd = app.add_subcommand("bootstrap", "Player-level bootstrap stability of the components");
    add_dataset_options(boot_cmd, cfg);
    boot_cmd->add_option("--replicates", cfg.bootstrap_replicates, "Bootstrap replicates")->capture_default_str();
    boot_cmd->add_option("--components", cfg.components, "Components compared")->capture_default_str();
    boot_cmd->add_option("--seed", cfg.seed, "Seed of the splitmix64 streams")->capture_default_str();
    boot_cmd->add_option("--out", out_dir, "Output directory");

    // export
    std::string export_clusters;
    auto* export_cmd = app.add_subcommand("export", "Heatmaps: mean and eigenfunctions, a player, or medoids");
    add_dataset_options(export_cmd, cfg);
    export_cmd->add_option("--model", model_path, "model.json")->required();
    export_cmd->add_option("--player", player_id, "Decompose this player (needs --input)");
    export_cmd->add_option("--clusters", export_clusters, "Medoid density charts (needs --input)");
    export_cmd->add_option("--out", out_dir, "Output directory");

    // run
    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Full pipeline with manifest run.json");
    run_cmd->add_option("--config", config_path, "Flat JSON config; flags override it");
    add_dataset_options(run_cmd, cfg);
    auto* run_comp = run_cmd->add_option("--components", cfg.components, "Number of components K");
    run_cmd->add_option("--variance", variance, "Explained-variance threshold")->excludes(run_comp);
    run_cmd->add_option("--k", cfg.clusters, "Cluster count");
    run_cmd->add_option("--weights", cfg.weights, "equal | variance | both");
    run_cmd->add_option("--replicates", cfg.bootstrap_replicates, "Bootstrap replicates (0 disables)");
    run_cmd->add_option("--seed", cfg.seed, "Seed");
    run_cmd->add_flag("--dump-densities", cfg.dump_densities, "Also dump raw density CSVs");
    run_cmd->add_option("--out", cfg.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.threads = threads;
    const std::size_t workers = courtfda::resolve_threads(threads);

    try {
        if (*ingest_cmd) {
            in_stage(Stage::Config, [&] { cfg.out = out_dir; cfg.validate(); });
            const auto ds = courtfda::pipeline::load_players(cfg);
            in_stage(Stage::Export, [&] {
                fs::create_directories(out_dir);
                std::ofstream players(fs::path(out_dir) / "players.csv", std::ios::binary);
                players << "player_id,player_name,position,attempts,made,missed\n";
                for (const auto& p : ds.players) {
                    players << p.player_id << ',' << p.player_name << ','
                            << courtfda::ingest::to_string(p.position) << ',' << p.attempts() << ','
                            << p.made_points.size() << ',' << p.missed_points.size() << '\n';
                }
            });
            std::cout << "events: " << ds.raw_events << " raw, " << ds.in_bounds_events
                      << " in bounds, " << ds.retained_events << " from " << ds.players.size()
                      << " retained players\n";
        } else if (*density_cmd) {
            in_stage(Stage::Config, [&] { cfg.validate(); });
            const auto ds = courtfda::pipeline::load_dataset(cfg);
            const auto files = in_stage(Stage::Export, [&] {
                return courtfda::pipeline::dump_densities(ds.samples, dump_dir);
            });
            std::cout << "wrote " << files.size() << " density files for " << ds.samples.size()
                      << " players\n";
        } else if (*mfpca_cmd) {
            in_stage(Stage::Config, [&] { cfg.validate(); });
            const auto ds = courtfda::pipeline::load_dataset(cfg);
            const auto players = courtfda::reports::player_infos(ds.players);
            const auto views = courtfda::density::views(ds.samples);
            if (*fit_cmd) {
                if (variance) cfg.variance_threshold = variance;
                const auto model = in_stage(Stage::Mfpca, [&] {
                    return courtfda::fda::fit_mfpca(views, cfg.selection(), workers);
                });
                const auto table = courtfda::pipeline::score_table(players, model, ds.samples);
                in_stage(Stage::Export, [&] {
                    fs::create_directories(out_dir);
                    courtfda::fda::save_model((fs::path(out_dir) / "model.json").string(), model);
                    write_score_files(out_dir, table);
                    courtfda::pipeline::export_model_heatmaps(model, (fs::path(out_dir) / "heatmaps").string());
                });
                std::cout << "K = " << model.components() << ", variance ratios:";
                for (double r : model.variance_ratios) std::cout << ' ' << r;
                std::cout << '\n';
            } else {
                const auto model = in_stage(Stage::Mfpca, [&] { return courtfda::fda::load_model(model_path); });
                if (*scores_cmd) {
                    const auto table = in_stage(Stage::Mfpca, [&] {
                        return courtfda::pipeline::score_table(players, model, ds.samples);
                    });
                    in_stage(Stage::Export, [&] {
                        fs::create_directories(out_dir);
                        write_score_files(out_dir, table);
                    });
                } else {
                    const auto& sample = in_stage(Stage::Mfpca, [&]() -> const auto& {
                        return find_sample(ds.samples, player_id);
                    });
                    const auto recon = in_stage(Stage::Mfpca, [&] {
                        const auto scores = courtfda::fda::project_scores(sample.view(), model);
                        if (recon_k > scores.size()) {
                            throw courtfda::FdaError("--k exceeds the model's " +
                                                     std::to_string(scores.size()) + " components");
                        }
                        return courtfda::fda::reconstruct(
                            std::span<const double>(scores.data(), recon_k), model);
                    });
                    const double err = courtfda::fda::h_distance(recon.view(), sample.view(), model.weights);
                    in_stage(Stage::Export, [&] {
                        const auto stem = fs::path(out_dir) / ("reconstruction_" +
                            courtfda::pipeline::safe_file_name(player_id) + "_k" + std::to_string(recon_k));
                        courtfda::heatmap::export_heatmap(recon.missed, recon.grid, stem.string() + "_missed",
                                                          courtfda::heatmap::Scaling::Symmetric);
                        courtfda::heatmap::export_heatmap(recon.made, recon.grid, stem.string() + "_made",
                                                          courtfda::heatmap::Scaling::Symmetric);
                    });
                    std::cout << "H-norm reconstruction error with K = " << recon_k << ": " << err << '\n';
                }
            }
        } else if (*cluster_cmd) {
            const auto table = in_stage(Stage::Cluster, [&] {
                return courtfda::reports::read_score_table(scores_path);
            });
            const auto scheme = *courtfda::cluster::parse_weight_scheme(weights);
            const auto report = in_stage(Stage::Cluster, [&] {
                return courtfda::pipeline::cluster_scores(table, scheme, cfg.clusters, cfg.seed);
            });
            in_stage(Stage::Export, [&] {
                fs::create_directories(out_dir);
                courtfda::reports::write_json((fs::path(out_dir) / ("clusters_" + weights + ".json")).string(),
                                              courtfda::reports::to_json(report));
                std::ofstream roster(fs::path(out_dir) / ("roster_" + weights + ".txt"), std::ios::binary);
                roster << courtfda::reports::roster_text(report);
            });
            std::cout << courtfda::reports::roster_text(report);
        } else if (*eval_cmd) {
            const auto result = in_stage(Stage::Evaluate, [&] {
                const auto report = courtfda::reports::read_cluster_report(clusters_path);
                const auto part = courtfda::reports::cluster_partition(report);
                nlohmann::json out;
                out["against"] = against;
                if (against == "nba") {
                    out["comparison"] = courtfda::reports::compare_partitions(
                        courtfda::reports::position_partition(report.players), part);
                } else {
                    const auto other = courtfda::reports::read_cluster_report(against);
                    if (other.players != report.players) {
                        throw courtfda::MetricsError("cluster files list different players");
                    }
                    out["comparison"] = courtfda::reports::compare_partitions(
                        part, courtfda::reports::cluster_partition(other));
                }
                if (!scores_path.empty()) {
                    const auto table = courtfda::reports::read_score_table(scores_path);
                    if (table.players != report.players) {
                        throw courtfda::MetricsError("scores and clusters list different players");
                    }
                    const auto d = courtfda::pipeline::clustering_distances(table, report.weights);
                    out["silhouette"] = courtfda::reports::silhouette_json(
                        courtfda::metrics::silhouette(d, part), part);
                }
                return out;
            });
            in_stage(Stage::Export, [&] { write_json_or_print(eval_out, result); });
        } else if (*boot_cmd) {
            in_stage(Stage::Config, [&] {
                cfg.validate();
                if (cfg.bootstrap_replicates < 1) throw courtfda::ConfigError("--replicates must be at least 1");
            });
            const auto ds = courtfda::pipeline::load_dataset(cfg);
            const auto views = courtfda::density::views(ds.samples);
            courtfda::bootstrap::StudyOptions opts{cfg.bootstrap_replicates, cfg.components, cfg.seed,
                                                   workers, true};
            const auto study = in_stage(Stage::Bootstrap, [&] {
                return courtfda::bootstrap::stability_study(views, opts);
            });
            in_stage(Stage::Export, [&] {
                courtfda::reports::write_json((fs::path(out_dir) / "report.json").string(),
                                              courtfda::pipeline::stability_json(study));
                for (const auto& r : study.replicates) {
                    if (!r.model) continue;
                    courtfda::pipeline::export_model_heatmaps(
                        *r.model, (fs::path(out_dir) / ("replicate" + std::to_string(r.replicate + 1))).string());
                }
            });
            std::cout << "mean alignment per component:";
            for (double a : study.mean_alignment()) std::cout << ' ' << a;
            std::cout << '\n';
        } else if (*export_cmd) {
            const auto model = in_stage(Stage::Export, [&] { return courtfda::fda::load_model(model_path); });
            in_stage(Stage::Export, [&] {
                courtfda::pipeline::export_model_heatmaps(model, out_dir);
            });
            if (!player_id.empty() || !export_clusters.empty()) {
                in_stage(Stage::Config, [&] { cfg.grid = model.grid.nx; cfg.validate(); });
                const auto ds = courtfda::pipeline::load_dataset(cfg);
                in_stage(Stage::Export, [&] {
                    if (!player_id.empty()) {
                        courtfda::pipeline::export_player_decomposition(
                            model, find_sample(ds.samples, player_id),
                            (fs::path(out_dir) / ("player_" + courtfda::pipeline::safe_file_name(player_id))).string());
                    }
                    if (!export_clusters.empty()) {
                        const auto report = courtfda::reports::read_cluster_report(export_clusters);
                        courtfda::pipeline::export_medoids(report, ds.samples,
                                                           (fs::path(out_dir) / "medoids").string());
                    }
                });
            }
        } else if (*run_cmd) {
            PipelineConfig run_cfg = in_stage(Stage::Config, [&] {
                PipelineConfig base = config_path.empty() ? PipelineConfig{}
                                                          : courtfda::pipeline::load_config(config_path);
                // Flags given on the command line win over the file.
                auto given = [&](const char* name) { return run_cmd->count(name) > 0; };
                if (given("--input")) base.input = cfg.input;
                if (given("--min-attempts")) base.min_attempts = cfg.min_attempts;
                if (given("--court-width")) base.court_width = cfg.court_width;
                if (given("--court-depth")) base.court_depth = cfg.court_depth;
                if (given("--grid")) base.grid = cfg.grid;
                if (given("--components")) {
                    base.components = cfg.components;
                    base.variance_threshold.reset();
                }
                if (variance) base.variance_threshold = variance;
                if (given("--k")) base.clusters = cfg.clusters;
                if (given("--weights")) base.weights = cfg.weights;
                if (given("--replicates")) base.bootstrap_replicates = cfg.bootstrap_replicates;
                if (given("--seed")) base.seed = cfg.seed;
                if (given("--dump-densities")) base.dump_densities = cfg.dump_densities;
                if (given("--out")) base.out = cfg.out;
                if (app.count("--threads")) base.threads = threads;
                return base;
            });
            const auto manifest = courtfda::pipeline::run_pipeline(run_cfg);
            std::cout << "wrote " << manifest.files.size() << " files and "
                      << (fs::path(run_cfg.out) / "run.json").string() << '\n';
        }
    } catch (const courtfda::pipeline::StageFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return courtfda::pipeline::exit_code(e.stage());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
