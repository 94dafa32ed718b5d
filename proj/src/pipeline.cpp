#include "courtfda/pipeline.hpp"

#include "courtfda/cluster.hpp"
#include "courtfda/heatmap.hpp"
#include "courtfda/metrics.hpp"
#include "courtfda/model_io.hpp"
#include "courtfda/parallel.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>

namespace courtfda::pipeline {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

std::vector<cluster::WeightScheme> schemes_for(const std::string& weights) {
    if (weights == "equal") return {cluster::WeightScheme::Equal};
    if (weights == "variance") return {cluster::WeightScheme::VarianceProportion};
    return {cluster::WeightScheme::Equal, cluster::WeightScheme::VarianceProportion};
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void append(std::vector<std::string>& into, const std::vector<std::string>& more) {
    into.insert(into.end(), more.begin(), more.end());
}

std::string write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExportError("cannot write '" + path + "'");
    out << text;
    return path;
}

std::string write_players_csv(const std::string& path, const std::vector<ingest::PlayerRecord>& players) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExportError("cannot write '" + path + "'");
    out << "player_id,player_name,position,attempts,made,missed\n";
    for (const auto& p : players) {
        out << p.player_id << ',' << p.player_name << ',' << ingest::to_string(p.position) << ','
            << p.attempts() << ',' << p.made_points.size() << ',' << p.missed_points.size() << '\n';
    }
    return path;
}

// Removes empty directories below (and including) root, deepest first.
void prune_empty_dirs(const fs::path& root, bool remove_root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) return;
    std::vector<fs::path> dirs;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_directory(ec)) dirs.push_back(it->path());
    }
    std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
        return a.string().size() > b.string().size();
    });
    for (const auto& d : dirs) {
        if (fs::is_empty(d, ec)) fs::remove(d, ec);
    }
    if (remove_root && fs::is_empty(root, ec)) fs::remove(root, ec);
}

json evaluation_for(const reports::ClusterReport& report, const reports::ScoreTable& table,
                    const metrics::Partition& nba) {
    const auto part = reports::cluster_partition(report);
    const auto d = clustering_distances(table, report.weights);
    json out;
    out["vs_nba"] = reports::compare_partitions(nba, part);
    out["silhouette"] = report.clustering.medoids.size() >= 2
                            ? reports::silhouette_json(metrics::silhouette(d, part), part)
                            : json(nullptr);
    out["nba_silhouette"] = nba.categories() >= 2
                                ? reports::silhouette_json(metrics::silhouette(d, nba), nba)
                                : json(nullptr);
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    if (input.empty()) throw ConfigError("no input file given");
    if (min_attempts < 1) throw ConfigError("min_attempts must be at least 1");
    if (grid < 2) throw ConfigError("grid must have at least 2 nodes per axis");
    if (components < 1) throw ConfigError("components must be at least 1");
    if (variance_threshold && (!(*variance_threshold > 0.0) || *variance_threshold > 1.0)) {
        throw ConfigError("variance_threshold must lie in (0, 1]");
    }
    if (clusters < 1) throw ConfigError("clusters must be at least 1");
    if (weights != "equal" && weights != "variance" && weights != "both") {
        throw ConfigError("weights must be equal, variance or both");
    }
    if (!(court_width > 0.0) || !(court_depth > 0.0)) throw ConfigError("court dimensions must be positive");
    if (out.empty()) throw ConfigError("no output directory given");
}

fda::ComponentSelection PipelineConfig::selection() const {
    if (variance_threshold) return fda::VarianceThreshold{*variance_threshold};
    return fda::ComponentCount{components};
}

json to_json(const PipelineConfig& c) {
    return {{"input", c.input},
            {"min_attempts", c.min_attempts},
            {"grid", c.grid},
            {"components", c.components},
            {"variance_threshold", c.variance_threshold ? json(*c.variance_threshold) : json(nullptr)},
            {"clusters", c.clusters},
            {"weights", c.weights},
            {"bootstrap_replicates", c.bootstrap_replicates},
            {"seed", c.seed},
            {"out", c.out},
            {"court_width", c.court_width},
            {"court_depth", c.court_depth},
            {"dump_densities", c.dump_densities},
            {"threads", c.threads}};
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "input") c.input = v.get<std::string>();
            else if (key == "min_attempts") c.min_attempts = v.get<std::size_t>();
            else if (key == "grid") c.grid = v.get<std::size_t>();
            else if (key == "components") c.components = v.get<std::size_t>();
            else if (key == "variance_threshold")
                c.variance_threshold = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "clusters") c.clusters = v.get<std::size_t>();
            else if (key == "weights") c.weights = v.get<std::string>();
            else if (key == "bootstrap_replicates") c.bootstrap_replicates = v.get<std::size_t>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "court_width") c.court_width = v.get<double>();
            else if (key == "court_depth") c.court_depth = v.get<double>();
            else if (key == "dump_densities") c.dump_densities = v.get<bool>();
            else if (key == "threads") c.threads = v.get<std::size_t>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    try {
        return config_from_json(reports::read_json(path));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Config: return "config";
        case Stage::Ingest: return "ingest";
        case Stage::Density: return "density";
        case Stage::Mfpca: return "mfpca";
        case Stage::Cluster: return "cluster";
        case Stage::Evaluate: return "evaluate";
        case Stage::Bootstrap: return "bootstrap";
        case Stage::Export: return "export";
    }
    return "unknown";
}

int exit_code(Stage stage) {
    switch (stage) {
        case Stage::Config: return 2;
        case Stage::Ingest: return 10;
        case Stage::Density: return 11;
        case Stage::Mfpca: return 12;
        case Stage::Cluster: return 13;
        case Stage::Evaluate: return 14;
        case Stage::Bootstrap: return 15;
        case Stage::Export: return 16;
    }
    return 1;
}

Dataset load_players(const PipelineConfig& config) {
    return in_stage(Stage::Ingest, [&] {
        Dataset ds;
        const auto events = ingest::read_events_file(config.input, config.court());
        if (events.empty()) throw IngestError("input '" + config.input + "' contains no shot events");
        ds.raw_events = events.size();
        const auto kept = ingest::exclude_impossible(events);
        ds.in_bounds_events = kept.size();
        ds.players = ingest::filter_players(kept, config.min_attempts);
        for (const auto& p : ds.players) ds.retained_events += p.attempts();
        if (ds.players.size() < 2) {
            throw IngestError(std::to_string(ds.players.size()) +
                              " player(s) above the attempt threshold; need at least 2");
        }
        return ds;
    });
}

Dataset load_dataset(const PipelineConfig& config) {
    Dataset ds = load_players(config);
    ds.samples = in_stage(Stage::Density, [&] {
        return density::build_samples(ds.players, GridSpec::square(config.grid),
                                      resolve_threads(config.threads));
    });
    return ds;
}

std::string safe_file_name(std::string_view text) {
    std::string out;
    for (char c : text) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("_") : out;
}

std::vector<std::string> export_model_heatmaps(const fda::MfpcaModel& model, const std::string& dir) {
    using heatmap::Scaling;
    std::vector<std::string> files;
    append(files, heatmap::export_heatmap(model.mean.missed, model.grid, join(dir, "mean_missed"), Scaling::Symmetric));
    append(files, heatmap::export_heatmap(model.mean.made, model.grid, join(dir, "mean_made"), Scaling::Symmetric));
    for (std::size_t k = 0; k < model.components(); ++k) {
        const auto& phi = model.pairs[k].eigenfunction;
        const std::string tag = "phi" + std::to_string(k + 1);
        append(files, heatmap::export_heatmap(phi.missed, model.grid, join(dir, tag + "_missed"), Scaling::Symmetric));
        append(files, heatmap::export_heatmap(phi.made, model.grid, join(dir, tag + "_made"), Scaling::Symmetric));
    }
    return files;
}

std::vector<std::string> export_player_decomposition(const fda::MfpcaModel& model,
                                                     const density::FunctionalSample& sample,
                                                     const std::string& dir) {
    using heatmap::Scaling;
    const auto scores = fda::project_scores(sample.view(), model);
    std::vector<std::string> files;
    append(files, heatmap::export_heatmap(sample.missed.values, model.grid, join(dir, "density_missed"), Scaling::MinMax));
    append(files, heatmap::export_heatmap(sample.made.values, model.grid, join(dir, "density_made"), Scaling::MinMax));
    append(files, heatmap::export_heatmap(model.mean.missed, model.grid, join(dir, "mean_missed"), Scaling::Symmetric));
    append(files, heatmap::export_heatmap(model.mean.made, model.grid, join(dir, "mean_made"), Scaling::Symmetric));
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& phi = model.pairs[k].eigenfunction;
        std::vector<double> missed(phi.missed.size());
        std::vector<double> made(phi.made.size());
        for (std::size_t n = 0; n < missed.size(); ++n) missed[n] = scores[k] * phi.missed[n];
        for (std::size_t n = 0; n < made.size(); ++n) made[n] = scores[k] * phi.made[n];
        const std::string tag = "term" + std::to_string(k + 1);
        append(files, heatmap::export_heatmap(missed, model.grid, join(dir, tag + "_missed"), Scaling::Symmetric));
        append(files, heatmap::export_heatmap(made, model.grid, join(dir, tag + "_made"), Scaling::Symmetric));
    }
    json info{{"player_id", sample.player_id}, {"scores", scores}};
    const auto path = join(dir, "scores.json");
    reports::write_json(path, info);
    files.push_back(path);
    return files;
}

std::vector<std::string> export_medoids(const reports::ClusterReport& report,
                                        const std::vector<density::FunctionalSample>& samples,
                                        const std::string& dir) {
    std::vector<std::string> files;
    const auto& medoids = report.clustering.medoids;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
        const auto& player = report.players[medoids[m]];
        const auto it = std::find_if(samples.begin(), samples.end(), [&](const auto& s) {
            return s.player_id == player.player_id;
        });
        if (it == samples.end()) throw ExportError("no density for medoid '" + player.player_id + "'");
        const std::string stem =
            join(dir, "cluster" + std::to_string(m + 1) + "_" + safe_file_name(player.player_id));
        append(files, heatmap::export_heatmap(it->missed.values, it->missed.grid, stem + "_missed",
                                              heatmap::Scaling::MinMax));
        append(files, heatmap::export_heatmap(it->made.values, it->made.grid, stem + "_made",
                                              heatmap::Scaling::MinMax));
    }
    return files;
}

std::vector<std::string> dump_densities(const std::vector<density::FunctionalSample>& samples,
                                        const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& s : samples) {
        const auto stem = join(dir, safe_file_name(s.player_id));
        files.push_back(heatmap::dump_field_csv(s.missed.values, s.missed.grid, stem + "_missed.csv"));
        files.push_back(heatmap::dump_field_csv(s.made.values, s.made.grid, stem + "_made.csv"));
    }
    return files;
}

json stability_json(const bootstrap::StabilityReport& report) {
    json reps = json::array();
    for (const auto& r : report.replicates) {
        reps.push_back({{"replicate", r.replicate + 1},
                        {"seed", r.seed},
                        {"distinct_samples", r.distinct_samples},
                        {"flagged", r.flagged},
                        {"note", r.note},
                        {"fitted_components", r.fitted_components},
                        {"alignment", r.alignment},
                        {"eigenvalue_ratio", r.eigenvalue_ratio},
                        {"mean_distance", r.mean_distance}});
    }
    return {{"components", report.components},
            {"seed", report.seed},
            {"generator", "splitmix64"},
            {"reference_eigenvalues", report.reference_eigenvalues},
            {"mean_alignment", report.mean_alignment()},
            {"replicates", std::move(reps)}};
}

reports::ScoreTable score_table(const std::vector<reports::PlayerInfo>& players,
                                const fda::MfpcaModel& model,
                                const std::vector<density::FunctionalSample>& samples) {
    const auto v = density::views(samples);
    return {players, fda::project_all(v, model), model.eigenvalues(), model.variance_ratios};
}

cluster::DistanceMatrix clustering_distances(const reports::ScoreTable& table,
                                             const std::vector<double>& weights) {
    return cluster::weighted_distances(cluster::standardize_scores(table.scores), weights);
}

reports::ClusterReport cluster_scores(const reports::ScoreTable& table, cluster::WeightScheme scheme,
                                      std::size_t k, std::uint64_t seed) {
    reports::ClusterReport report;
    report.players = table.players;
    report.scheme = scheme;
    report.weights = cluster::resolve_weights(scheme, table.scores.cols(), table.eigenvalues);
    report.clustering = cluster::kmedoids(clustering_distances(table, report.weights), k, seed);
    return report;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

json RunManifest::to_json() const {
    json files_json = json::array();
    for (const auto& f : files) {
        files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    return {{"config", config}, {"summary", summary}, {"files", std::move(files_json)}};
}

RunManifest run_pipeline(const PipelineConfig& config) {
    in_stage(Stage::Config, [&] { config.validate(); });

    const fs::path root(config.out);
    std::error_code ec;
    const bool created_root = !fs::exists(root, ec);
    in_stage(Stage::Export, [&] { fs::create_directories(root); });
    const std::string dir = root.string();
    const std::size_t threads = resolve_threads(config.threads);

    std::vector<std::string> written;
    try {
        Dataset ds = load_dataset(config);
        const auto players = reports::player_infos(ds.players);

        in_stage(Stage::Export, [&] {
            written.push_back(write_players_csv(join(dir, "players.csv"), ds.players));
            if (config.dump_densities) append(written, dump_densities(ds.samples, join(dir, "densities")));
        });

        const auto views = density::views(ds.samples);
        const fda::MfpcaModel model =
            in_stage(Stage::Mfpca, [&] { return fda::fit_mfpca(views, config.selection(), threads); });
        const auto table = in_stage(Stage::Mfpca, [&] { return score_table(players, model, ds.samples); });

        in_stage(Stage::Export, [&] {
            const auto model_path = join(dir, "model.json");
            fda::save_model(model_path, model);
            written.push_back(model_path);
            const auto scores_path = join(dir, "scores.json");
            reports::write_json(scores_path, reports::to_json(table));
            written.push_back(scores_path);
            const auto csv_path = join(dir, "scores.csv");
            std::ofstream csv(csv_path, std::ios::binary);
            reports::write_scores_csv(csv, table);
            written.push_back(csv_path);
            append(written, export_model_heatmaps(model, join(dir, "heatmaps")));
        });

        json summary;
        summary["players"] = ds.players.size();
        summary["events"] = {{"raw", ds.raw_events},
                             {"in_bounds", ds.in_bounds_events},
                             {"retained", ds.retained_events}};
        summary["components"] = model.components();
        summary["numerical_rank"] = model.numerical_rank;
        summary["eigenvalues"] = model.eigenvalues();
        summary["variance_ratios"] = model.variance_ratios;

        std::vector<reports::ClusterReport> clusterings;
        for (auto scheme : schemes_for(config.weights)) {
            clusterings.push_back(in_stage(Stage::Cluster, [&] {
                return cluster_scores(table, scheme, config.clusters, config.seed);
            }));
            const auto& report = clusterings.back();
            const std::string name(cluster::to_string(scheme));
            in_stage(Stage::Export, [&] {
                const auto path = join(dir, "clusters_" + name + ".json");
                reports::write_json(path, reports::to_json(report));
                written.push_back(path);
                written.push_back(write_text(join(dir, "roster_" + name + ".txt"), reports::roster_text(report)));
                append(written, export_medoids(report, ds.samples, join(dir, "heatmaps/medoids_" + name)));
            });
        }

        const json evaluation = in_stage(Stage::Evaluate, [&] {
            const auto nba = reports::position_partition(players);
            json ev;
            for (const auto& report : clusterings) {
                ev[std::string(cluster::to_string(report.scheme))] = evaluation_for(report, table, nba);
            }
            if (clusterings.size() == 2) {
                ev["equal_vs_variance"] = reports::compare_partitions(
                    reports::cluster_partition(clusterings[0]), reports::cluster_partition(clusterings[1]));
            }
            return ev;
        });
        in_stage(Stage::Export, [&] {
            const auto path = join(dir, "evaluation.json");
            reports::write_json(path, evaluation);
            written.push_back(path);
        });
        for (const auto& [name, ev] : evaluation.items()) {
            summary["ari"][name] = name == "equal_vs_variance" ? ev.at("ari") : ev.at("vs_nba").at("ari");
        }

        if (config.bootstrap_replicates > 0) {
            bootstrap::StudyOptions opts;
            opts.replicates = config.bootstrap_replicates;
            opts.components = model.components();
            opts.seed = config.seed;
            opts.threads = threads;
            opts.keep_models = true;
            const auto study = in_stage(Stage::Bootstrap, [&] { return bootstrap::stability_study(views, opts); });
            in_stage(Stage::Export, [&] {
                const auto path = join(dir, "bootstrap/report.json");
                reports::write_json(path, stability_json(study));
                written.push_back(path);
                for (const auto& r : study.replicates) {
                    if (!r.model) continue;
                    const auto rep_dir = join(dir, "bootstrap/replicate" + std::to_string(r.replicate + 1));
                    append(written, export_model_heatmaps(*r.model, rep_dir));
                }
            });
            summary["bootstrap_mean_alignment"] = study.mean_alignment();
        }

        RunManifest manifest;
        manifest.config = to_json(config);
        manifest.config.erase("threads");
        manifest.summary = std::move(summary);
        in_stage(Stage::Export, [&] {
            for (const auto& path : written) {
                manifest.files.push_back({fs::relative(path, root).generic_string(), sha256_file(path),
                                          fs::file_size(path)});
            }
            std::sort(manifest.files.begin(), manifest.files.end(),
                      [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
            reports::write_json(join(dir, "run.json"), manifest.to_json());
        });
        return manifest;
    } catch (...) {
        for (const auto& path : written) fs::remove(path, ec);
        fs::remove(root / "run.json", ec);
        prune_empty_dirs(root, created_root);
        throw;
    }
}

}  // namespace courtfda::pipeline
