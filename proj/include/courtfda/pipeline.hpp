#pragma once

#include "courtfda/bootstrap.hpp"
#include "courtfda/density.hpp"
#include "courtfda/error.hpp"
#include "courtfda/fda.hpp"
#include "courtfda/ingest.hpp"
#include "courtfda/reports.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace courtfda::pipeline {

/// Every default reproduces the reference analysis settings.
struct PipelineConfig {
    std::string input;
    std::size_t min_attempts = 1000;
    std::size_t grid = 201;
    std::size_t components = 4;
    std::optional<double> variance_threshold;  // overrides `components` when set
    std::size_t clusters = 5;
    std::string weights = "both";  // equal | variance | both
    std::size_t bootstrap_replicates = 5;
    std::uint64_t seed = 0;
    std::string out = "out";
    double court_width = 50.0;
    double court_depth = 47.0;
    bool dump_densities = false;
    std::size_t threads = 0;  // 0: COURT_FDA_THREADS or hardware concurrency

    void validate() const;
    ingest::CourtSpec court() const { return {court_width, court_depth}; }
    fda::ComponentSelection selection() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Flat JSON object with the field names above.
nlohmann::json to_json(const PipelineConfig& config);
/// Starts from `base` and overrides the keys present. Unknown keys are errors.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path);

enum class Stage { Config, Ingest, Density, Mfpca, Cluster, Evaluate, Bootstrap, Export };

std::string_view to_string(Stage stage);

/// Process exit code for a failure in `stage`:
/// config 2, ingest 10, density 11, mfpca 12, cluster 13, evaluate 14,
/// bootstrap 15, export 16.
int exit_code(Stage stage);

class StageFailure : public Error {
public:
    StageFailure(Stage stage, const std::string& cause)
        : Error(std::string(to_string(stage)) + " stage failed: " + cause), stage_(stage) {}

    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// Runs fn, rethrowing any std::exception as StageFailure(stage).
template <class Fn>
auto in_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure(stage, e.what());
    }
}

struct Dataset {
    std::size_t raw_events = 0;
    std::size_t in_bounds_events = 0;
    std::size_t retained_events = 0;  // events of retained players
    std::vector<ingest::PlayerRecord> players;
    std::vector<density::FunctionalSample> samples;
};

/// Ingest only: parse, drop out-of-bounds attempts, then apply the attempt
/// threshold. Throws StageFailure(Ingest) when fewer than 2 players remain.
Dataset load_players(const PipelineConfig& config);

/// load_players followed by the per-player density estimation.
Dataset load_dataset(const PipelineConfig& config);

std::string safe_file_name(std::string_view text);

std::vector<std::string> export_model_heatmaps(const fda::MfpcaModel& model, const std::string& dir);
std::vector<std::string> export_player_decomposition(const fda::MfpcaModel& model,
                                                     const density::FunctionalSample& sample,
                                                     const std::string& dir);
std::vector<std::string> export_medoids(const reports::ClusterReport& report,
                                        const std::vector<density::FunctionalSample>& samples,
                                        const std::string& dir);
std::vector<std::string> dump_densities(const std::vector<density::FunctionalSample>& samples,
                                        const std::string& dir);
nlohmann::json stability_json(const bootstrap::StabilityReport& report);

reports::ScoreTable score_table(const std::vector<reports::PlayerInfo>& players,
                                const fda::MfpcaModel& model,
                                const std::vector<density::FunctionalSample>& samples);

reports::ClusterReport cluster_scores(const reports::ScoreTable& table,
                                      cluster::WeightScheme scheme, std::size_t k,
                                      std::uint64_t seed);

/// Distance matrix the clustering was computed on (standardized scores,
/// scheme weights).
cluster::DistanceMatrix clustering_distances(const reports::ScoreTable& table,
                                             const std::vector<double>& weights);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    nlohmann::json config;
    nlohmann::json summary;
    std::vector<ManifestEntry> files;  // sorted by path

    nlohmann::json to_json() const;
};

/// ingest -> density -> MFPCA -> scores -> k-medoids (each scheme) ->
/// metrics -> bootstrap. Writes everything under config.out plus the
/// manifest `run.json`. On failure every file written so far is removed and
/// a StageFailure is thrown.
RunManifest run_pipeline(const PipelineConfig& config);

}  // namespace courtfda::pipeline
