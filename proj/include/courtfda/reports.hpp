#pragma once

#include "courtfda/cluster.hpp"
#include "courtfda/ingest.hpp"
#include "courtfda/matrix.hpp"
#include "courtfda/metrics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace courtfda::reports {

struct PlayerInfo {
    std::string player_id;
    std::string player_name;
    ingest::Position position = ingest::Position::Guard;

    friend bool operator==(const PlayerInfo&, const PlayerInfo&) = default;
};

std::vector<PlayerInfo> player_infos(const std::vector<ingest::PlayerRecord>& records);

// Score table file (scores.json):
//   {"eigenvalues": [...], "variance_ratios": [...],
//    "players": [{"player_id", "player_name", "position", "scores": [...]}]}
struct ScoreTable {
    std::vector<PlayerInfo> players;
    ScoreMatrix scores;
    std::vector<double> eigenvalues;
    std::vector<double> variance_ratios;
};

nlohmann::json to_json(const ScoreTable& table);
ScoreTable score_table_from_json(const nlohmann::json& j);
ScoreTable read_score_table(const std::string& path);
void write_scores_csv(std::ostream& out, const ScoreTable& table);

// Cluster file (clusters_<scheme>.json). Cluster numbers are 1-based in the
// file and 0-based in memory.
struct ClusterReport {
    std::vector<PlayerInfo> players;
    cluster::WeightScheme scheme = cluster::WeightScheme::Equal;
    std::vector<double> weights;
    cluster::Clustering clustering;
};

nlohmann::json to_json(const ClusterReport& report);
ClusterReport cluster_report_from_json(const nlohmann::json& j);
ClusterReport read_cluster_report(const std::string& path);

/// Players grouped by cluster with per-position counts.
std::string roster_text(const ClusterReport& report);

/// Positions present in the data, in canonical order, as dense labels.
metrics::Partition position_partition(const std::vector<PlayerInfo>& players);
metrics::Partition cluster_partition(const ClusterReport& report);

/// {"rows": [...], "cols": [...], "counts": [[...]], "ari": x}
nlohmann::json compare_partitions(const metrics::Partition& a, const metrics::Partition& b);

/// {"mean": x, "per_cluster": [{"label", "mean"}...]}
nlohmann::json silhouette_json(const metrics::SilhouetteResult& s, const metrics::Partition& p);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace courtfda::reports
