#include "courtfda/reports.hpp"

#include "courtfda/error.hpp"
#include "courtfda/heatmap.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace courtfda::reports {

namespace {

ingest::Position position_from(const nlohmann::json& j) {
    const auto text = j.get<std::string>();
    if (auto p = ingest::parse_position(text)) return *p;
    throw Error("unknown position '" + text + "'");
}

nlohmann::json player_json(const PlayerInfo& p) {
    return {{"player_id", p.player_id},
            {"player_name", p.player_name},
            {"position", std::string(ingest::to_string(p.position))}};
}

PlayerInfo player_from(const nlohmann::json& j) {
    auto id = j.at("player_id").get<std::string>();
    auto name = j.at("player_name").get<std::string>();
    const auto position = position_from(j.at("position"));
    return {std::move(id), std::move(name), position};
}

std::string plural_label(ingest::Position p) {
    return p == ingest::Position::Guard ? "guards" : std::string(ingest::to_string(p));
}

}  // namespace

std::vector<PlayerInfo> player_infos(const std::vector<ingest::PlayerRecord>& records) {
    std::vector<PlayerInfo> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.player_id, r.player_name, r.position});
    return out;
}

nlohmann::json to_json(const ScoreTable& table) {
    nlohmann::json players = nlohmann::json::array();
    for (std::size_t i = 0; i < table.players.size(); ++i) {
        auto p = player_json(table.players[i]);
        const auto row = table.scores.row(i);
        p["scores"] = std::vector<double>(row.begin(), row.end());
        players.push_back(std::move(p));
    }
    return {{"eigenvalues", table.eigenvalues},
            {"variance_ratios", table.variance_ratios},
            {"players", std::move(players)}};
}

ScoreTable score_table_from_json(const nlohmann::json& j) {
    try {
        ScoreTable t;
        t.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        t.variance_ratios = j.at("variance_ratios").get<std::vector<double>>();
        const auto& players = j.at("players");
        const std::size_t k = t.eigenvalues.size();
        t.scores = ScoreMatrix(players.size(), k);
        for (std::size_t i = 0; i < players.size(); ++i) {
            t.players.push_back(player_from(players[i]));
            const auto row = players[i].at("scores").get<std::vector<double>>();
            if (row.size() != k) throw Error("score row length does not match eigenvalue count");
            for (std::size_t c = 0; c < k; ++c) t.scores(i, c) = row[c];
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed score table: ") + e.what());
    }
}

ScoreTable read_score_table(const std::string& path) { return score_table_from_json(read_json(path)); }

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
    out << "player_id,player_name,position";
    for (std::size_t k = 0; k < table.scores.cols(); ++k) out << ",c" << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < table.players.size(); ++i) {
        const auto& p = table.players[i];
        out << p.player_id << ',' << p.player_name << ',' << ingest::to_string(p.position);
        for (double v : table.scores.row(i)) out << ',' << heatmap::format_double(v);
        out << '\n';
    }
}

nlohmann::json to_json(const ClusterReport& report) {
    const auto& c = report.clustering;
    nlohmann::json players = nlohmann::json::array();
    for (std::size_t i = 0; i < report.players.size(); ++i) {
        auto p = player_json(report.players[i]);
        p["cluster"] = c.labels[i] + 1;
        p["is_medoid"] = c.medoids[c.labels[i]] == i;
        players.push_back(std::move(p));
    }
    nlohmann::json medoids = nlohmann::json::array();
    for (std::size_t m = 0; m < c.medoids.size(); ++m) {
        medoids.push_back({{"cluster", m + 1},
                           {"index", c.medoids[m]},
                           {"player_id", report.players[c.medoids[m]].player_id}});
    }
    return {{"k", c.medoids.size()},
            {"weights", std::string(cluster::to_string(report.scheme))},
            {"weight_values", report.weights},
            {"total_cost", c.total_cost},
            {"swaps", c.swaps},
            {"medoids", std::move(medoids)},
            {"players", std::move(players)}};
}

ClusterReport cluster_report_from_json(const nlohmann::json& j) {
    try {
        ClusterReport r;
        const auto scheme = cluster::parse_weight_scheme(j.at("weights").get<std::string>());
        if (!scheme) throw Error("unknown weight scheme in cluster file");
        r.scheme = *scheme;
        r.weights = j.at("weight_values").get<std::vector<double>>();
        r.clustering.total_cost = j.at("total_cost").get<double>();
        r.clustering.swaps = j.value("swaps", std::size_t{0});
        for (const auto& m : j.at("medoids")) r.clustering.medoids.push_back(m.at("index").get<std::size_t>());
        for (const auto& p : j.at("players")) {
            r.players.push_back(player_from(p));
            const auto label = p.at("cluster").get<std::size_t>();
            if (label < 1 || label > r.clustering.medoids.size()) throw Error("cluster number out of range");
            r.clustering.labels.push_back(label - 1);
        }
        for (auto m : r.clustering.medoids) {
            if (m >= r.players.size()) throw Error("medoid index out of range");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed cluster file: ") + e.what());
    }
}

ClusterReport read_cluster_report(const std::string& path) {
    return cluster_report_from_json(read_json(path));
}

std::string roster_text(const ClusterReport& report) {
    std::ostringstream out;
    const auto& c = report.clustering;
    out << "k-medoids, k = " << c.medoids.size() << ", weights = " << cluster::to_string(report.scheme)
        << "\n\n";
    for (std::size_t m = 0; m < c.medoids.size(); ++m) {
        std::map<ingest::Position, std::size_t> counts;
        std::string names;
        for (std::size_t i = 0; i < report.players.size(); ++i) {
            if (c.labels[i] != m) continue;
            ++counts[report.players[i].position];
            if (!names.empty()) names += ", ";
            names += report.players[i].player_name;
        }
        out << "Cluster " << (m + 1) << " (medoid: " << report.players[c.medoids[m]].player_name
            << ")\n  " << names << ".\n  Number of ";
        bool first = true;
        for (auto p : ingest::kAllPositions) {
            out << (first ? "" : "; ") << plural_label(p) << ": " << counts[p];
            first = false;
        }
        out << ".\n\n";
    }
    return out.str();
}

metrics::Partition position_partition(const std::vector<PlayerInfo>& players) {
    std::map<ingest::Position, std::size_t> dense;
    for (const auto& p : players) dense[p.position] = 0;
    metrics::Partition part;
    for (auto& [pos, label] : dense) {
        label = part.label_names.size();
        part.label_names.emplace_back(ingest::to_string(pos));
    }
    for (const auto& p : players) part.labels.push_back(dense[p.position]);
    return part;
}

metrics::Partition cluster_partition(const ClusterReport& report) {
    metrics::Partition part{report.clustering.labels, {}};
    for (std::size_t m = 0; m < report.clustering.medoids.size(); ++m) {
        part.label_names.push_back("cluster " + std::to_string(m + 1));
    }
    return part;
}

nlohmann::json compare_partitions(const metrics::Partition& a, const metrics::Partition& b) {
    return {{"rows", a.label_names},
            {"cols", b.label_names},
            {"counts", metrics::confusion_matrix(a, b)},
            {"ari", metrics::adjusted_rand_index(a, b)}};
}

nlohmann::json silhouette_json(const metrics::SilhouetteResult& s, const metrics::Partition& p) {
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t c = 0; c < s.cluster_means.size(); ++c) {
        per.push_back({{"label", c < p.label_names.size() ? p.label_names[c] : std::to_string(c)},
                       {"mean", s.cluster_means[c]}});
    }
    return {{"mean", s.mean}, {"per_cluster", std::move(per)}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace courtfda::reports
