#include "courtfda/ingest.hpp"

#include "courtfda/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

namespace courtfda::ingest {

namespace {

constexpr std::string_view kHeader = "player_id,player_name,position,x_ft,y_ft,made,season";
constexpr std::size_t kFieldCount = 7;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// RFC-4180 style split: commas separate fields, double quotes protect commas,
// "" inside quotes is a literal quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError(row, "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

double parse_number(std::string_view text, std::string_view name, std::size_t row) {
    const auto t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
        throw ParseError(row, "non-numeric " + std::string(name) + " '" + std::string(text) + "'");
    }
    return value;
}

bool parse_made(std::string_view text, std::size_t row) {
    const auto t = trim(text);
    if (t == "1") return true;
    if (t == "0") return false;
    throw ParseError(row, "made flag must be 0 or 1, got '" + std::string(text) + "'");
}

Position parse_position_or_throw(std::string_view text, std::size_t row) {
    if (auto p = parse_position(trim(text))) return *p;
    throw ParseError(row, "unknown position label '" + std::string(text) + "'");
}

ShotEvent make_event(std::string id, std::string name, Position pos, double x_ft, double y_ft,
                     bool made, std::string season, const CourtSpec& court) {
    const auto p = normalize_point(x_ft, y_ft, court);
    return ShotEvent{std::move(id), std::move(name), pos, p.x, p.y, made, std::move(season),
                     x_ft, y_ft};
}

std::vector<ShotEvent> parse_csv(std::istream& in, const CourtSpec& court) {
    std::vector<ShotEvent> events;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view view = line;
        if (row == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (trim(view).empty()) continue;
        if (row == 1 && lower(trim(view)) == kHeader) continue;

        auto f = split_csv(view, row);
        if (f.size() != kFieldCount) {
            throw ParseError(row, "expected " + std::to_string(kFieldCount) + " fields, got " +
                                      std::to_string(f.size()));
        }
        const auto pos = parse_position_or_throw(f[2], row);
        const double x_ft = parse_number(f[3], "x_ft", row);
        const double y_ft = parse_number(f[4], "y_ft", row);
        const bool made = parse_made(f[5], row);
        events.push_back(make_event(std::string(trim(f[0])), std::string(trim(f[1])), pos, x_ft,
                                    y_ft, made, std::string(trim(f[6])), court));
    }
    return events;
}

double json_number(const nlohmann::json& v, std::string_view name, std::size_t row) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_number(v.get<std::string>(), name, row);
    throw ParseError(row, "non-numeric " + std::string(name));
}

std::string json_text(const nlohmann::json& obj, const char* key, std::size_t row) {
    if (!obj.contains(key)) throw ParseError(row, std::string("missing key '") + key + "'");
    const auto& v = obj.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ParseError(row, std::string("key '") + key + "' must be text");
}

std::vector<ShotEvent> parse_json(const std::string& text, const CourtSpec& court) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError(0, "JSON input must be an array of objects");

    std::vector<ShotEvent> events;
    events.reserve(doc.size());
    std::size_t row = 0;
    for (const auto& obj : doc) {
        ++row;
        if (!obj.is_object()) throw ParseError(row, "element is not an object");
        for (const char* key : {"x_ft", "y_ft", "made"}) {
            if (!obj.contains(key)) throw ParseError(row, std::string("missing key '") + key + "'");
        }
        const auto pos = parse_position_or_throw(json_text(obj, "position", row), row);
        const double x_ft = json_number(obj.at("x_ft"), "x_ft", row);
        const double y_ft = json_number(obj.at("y_ft"), "y_ft", row);
        const auto& m = obj.at("made");
        bool made = false;
        if (m.is_boolean()) {
            made = m.get<bool>();
        } else if (m.is_number_integer() && (m.get<long long>() == 0 || m.get<long long>() == 1)) {
            made = m.get<long long>() == 1;
        } else if (m.is_string()) {
            made = parse_made(m.get<std::string>(), row);
        } else {
            throw ParseError(row, "made flag must be 0 or 1");
        }
        const std::string season = obj.contains("season") ? json_text(obj, "season", row) : "";
        events.push_back(make_event(json_text(obj, "player_id", row),
                                    json_text(obj, "player_name", row), pos, x_ft, y_ft, made,
                                    season, court));
    }
    return events;
}

void write_csv_field(std::ostream& out, const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void CourtSpec::validate() const {
    if (!(width > 0.0) || !(depth > 0.0)) {
        throw IngestError("court dimensions must be positive");
    }
}

std::string_view to_string(Position p) {
    switch (p) {
        case Position::Guard: return "guard";
        case Position::ForwardGuard: return "forward-guard";
        case Position::Forward: return "forward";
        case Position::ForwardCenter: return "forward-center";
        case Position::Center: return "center";
    }
    return "unknown";
}

std::optional<Position> parse_position(std::string_view label) {
    const auto l = lower(label);
    if (l == "guard") return Position::Guard;
    if (l == "guard-forward" || l == "forward-guard") return Position::ForwardGuard;
    if (l == "forward") return Position::Forward;
    if (l == "forward-center" || l == "center-forward") return Position::ForwardCenter;
    if (l == "center") return Position::Center;
    return std::nullopt;
}

Point normalize_point(double x_ft, double y_ft, const CourtSpec& court) {
    return {x_ft / court.width, y_ft / court.depth};
}

std::vector<ShotEvent> parse_events(std::istream& stream, const CourtSpec& court) {
    court.validate();
    std::string text{std::istreambuf_iterator<char>(stream), std::istreambuf_iterator<char>()};
    return parse_events(std::string_view(text), court);
}

std::vector<ShotEvent> parse_events(std::string_view text, const CourtSpec& court) {
    court.validate();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    if (text[first] == '[') return parse_json(std::string(text), court);
    std::istringstream in{std::string(text)};
    return parse_csv(in, court);
}

std::vector<ShotEvent> read_events_file(const std::string& path, const CourtSpec& court) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open input '" + path + "'");
    return parse_events(in, court);
}

void write_events(std::ostream& out, const std::vector<ShotEvent>& events) {
    out << kHeader << '\n';
    const auto old = out.precision(17);
    for (const auto& e : events) {
        write_csv_field(out, e.player_id);
        out << ',';
        write_csv_field(out, e.player_name);
        out << ',' << to_string(e.position) << ',' << e.x_ft << ',' << e.y_ft << ','
            << (e.made ? 1 : 0) << ',';
        write_csv_field(out, e.season);
        out << '\n';
    }
    out.precision(old);
}

std::vector<ShotEvent> exclude_impossible(const std::vector<ShotEvent>& events) {
    std::vector<ShotEvent> kept;
    kept.reserve(events.size());
    std::copy_if(events.begin(), events.end(), std::back_inserter(kept), [](const ShotEvent& e) {
        return e.x >= 0.0 && e.x <= 1.0 && e.y >= 0.0 && e.y <= 1.0;
    });
    return kept;
}

std::vector<PlayerRecord> filter_players(const std::vector<ShotEvent>& events,
                                         std::size_t min_attempts) {
    if (min_attempts < 1) throw IngestError("min_attempts must be at least 1");

    std::map<std::string, PlayerRecord> by_id;
    for (const auto& e : events) {
        auto [it, inserted] = by_id.try_emplace(e.player_id);
        auto& rec = it->second;
        if (inserted) {
            rec.player_id = e.player_id;
            rec.player_name = e.player_name;
            rec.position = e.position;
        } else if (rec.position != e.position) {
            throw IngestError("player '" + e.player_id + "' has conflicting position labels (" +
                              std::string(to_string(rec.position)) + " vs " +
                              std::string(to_string(e.position)) + ")");
        }
        (e.made ? rec.made_points : rec.missed_points).push_back({e.x, e.y});
    }

    std::vector<PlayerRecord> out;
    for (auto& [id, rec] : by_id) {
        if (rec.attempts() <= min_attempts) continue;
        if (rec.made_points.empty() || rec.missed_points.empty()) {
            throw IngestError("player '" + id + "' has no " +
                              (rec.made_points.empty() ? "made" : "missed") +
                              " shots; a density cannot be estimated");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace courtfda::ingest
