#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace courtfda::ingest {

/// Offensive half-court in feet.
struct CourtSpec {
    double width = 50.0;  // sideline to sideline
    double depth = 47.0;  // baseline to mid-court line

    void validate() const;
};

/// The five aggregated positional groups. Hybrid labels collapse at parse
/// time: guard-forward/forward-guard -> ForwardGuard and
/// center-forward/forward-center -> ForwardCenter.
enum class Position { Guard, ForwardGuard, Forward, ForwardCenter, Center };

inline constexpr std::array<Position, 5> kAllPositions{
    Position::Guard, Position::ForwardGuard, Position::Forward, Position::ForwardCenter,
    Position::Center};

/// Canonical lower-case label ("guard", "forward-guard", ...).
std::string_view to_string(Position p);
std::optional<Position> parse_position(std::string_view label);

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct ShotEvent {
    std::string player_id;
    std::string player_name;
    Position position = Position::Guard;
    double x = 0.0;  // unit-square coordinates
    double y = 0.0;
    bool made = false;
    std::string season;
    double x_ft = 0.0;  // raw coordinates as read, kept for lossless re-serialization
    double y_ft = 0.0;

    friend bool operator==(const ShotEvent&, const ShotEvent&) = default;
};

struct PlayerRecord {
    std::string player_id;
    std::string player_name;
    Position position = Position::Guard;
    std::vector<Point> made_points;
    std::vector<Point> missed_points;

    std::size_t attempts() const noexcept { return made_points.size() + missed_points.size(); }
};

Point normalize_point(double x_ft, double y_ft, const CourtSpec& court);

/// Parses CSV (header `player_id,player_name,position,x_ft,y_ft,made,season`,
/// header line optional) or a JSON array of objects with the same keys. The
/// format is picked from the first non-blank character. Throws ParseError
/// with the 1-based row (CSV line or JSON array element) on malformed input.
std::vector<ShotEvent> parse_events(std::istream& stream, const CourtSpec& court);
std::vector<ShotEvent> parse_events(std::string_view text, const CourtSpec& court);
std::vector<ShotEvent> read_events_file(const std::string& path, const CourtSpec& court);

/// Writes CSV with header, using the raw feet coordinates, so that
/// parse_events(write_events(parse_events(s))) == parse_events(s).
void write_events(std::ostream& out, const std::vector<ShotEvent>& events);

/// Keeps events inside the closed unit square, order preserved.
std::vector<ShotEvent> exclude_impossible(const std::vector<ShotEvent>& events);

/// Groups by player, keeps players with strictly more than min_attempts
/// attempts, sorted by player_id. Throws IngestError on conflicting position
/// labels for a player, and on a retained player without made or without
/// missed shots.
std::vector<PlayerRecord> filter_players(const std::vector<ShotEvent>& events,
                                         std::size_t min_attempts);

}  // namespace courtfda::ingest
