#pragma once

#include <string>
#include <vector>

#include "iss/coding.hpp"
#include "iss/lattice.hpp"
#include "iss/metrics.hpp"

#include <nlohmann/json_fwd.hpp>

namespace iss {

// Minimal RFC-style CSV: quoted fields, doubled quotes, UTF-8 passthrough.
RawTable read_csv(const std::string& path);
RawTable parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

// Corner tables: one row per corner, one column per item, grid order.
std::string corners_to_csv(const UpwardClosedSet& set);

// {"grid": {"items": [{"name","levels","reverse_coded"}...]}, "corners": [[..]]}
nlohmann::json corners_to_json(const UpwardClosedSet& set, const std::vector<ItemSpec>& items);
UpwardClosedSet corners_from_json(const nlohmann::json& j);
UpwardClosedSet read_corners_file(const std::string& path);

std::string screening_reports_to_csv(const std::vector<ScreeningReport>& reports);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// hex SHA-256, used for input digests in run manifests
std::string sha256_hex(const std::string& bytes);

// fixed shortest-roundtrip-ish numeric formatting for deterministic tables
std::string format_double(double v);

}  // namespace iss
