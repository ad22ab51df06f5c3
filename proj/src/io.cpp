#include "iss/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iss {

RawTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() || !record.empty() || field_started) end_record();
        } else if (c == '\r') {
            // swallow; \r\n handled by the \n branch
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (!field.empty() || !record.empty() || field_started) end_record();

    if (records.empty()) throw DataError("CSV input has no header row");
    RawTable table;
    table.columns = records.front();
    table.cells.assign(records.begin() + 1, records.end());
    return table;
}

RawTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string corners_to_csv(const UpwardClosedSet& set) {
    std::ostringstream out;
    out << "corner";
    for (const auto& name : set.grid().item_names) out << ',' << csv_escape(name);
    out << '\n';
    int idx = 1;
    for (const auto& corner : set.corners()) {
        out << idx++;
        for (int v : corner.levels) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

nlohmann::json corners_to_json(const UpwardClosedSet& set, const std::vector<ItemSpec>& items) {
    nlohmann::json grid_items = nlohmann::json::array();
    const auto& grid = set.grid();
    for (int j = 0; j < grid.dims(); ++j) {
        bool reverse = false;
        for (const auto& it : items) {
            if (it.name == grid.item_names[static_cast<std::size_t>(j)]) {
                reverse = it.reverse_coded;
                break;
            }
        }
        grid_items.push_back({{"name", grid.item_names[static_cast<std::size_t>(j)]},
                              {"levels", grid.levels[static_cast<std::size_t>(j)]},
                              {"reverse_coded", reverse}});
    }
    nlohmann::json corners = nlohmann::json::array();
    for (const auto& c : set.corners()) corners.push_back(c.levels);
    return {{"grid", {{"items", grid_items}}}, {"corners", corners}};
}

UpwardClosedSet corners_from_json(const nlohmann::json& j) {
    if (!j.contains("grid") || !j["grid"].contains("items") || !j.contains("corners")) {
        throw DataError("corners JSON needs grid.items and corners");
    }
    std::vector<int> levels;
    std::vector<std::string> names;
    for (const auto& item : j["grid"]["items"]) {
        names.push_back(item.at("name").get<std::string>());
        levels.push_back(item.at("levels").get<int>());
    }
    GridSpec grid(levels, names);
    std::vector<Profile> corners;
    for (const auto& row : j["corners"]) {
        corners.emplace_back(row.get<std::vector<int>>());
    }
    return UpwardClosedSet::from_corners(std::move(grid), std::move(corners));
}

UpwardClosedSet read_corners_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse corners file " + path + ": " + e.what());
    }
    return corners_from_json(j);
}

std::string screening_reports_to_csv(const std::vector<ScreeningReport>& reports) {
    std::ostringstream out;
    out << "rule,PPR,Sensitivity,Specificity,PPV,NPV\n";
    for (const auto& r : reports) {
        out << csv_escape(r.label) << ',' << format_double(r.ppr) << ','
            << format_double(r.sensitivity) << ',' << format_double(r.specificity) << ','
            << (r.ppv_defined ? format_double(r.ppv) : std::string("undefined")) << ','
            << (r.npv_defined ? format_double(r.npv) : std::string("undefined")) << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- SHA-256 (FIPS 180-4, compact implementation) -------------------------

namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                      0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string msg = bytes;
    const std::uint64_t bit_len = static_cast<std::uint64_t>(bytes.size()) * 8;
    msg.push_back(static_cast<char>(0x80));
    while (msg.size() % 64 != 56) msg.push_back('\0');
    for (int i = 7; i >= 0; --i) msg.push_back(static_cast<char>((bit_len >> (i * 8)) & 0xff));

    std::array<std::uint32_t, 64> w;
    for (std::size_t block = 0; block < msg.size(); block += 64) {
        for (int t = 0; t < 16; ++t) {
            w[static_cast<std::size_t>(t)] =
                (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[block + 4 * t])) << 24) |
                (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[block + 4 * t + 1]))
                 << 16) |
                (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[block + 4 * t + 2]))
                 << 8) |
                static_cast<std::uint32_t>(static_cast<unsigned char>(msg[block + 4 * t + 3]));
        }
        for (int t = 16; t < 64; ++t) {
            const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
            const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
            w[static_cast<std::size_t>(t)] = w[t - 16] + s0 + w[t - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int t = 0; t < 64; ++t) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t temp1 = hh + S1 + ch + kSha256K[static_cast<std::size_t>(t)] +
                                        w[static_cast<std::size_t>(t)];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t temp2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + temp1;
            d = c;
            c = b;
            b = a;
            a = temp1 + temp2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }
    char out[65];
    for (int i = 0; i < 8; ++i) {
        std::snprintf(out + 8 * i, 9, "%08x", h[static_cast<std::size_t>(i)]);
    }
    return std::string(out, 64);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace iss
