#include "iss/coding.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace iss {

std::string coding_name(Coding c) {
    switch (c) {
        case Coding::Binary: return "binary";
        case Coding::Frequency: return "frequency";
        case Coding::Score: return "score";
    }
    return "binary";
}

Coding coding_from_name(const std::string& name) {
    if (name == "binary") return Coding::Binary;
    if (name == "frequency") return Coding::Frequency;
    if (name == "score") return Coding::Score;
    throw InputError("unknown coding '" + name + "' (expected binary|frequency|score)");
}

std::vector<ItemSpec> ace_item_preset() {
    const std::vector<std::string> yesno = {"No", "Yes"};
    const std::vector<std::string> freq3 = {"None", "Once", "More than once"};
    // protective wording, so the worst answer carries the highest level
    const std::vector<std::string> freq5 = {"All of the time", "Most of the time",
                                            "Some of the time", "A little of the time", "Never"};
    return {
        {"ACEDEPRS", 2, false, yesno}, {"ACESUB", 2, false, yesno},
        {"ACEPRISN", 2, false, yesno}, {"ACEDIVRC", 2, false, yesno},
        {"ACEPUNCH", 3, false, freq3}, {"ACEHURT1", 3, false, freq3},
        {"ACESWEAR", 3, false, freq3}, {"ACESEX", 3, false, freq3},
        {"ACEADSAF", 5, true, freq5},  {"ACEADNED", 5, true, freq5},
    };
}

GridSpec make_grid(const std::vector<ItemSpec>& items, Coding coding) {
    if (items.empty()) throw InputError("make_grid: no items");
    if (coding == Coding::Score) {
        return GridSpec({static_cast<int>(items.size()) + 1}, {"SCORE"});
    }
    std::vector<int> levels;
    std::vector<std::string> names;
    for (const auto& it : items) {
        if (it.n_levels < 2) throw InputError("item " + it.name + ": needs at least 2 levels");
        levels.push_back(coding == Coding::Binary ? 2 : it.n_levels);
        names.push_back(it.name);
    }
    return GridSpec(std::move(levels), std::move(names));
}

Profile coarsen(const Profile& x, const GridSpec& freq_grid) {
    validate_profile(x, freq_grid);
    Profile b = x;
    for (int j = 0; j < x.dims(); ++j) b[j] = x[j] >= 1 ? 1 : 0;
    return b;
}

EncodedDataset coarsen_dataset(const EncodedDataset& freq_data) {
    EncodedDataset out;
    out.grid = GridSpec(std::vector<int>(static_cast<std::size_t>(freq_data.grid.dims()), 2),
                        freq_data.grid.item_names);
    out.part_label = freq_data.part_label;
    out.rows.reserve(freq_data.rows.size());
    for (const auto& row : freq_data.rows) {
        out.rows.push_back({coarsen(row.profile, freq_data.grid), row.y});
    }
    return out;
}

bool lift_membership(const UpwardClosedSet& binary_set, const Profile& x_freq,
                     const GridSpec& freq_grid) {
    if (binary_set.grid().item_names != freq_grid.item_names) {
        throw InputError("lift_membership: item sets differ");
    }
    return binary_set.contains(coarsen(x_freq, freq_grid));
}

UpwardClosedSet lift_set(const UpwardClosedSet& binary_set, const GridSpec& freq_grid) {
    if (binary_set.grid().item_names != freq_grid.item_names) {
        throw InputError("lift_set: item sets differ");
    }
    // C(x) >= b iff x >= b read as a frequency profile, so corners embed as-is.
    return UpwardClosedSet::from_corners(freq_grid, binary_set.corners());
}

int ace_score(const Profile& x) {
    int z = 0;
    for (int j = 0; j < x.dims(); ++j) z += x[j] >= 1 ? 1 : 0;
    return z;
}

EncodedDataset score_chain(const EncodedDataset& data) {
    EncodedDataset out;
    out.grid = GridSpec({data.grid.dims() + 1}, {"SCORE"});
    out.part_label = data.part_label;
    out.rows.reserve(data.rows.size());
    for (const auto& row : data.rows) {
        out.rows.push_back({Profile({ace_score(row.profile)}), row.y});
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_missing(const std::string& v) {
    return v.empty() || v == "NA" || v == "na" || v == "." || v == "NaN";
}

bool parse_int(const std::string& v, int& out) {
    if (v.empty()) return false;
    std::size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) return false;
    for (std::size_t j = i; j < v.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(v[j]))) return false;
    }
    try {
        out = std::stoi(v);
    } catch (...) {
        return false;
    }
    return true;
}

}  // namespace

EncodeResult encode_dataset(const RawTable& raw, const std::vector<ItemSpec>& items,
                            Coding coding) {
    EncodeResult result;

    std::unordered_map<std::string, int> col_index;
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        col_index[trim(raw.columns[c])] = static_cast<int>(c);
    }
    std::vector<int> item_cols;
    for (const auto& it : items) {
        auto found = col_index.find(it.name);
        if (found == col_index.end()) throw DataError("input table lacks column " + it.name);
        item_cols.push_back(found->second);
    }
    auto y_it = col_index.find("Y");
    if (y_it == col_index.end()) throw DataError("input table lacks outcome column Y");
    const int y_col = y_it->second;
    const int part_col = col_index.count("PART") ? col_index.at("PART") : -1;

    // label -> level per item (reverse coding is already baked into the label order)
    std::vector<std::unordered_map<std::string, int>> label_maps(items.size());
    for (std::size_t j = 0; j < items.size(); ++j) {
        for (std::size_t lvl = 0; lvl < items[j].level_labels.size(); ++lvl) {
            label_maps[j][items[j].level_labels[lvl]] = static_cast<int>(lvl);
        }
    }

    result.data.grid = make_grid(items, coding);

    for (std::size_t r = 0; r < raw.cells.size(); ++r) {
        const auto& cells = raw.cells[r];
        const int row_no = static_cast<int>(r) + 1;
        if (cells.size() != raw.columns.size()) {
            throw DataError("row " + std::to_string(row_no) + ": wrong field count");
        }
        bool missing = false;
        bool bad = false;

        std::vector<int> levels(items.size());
        for (std::size_t j = 0; j < items.size(); ++j) {
            const std::string v = trim(cells[static_cast<std::size_t>(item_cols[j])]);
            if (is_missing(v)) {
                missing = true;
                continue;
            }
            int lvl;
            if (parse_int(v, lvl)) {
                if (lvl < 0 || lvl >= items[j].n_levels) {
                    result.errors.push_back({row_no, items[j].name, v});
                    bad = true;
                    continue;
                }
            } else {
                auto hit = label_maps[j].find(v);
                if (hit == label_maps[j].end()) {
                    result.errors.push_back({row_no, items[j].name, v});
                    bad = true;
                    continue;
                }
                lvl = hit->second;
            }
            levels[j] = lvl;
        }

        const std::string yv = trim(cells[static_cast<std::size_t>(y_col)]);
        std::uint8_t y = 0;
        if (is_missing(yv)) {
            missing = true;
        } else {
            int yi;
            if (!parse_int(yv, yi) || (yi != 0 && yi != 1)) {
                result.errors.push_back({row_no, "Y", yv});
                bad = true;
            } else {
                y = static_cast<std::uint8_t>(yi);
            }
        }

        if (bad) continue;
        if (missing) {
            ++result.dropped_missing;
            continue;
        }

        Profile p;
        if (coding == Coding::Score) {
            int z = 0;
            for (int lvl : levels) z += lvl >= 1 ? 1 : 0;
            p = Profile({z});
        } else {
            if (coding == Coding::Binary) {
                for (auto& lvl : levels) lvl = lvl >= 1 ? 1 : 0;
            }
            p = Profile(levels);
        }
        validate_profile(p, result.data.grid);
        result.data.rows.push_back({std::move(p), y});
        result.source_rows.push_back(row_no);
        if (part_col >= 0) {
            result.parts.push_back(trim(cells[static_cast<std::size_t>(part_col)]));
        }
    }
    return result;
}

}  // namespace iss
