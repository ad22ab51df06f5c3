#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iss/lattice.hpp"

namespace iss {

// One ordinal exposure item. For reverse-coded items the worst label maps to
// the highest numeric level.
struct ItemSpec {
    std::string name;
    int n_levels = 2;
    bool reverse_coded = false;
    std::vector<std::string> level_labels; // index = numeric level; may be empty
};

enum class Coding { Binary, Frequency, Score };

std::string coding_name(Coding c);
Coding coding_from_name(const std::string& name);

struct EncodedDataset {
    struct Row {
        Profile profile;
        std::uint8_t y = 0;
    };

    GridSpec grid;
    std::vector<Row> rows;
    std::optional<std::string> part_label;

    std::size_t size() const { return rows.size(); }
};

// The ten-item preset used by the shipped analyses: four binary items, four
// three-level frequency items, two five-level reverse-coded items.
std::vector<ItemSpec> ace_item_preset();

GridSpec make_grid(const std::vector<ItemSpec>& items, Coding coding);

// 1{level >= 1} per item; binary coordinates pass through.
Profile coarsen(const Profile& x, const GridSpec& freq_grid);
EncodedDataset coarsen_dataset(const EncodedDataset& freq_data);

// true iff the binary collapse of x lies in binary_set.
bool lift_membership(const UpwardClosedSet& binary_set, const Profile& x_freq,
                     const GridSpec& freq_grid);

// Embeds binary corners into the frequency grid: up of the lifted set equals
// the preimage of the binary set under coarsening.
UpwardClosedSet lift_set(const UpwardClosedSet& binary_set, const GridSpec& freq_grid);

// number of items at a positive level
int ace_score(const Profile& x);

// Collapses every profile to its item count on a one-item chain grid {0..d}.
EncodedDataset score_chain(const EncodedDataset& data);

// ---- CSV-shaped ingestion ----------------------------------------------

struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> cells; // ragged rows rejected at parse time
};

struct EncodeIssue {
    int row = 0; // 1-based data row (header not counted)
    std::string column;
    std::string value;
};

struct EncodeResult {
    EncodedDataset data;
    std::vector<std::string> parts;  // per encoded row; empty when no PART column
    std::vector<int> source_rows;    // 1-based raw rows retained
    int dropped_missing = 0;         // complete-case drops
    std::vector<EncodeIssue> errors; // unknown / out-of-range values
};

// Applies label decoding, reverse coding, level caps, and the coding collapse.
// Rows with a missing item or outcome are dropped; unrecognized values are
// reported per (row, column, value) and their rows excluded.
EncodeResult encode_dataset(const RawTable& raw, const std::vector<ItemSpec>& items,
                            Coding coding);

}  // namespace iss
