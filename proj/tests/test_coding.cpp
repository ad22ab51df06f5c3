#include <doctest.h>

#include <random>

#include "iss/coding.hpp"
#include "oracles.hpp"

using namespace iss;

namespace {

Profile named(const GridSpec& grid, const std::vector<std::pair<std::string, int>>& set) {
    Profile x(std::vector<int>(static_cast<std::size_t>(grid.dims()), 0));
    for (const auto& [name, level] : set) {
        const auto it = std::find(grid.item_names.begin(), grid.item_names.end(), name);
        REQUIRE(it != grid.item_names.end());
        x[static_cast<int>(it - grid.item_names.begin())] = level;
    }
    return x;
}

RawTable table_from(const std::vector<std::string>& cols,
                    const std::vector<std::vector<std::string>>& rows) {
    RawTable t;
    t.columns = cols;
    t.cells = rows;
    return t;
}

}  // namespace

TEST_CASE("preset grids have the documented sizes") {
    const auto items = ace_item_preset();
    CHECK(make_grid(items, Coding::Binary).size() == 1024);
    CHECK(make_grid(items, Coding::Frequency).size() == 32400);
    CHECK(make_grid(items, Coding::Score).size() == 11);
}

TEST_CASE("coarsen") {
    const GridSpec freq = make_grid(ace_item_preset(), Coding::Frequency);
    SUBCASE("intensity collapses to presence") {
        const Profile x = named(freq, {{"ACESEX", 2}});
        const Profile b = coarsen(x, freq);
        CHECK(b == named(GridSpec(std::vector<int>(10, 2), freq.item_names), {{"ACESEX", 1}}));
    }
    SUBCASE("identity on all-zeros and on binary profiles") {
        const Profile zero(std::vector<int>(10, 0));
        CHECK(coarsen(zero, freq) == zero);
        const Profile b = named(freq, {{"ACEDEPRS", 1}, {"ACESWEAR", 1}});
        CHECK(coarsen(coarsen(b, freq), freq) == coarsen(b, freq));
    }
    SUBCASE("monotone: x <= x' implies C(x) <= C(x')") {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 200; ++trial) {
            Profile x(std::vector<int>(10, 0)), y(std::vector<int>(10, 0));
            for (int j = 0; j < 10; ++j) {
                const int L = freq.levels[static_cast<std::size_t>(j)];
                x[j] = static_cast<int>(rng() % static_cast<unsigned>(L));
                y[j] = x[j] + static_cast<int>(rng() % static_cast<unsigned>(L - x[j]));
            }
            CHECK(oracle::leq_vec(coarsen(x, freq).levels, coarsen(y, freq).levels));
        }
    }
}

TEST_CASE("lift membership") {
    const GridSpec freq = make_grid(ace_item_preset(), Coding::Frequency);
    const GridSpec bin = make_grid(ace_item_preset(), Coding::Binary);

    SUBCASE("frequency refinement of a selected binary corner lifts in") {
        const auto b_set = UpwardClosedSet::from_corners(bin, {named(bin, {{"ACESEX", 1}})});
        CHECK(lift_membership(b_set, named(freq, {{"ACESEX", 2}}), freq));
    }
    SUBCASE("missing required item blocks the lift") {
        const auto b_set = UpwardClosedSet::from_corners(
            bin, {named(bin, {{"ACESEX", 1}, {"ACEDIVRC", 1}})});
        CHECK_FALSE(lift_membership(b_set, named(freq, {{"ACESEX", 1}}), freq));
    }
    SUBCASE("whole binary grid lifts everything") {
        const auto b_set =
            UpwardClosedSet::from_corners(bin, {Profile(std::vector<int>(10, 0))});
        std::mt19937 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            Profile x(std::vector<int>(10, 0));
            for (int j = 0; j < 10; ++j) {
                x[j] = static_cast<int>(
                    rng() % static_cast<unsigned>(freq.levels[static_cast<std::size_t>(j)]));
            }
            CHECK(lift_membership(b_set, x, freq));
        }
    }
    SUBCASE("lift of an upward-closed set is upward closed") {
        const auto b_set = UpwardClosedSet::from_corners(
            bin, {named(bin, {{"ACEDEPRS", 1}}), named(bin, {{"ACESWEAR", 1}, {"ACESEX", 1}})});
        const auto lifted = lift_set(b_set, freq);
        std::mt19937 rng(15);
        for (int trial = 0; trial < 300; ++trial) {
            Profile x(std::vector<int>(10, 0));
            for (int j = 0; j < 10; ++j) {
                x[j] = static_cast<int>(
                    rng() % static_cast<unsigned>(freq.levels[static_cast<std::size_t>(j)]));
            }
            CHECK(lifted.contains(x) == lift_membership(b_set, x, freq));
            if (lifted.contains(x)) {
                Profile up = x;
                for (int j = 0; j < 10; ++j) {
                    if (up[j] + 1 < freq.levels[static_cast<std::size_t>(j)]) {
                        ++up[j];
                        CHECK(lifted.contains(up));
                        --up[j];
                    }
                }
            }
        }
    }
    SUBCASE("item mismatch is rejected") {
        const GridSpec other({2, 2}, {"x", "y"});
        const auto b_set = UpwardClosedSet::from_corners(other, {Profile({1, 0})});
        CHECK_THROWS_AS(lift_membership(b_set, named(freq, {}), freq), InputError);
    }
}

TEST_CASE("ace_score") {
    const GridSpec freq = make_grid(ace_item_preset(), Coding::Frequency);
    CHECK(ace_score(Profile(std::vector<int>(10, 0))) == 0);
    CHECK(ace_score(named(freq, {{"ACESEX", 2}, {"ACESWEAR", 2}, {"ACEDEPRS", 1}})) == 3);
    SUBCASE("equals the coordinate sum after coarsening") {
        std::mt19937 rng(21);
        for (int trial = 0; trial < 200; ++trial) {
            Profile x(std::vector<int>(10, 0));
            for (int j = 0; j < 10; ++j) {
                x[j] = static_cast<int>(
                    rng() % static_cast<unsigned>(freq.levels[static_cast<std::size_t>(j)]));
            }
            const Profile b = coarsen(x, freq);
            int sum = 0;
            for (int j = 0; j < 10; ++j) sum += b[j];
            CHECK(ace_score(x) == sum);
        }
    }
    SUBCASE("intensity-invariant above level 1, strictly monotone in new items") {
        const Profile lo = named(freq, {{"ACESEX", 1}});
        const Profile hi = named(freq, {{"ACESEX", 2}});
        CHECK(ace_score(lo) == ace_score(hi));
        CHECK(ace_score(named(freq, {{"ACESEX", 1}, {"ACESUB", 1}})) > ace_score(lo));
    }
}

TEST_CASE("score_chain") {
    EncodedDataset data;
    data.grid = make_grid(ace_item_preset(), Coding::Frequency);
    data.rows.push_back({Profile(std::vector<int>(10, 0)), 0});
    data.rows.push_back({named(data.grid, {{"ACESEX", 2}, {"ACEDEPRS", 1}}), 1});
    const EncodedDataset chain = score_chain(data);
    CHECK(chain.grid.levels == std::vector<int>{11});
    CHECK(chain.rows[0].profile == Profile({0}));
    CHECK(chain.rows[1].profile == Profile({2}));

    SUBCASE("rows at or below a chain level are exactly the rows with that score or less") {
        for (int z = 0; z <= 2; ++z) {
            int expected = 0;
            for (const auto& row : data.rows) {
                if (ace_score(row.profile) <= z) ++expected;
            }
            int actual = 0;
            for (const auto& row : chain.rows) {
                if (row.profile[0] <= z) ++actual;
            }
            CHECK(actual == expected);
        }
    }
}

TEST_CASE("encode_dataset") {
    const auto items = ace_item_preset();
    const std::vector<std::string> cols = {"ACEDEPRS", "ACESUB",   "ACEPRISN", "ACEDIVRC",
                                           "ACEPUNCH", "ACEHURT1", "ACESWEAR", "ACESEX",
                                           "ACEADSAF", "ACEADNED", "Y",        "PART"};

    SUBCASE("labels decode per the preset, including reverse coding") {
        const auto raw = table_from(
            cols, {{"Yes", "No", "0", "1", "Once", "None", "More than once", "2", "Never",
                    "All of the time", "1", "red"}});
        const auto result = encode_dataset(raw, items, Coding::Frequency);
        REQUIRE(result.errors.empty());
        REQUIRE(result.data.rows.size() == 1);
        const Profile& p = result.data.rows[0].profile;
        CHECK(p == Profile({1, 0, 0, 1, 1, 0, 2, 2, 4, 0})); // "Never" -> 4 on ACEADSAF
        CHECK(result.data.rows[0].y == 1);
        CHECK(result.parts == std::vector<std::string>{"red"});
    }
    SUBCASE("binary coding collapses frequency levels") {
        const auto raw =
            table_from(cols, {{"1", "0", "0", "0", "2", "0", "1", "2", "3", "0", "0", "blue"}});
        const auto result = encode_dataset(raw, items, Coding::Binary);
        REQUIRE(result.data.rows.size() == 1);
        CHECK(result.data.rows[0].profile == Profile({1, 0, 0, 0, 1, 0, 1, 1, 1, 0}));
    }
    SUBCASE("score coding counts positive items") {
        const auto raw =
            table_from(cols, {{"1", "0", "0", "0", "2", "0", "1", "2", "3", "0", "0", "blue"}});
        const auto result = encode_dataset(raw, items, Coding::Score);
        REQUIRE(result.data.rows.size() == 1);
        CHECK(result.data.rows[0].profile == Profile({5}));
    }
    SUBCASE("complete-case filtering drops rows with any missing value") {
        const auto raw = table_from(
            cols, {
                      {"1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "1", "red"},
                      {"", "0", "0", "0", "0", "0", "0", "0", "0", "0", "1", "red"},
                      {"1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "NA", "red"},
                      {"1", "NA", "0", "0", "0", "0", "0", "0", "0", "0", "0", "red"},
                      {"0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "blue"},
                  });
        const auto result = encode_dataset(raw, items, Coding::Frequency);
        CHECK(result.data.rows.size() == 2);
        CHECK(result.dropped_missing == 3);
        CHECK(result.source_rows == std::vector<int>{1, 5});
    }
    SUBCASE("unknown and out-of-range values produce addressed errors") {
        const auto raw = table_from(
            cols, {
                      {"1", "0", "0", "0", "7", "0", "0", "0", "0", "0", "1", "red"},
                      {"maybe", "0", "0", "0", "0", "0", "0", "0", "0", "0", "1", "red"},
                      {"1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "2", "red"},
                  });
        const auto result = encode_dataset(raw, items, Coding::Frequency);
        CHECK(result.data.rows.empty());
        REQUIRE(result.errors.size() == 3);
        CHECK(result.errors[0].row == 1);
        CHECK(result.errors[0].column == "ACEPUNCH");
        CHECK(result.errors[0].value == "7");
        CHECK(result.errors[1].row == 2);
        CHECK(result.errors[1].column == "ACEDEPRS");
        CHECK(result.errors[2].column == "Y");
    }
    SUBCASE("missing required column") {
        const auto raw = table_from({"ACEDEPRS", "Y"}, {{"1", "0"}});
        CHECK_THROWS_AS(encode_dataset(raw, items, Coding::Binary), DataError);
    }
}
