#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "iss/errors.hpp"

namespace iss {

// Product of finite chains {0..L_j-1}. Every analysis runs on one of these.
struct GridSpec {
    std::vector<int> levels;             // per-item level count, each >= 2
    std::vector<std::string> item_names; // same length as levels

    GridSpec() = default;
    GridSpec(std::vector<int> lv, std::vector<std::string> names);

    int dims() const { return static_cast<int>(levels.size()); }
    std::uint64_t size() const; // product of levels; throws InputError on overflow
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

// One point on the lattice. operator<=> is the lexicographic order used for
// canonical sorting only; the statistical partial order is leq() below.
struct Profile {
    std::vector<int> levels;

    Profile() = default;
    explicit Profile(std::vector<int> lv) : levels(std::move(lv)) {}

    int dims() const { return static_cast<int>(levels.size()); }
    int operator[](int j) const { return levels[static_cast<std::size_t>(j)]; }
    int& operator[](int j) { return levels[static_cast<std::size_t>(j)]; }

    auto operator<=>(const Profile&) const = default;
};

struct ProfileHash {
    std::size_t operator()(const Profile& p) const noexcept;
};

// Coordinate-wise partial order: a <= b iff a[j] <= b[j] for all j.
bool leq(const Profile& a, const Profile& b, const GridSpec& grid);
bool strictly_less(const Profile& a, const Profile& b, const GridSpec& grid);

// max |a[j] - b[j]|
int linf_distance(const Profile& a, const Profile& b);

void validate_profile(const Profile& x, const GridSpec& grid);

// All x in members dominated by no other member. Input need not be upward closed.
std::vector<Profile> minimal_corners(const std::vector<Profile>& members, const GridSpec& grid);

// Members of candidates strictly above i with no candidate strictly between.
std::vector<Profile> cover_set(const Profile& i, const std::vector<Profile>& candidates,
                               const GridSpec& grid);

// Upward-closed subset of a grid, stored by its minimal corners (an antichain,
// kept lexicographically sorted so set equality and serialization are stable).
class UpwardClosedSet {
public:
    UpwardClosedSet() = default;

    // Normalizes: validates ranges, drops dominated corners, sorts, dedups.
    static UpwardClosedSet from_corners(GridSpec grid, std::vector<Profile> corners);

    const GridSpec& grid() const { return grid_; }
    const std::vector<Profile>& corners() const { return corners_; }
    bool empty() const { return corners_.empty(); }

    bool contains(const Profile& x) const;

    // Exact closure size. Inclusion-exclusion over corner subsets for <= 24
    // corners, full-grid enumeration otherwise; the two must agree (tested).
    std::uint64_t closure_count() const;
    std::uint64_t closure_count_inclusion_exclusion() const;
    std::uint64_t closure_count_enumerate() const;

    // All members, lexicographic order. Guarded: throws if the grid exceeds max_cells.
    std::vector<Profile> enumerate_members(std::uint64_t max_cells = 1u << 22) const;

    bool operator==(const UpwardClosedSet&) const = default;

private:
    GridSpec grid_;
    std::vector<Profile> corners_;
};

UpwardClosedSet set_union(const UpwardClosedSet& a, const UpwardClosedSet& b);
UpwardClosedSet set_intersection(const UpwardClosedSet& a, const UpwardClosedSet& b);

// Visits every profile of the grid in lexicographic (mixed-radix) order.
void for_each_profile(const GridSpec& grid, const std::function<void(const Profile&)>& fn);

}  // namespace iss
