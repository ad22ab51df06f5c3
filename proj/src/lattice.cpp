#include "iss/lattice.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace iss {

GridSpec::GridSpec(std::vector<int> lv, std::vector<std::string> names)
    : levels(std::move(lv)), item_names(std::move(names)) {
    validate();
}

void GridSpec::validate() const {
    if (levels.size() != item_names.size()) {
        throw InputError("GridSpec: levels and item_names differ in length");
    }
    if (levels.empty()) throw InputError("GridSpec: empty grid");
    for (int L : levels) {
        if (L < 2) throw InputError("GridSpec: every item needs at least 2 levels");
    }
    size(); // overflow check
}

std::uint64_t GridSpec::size() const {
    std::uint64_t n = 1;
    for (int L : levels) {
        const auto l = static_cast<std::uint64_t>(L);
        if (n > std::numeric_limits<std::uint64_t>::max() / l) {
            throw InputError("GridSpec: grid size overflows 64 bits");
        }
        n *= l;
    }
    return n;
}

std::size_t ProfileHash::operator()(const Profile& p) const noexcept {
    // FNV-1a over the level vector
    std::uint64_t h = 1469598103934665603ull;
    for (int v : p.levels) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

void validate_profile(const Profile& x, const GridSpec& grid) {
    if (x.dims() != grid.dims()) throw InputError("profile dimension does not match grid");
    for (int j = 0; j < grid.dims(); ++j) {
        if (x[j] < 0 || x[j] >= grid.levels[static_cast<std::size_t>(j)]) {
            throw InputError("profile level out of range for item " +
                             grid.item_names[static_cast<std::size_t>(j)]);
        }
    }
}

namespace {

inline bool leq_unchecked(const Profile& a, const Profile& b) {
    const int d = a.dims();
    for (int j = 0; j < d; ++j) {
        if (a[j] > b[j]) return false;
    }
    return true;
}

}  // namespace

bool leq(const Profile& a, const Profile& b, const GridSpec& grid) {
    if (a.dims() != grid.dims() || b.dims() != grid.dims()) {
        throw InputError("leq: profile dimension does not match grid");
    }
    return leq_unchecked(a, b);
}

bool strictly_less(const Profile& a, const Profile& b, const GridSpec& grid) {
    return leq(a, b, grid) && a != b;
}

int linf_distance(const Profile& a, const Profile& b) {
    if (a.dims() != b.dims()) throw InputError("linf_distance: dimension mismatch");
    int m = 0;
    for (int j = 0; j < a.dims(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

std::vector<Profile> minimal_corners(const std::vector<Profile>& members, const GridSpec& grid) {
    for (const auto& m : members) validate_profile(m, grid);

    // Sorting by level sum lets each candidate be screened against the
    // already-accepted minima only.
    std::vector<Profile> sorted = members;
    std::sort(sorted.begin(), sorted.end(), [](const Profile& a, const Profile& b) {
        const long sa = std::accumulate(a.levels.begin(), a.levels.end(), 0L);
        const long sb = std::accumulate(b.levels.begin(), b.levels.end(), 0L);
        return sa != sb ? sa < sb : a < b;
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<Profile> minima;
    for (const auto& x : sorted) {
        bool dominated = false;
        for (const auto& m : minima) {
            if (leq_unchecked(m, x)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) minima.push_back(x);
    }
    std::sort(minima.begin(), minima.end());
    return minima;
}

std::vector<Profile> cover_set(const Profile& i, const std::vector<Profile>& candidates,
                               const GridSpec& grid) {
    validate_profile(i, grid);
    std::vector<Profile> dominators;
    for (const auto& c : candidates) {
        if (strictly_less(i, c, grid)) dominators.push_back(c);
    }
    // covers of i = minimal elements of its strict dominators
    return minimal_corners(dominators, grid);
}

UpwardClosedSet UpwardClosedSet::from_corners(GridSpec grid, std::vector<Profile> corners) {
    grid.validate();
    UpwardClosedSet s;
    s.corners_ = minimal_corners(corners, grid);
    s.grid_ = std::move(grid);
    return s;
}

bool UpwardClosedSet::contains(const Profile& x) const {
    validate_profile(x, grid_);
    for (const auto& c : corners_) {
        if (leq_unchecked(c, x)) return true;
    }
    return false;
}

std::uint64_t UpwardClosedSet::closure_count() const {
    if (corners_.empty()) return 0;
    if (corners_.size() <= 24) return closure_count_inclusion_exclusion();
    return closure_count_enumerate();
}

std::uint64_t UpwardClosedSet::closure_count_inclusion_exclusion() const {
    if (corners_.empty()) return 0;
    const auto n = corners_.size();
    if (n > 24) throw InputError("inclusion-exclusion counter limited to 24 corners");
    const int d = grid_.dims();

    // |up(S)| for a corner subset S is the box above the coordinate-wise max.
    // DFS over include/exclude keeps the running max in O(d) per node.
    __int128 total = 0;
    std::vector<int> maxv(static_cast<std::size_t>(d), 0);
    std::function<void(std::size_t, int, std::vector<int>&)> dfs =
        [&](std::size_t idx, int picked, std::vector<int>& cur) {
            if (idx == n) {
                if (picked == 0) return;
                std::uint64_t box = 1;
                for (int j = 0; j < d; ++j) {
                    box *= static_cast<std::uint64_t>(grid_.levels[static_cast<std::size_t>(j)] -
                                                      cur[static_cast<std::size_t>(j)]);
                }
                total += (picked % 2 == 1) ? static_cast<__int128>(box)
                                           : -static_cast<__int128>(box);
                return;
            }
            dfs(idx + 1, picked, cur);
            std::vector<int> next = cur;
            for (int j = 0; j < d; ++j) {
                next[static_cast<std::size_t>(j)] =
                    std::max(next[static_cast<std::size_t>(j)], corners_[idx][j]);
            }
            dfs(idx + 1, picked + 1, next);
        };
    dfs(0, 0, maxv);
    if (total < 0 || total > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max())) {
        throw InputError("closure count out of range");
    }
    return static_cast<std::uint64_t>(total);
}

std::uint64_t UpwardClosedSet::closure_count_enumerate() const {
    if (corners_.empty()) return 0;
    std::uint64_t count = 0;
    const int d = grid_.dims();
    Profile x(std::vector<int>(static_cast<std::size_t>(d), 0));
    bool done = false;
    while (!done) {
        for (const auto& c : corners_) {
            if (leq_unchecked(c, x)) {
                ++count;
                break;
            }
        }
        int j = d - 1;
        for (;; --j) {
            if (j < 0) {
                done = true;
                break;
            }
            if (++x[j] < grid_.levels[static_cast<std::size_t>(j)]) break;
            x[j] = 0;
        }
    }
    return count;
}

std::vector<Profile> UpwardClosedSet::enumerate_members(std::uint64_t max_cells) const {
    if (grid_.size() > max_cells) {
        throw InputError("enumerate_members: grid too large to enumerate");
    }
    std::vector<Profile> out;
    for_each_profile(grid_, [&](const Profile& x) {
        for (const auto& c : corners_) {
            if (leq_unchecked(c, x)) {
                out.push_back(x);
                break;
            }
        }
    });
    return out;
}

UpwardClosedSet set_union(const UpwardClosedSet& a, const UpwardClosedSet& b) {
    if (a.grid() != b.grid()) throw InputError("set_union: grids differ");
    std::vector<Profile> corners = a.corners();
    corners.insert(corners.end(), b.corners().begin(), b.corners().end());
    return UpwardClosedSet::from_corners(a.grid(), std::move(corners));
}

UpwardClosedSet set_intersection(const UpwardClosedSet& a, const UpwardClosedSet& b) {
    if (a.grid() != b.grid()) throw InputError("set_intersection: grids differ");
    // up(A) ∩ up(B) = up({max(a,b) : a in A, b in B})
    std::vector<Profile> maxima;
    maxima.reserve(a.corners().size() * b.corners().size());
    const int d = a.grid().dims();
    for (const auto& ca : a.corners()) {
        for (const auto& cb : b.corners()) {
            Profile m = ca;
            for (int j = 0; j < d; ++j) m[j] = std::max(m[j], cb[j]);
            maxima.push_back(std::move(m));
        }
    }
    return UpwardClosedSet::from_corners(a.grid(), std::move(maxima));
}

void for_each_profile(const GridSpec& grid, const std::function<void(const Profile&)>& fn) {
    const int d = grid.dims();
    Profile x(std::vector<int>(static_cast<std::size_t>(d), 0));
    bool done = false;
    while (!done) {
        fn(x);
        int j = d - 1;
        for (;; --j) {
            if (j < 0) {
                done = true;
                break;
            }
            if (++x[j] < grid.levels[static_cast<std::size_t>(j)]) break;
            x[j] = 0;
        }
    }
}

}  // namespace iss
