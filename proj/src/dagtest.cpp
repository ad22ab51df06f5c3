#include "iss/dagtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "iss/parallel.hpp"
#include "iss/rng.hpp"

namespace iss {

void HypothesisSet::validate(const GridSpec& grid) const {
    for (const auto& p : profiles) validate_profile(p, grid);
    if (p_valid.size() != profiles.size() && !p_valid.empty()) {
        throw InputError("HypothesisSet: p_valid length mismatch");
    }
    for (double p : p_valid) {
        if (!(p > 0.0 && p <= 1.0)) throw InputError("HypothesisSet: p-values must lie in (0,1]");
    }
    if (!p_screen.empty() && p_screen.size() != profiles.size()) {
        throw InputError("HypothesisSet: p_screen length mismatch");
    }
    std::vector<Profile> sorted = profiles;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputError("HypothesisSet: profiles must be distinct");
    }
}

int TierConfig::tier_count() const {
    int t = 0;
    for (const auto& [name, tier] : item_tiers) t = std::max(t, tier);
    return t;
}

void TierConfig::validate(const GridSpec& grid) const {
    for (const auto& name : grid.item_names) {
        auto it = item_tiers.find(name);
        if (it == item_tiers.end()) {
            throw InputError("TierConfig: item " + name + " has no tier");
        }
        if (it->second < 1) throw InputError("TierConfig: tiers are 1-based");
    }
    if (!tier_weights.empty()) {
        if (static_cast<int>(tier_weights.size()) < tier_count()) {
            throw InputError("TierConfig: fewer weights than tiers");
        }
        for (double w : tier_weights) {
            if (!(w > 0)) throw InputError("TierConfig: weights must be positive");
        }
    }
}

int TierConfig::node_tier(const Profile& x, const GridSpec& grid) const {
    int best = std::numeric_limits<int>::max();
    for (int j = 0; j < grid.dims(); ++j) {
        if (x[j] >= 1) {
            best = std::min(best, item_tiers.at(grid.item_names[static_cast<std::size_t>(j)]));
        }
    }
    // all-zero profile: lowest priority
    return best == std::numeric_limits<int>::max() ? tier_count() : best;
}

namespace {

bool leq_profiles(const Profile& a, const Profile& b) {
    for (int j = 0; j < a.dims(); ++j) {
        if (a[j] > b[j]) return false;
    }
    return true;
}

bool strict_dom(const Profile& lo, const Profile& hi) {
    return leq_profiles(lo, hi) && lo != hi;
}

// Cover sets for every node: minimal elements among each node's strict
// dominators, found by scanning candidates in level-sum order.
std::vector<std::vector<int>> covers_for_all(const std::vector<Profile>& profiles,
                                             const GridSpec& grid, int threads) {
    const int m = static_cast<int>(profiles.size());
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::vector<long> sums(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        sums[static_cast<std::size_t>(i)] =
            std::accumulate(profiles[static_cast<std::size_t>(i)].levels.begin(),
                            profiles[static_cast<std::size_t>(i)].levels.end(), 0L);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sums[static_cast<std::size_t>(a)] != sums[static_cast<std::size_t>(b)]
                   ? sums[static_cast<std::size_t>(a)] < sums[static_cast<std::size_t>(b)]
                   : profiles[static_cast<std::size_t>(a)] < profiles[static_cast<std::size_t>(b)];
    });

    std::vector<std::vector<int>> covers(static_cast<std::size_t>(m));
    (void)grid;
    parallel_for(m, threads, [&](std::int64_t ii) {
        const int i = static_cast<int>(ii);
        const Profile& xi = profiles[static_cast<std::size_t>(i)];
        auto& cov = covers[static_cast<std::size_t>(i)];
        for (int pos = 0; pos < m; ++pos) {
            const int j = order[static_cast<std::size_t>(pos)];
            if (sums[static_cast<std::size_t>(j)] <= sums[static_cast<std::size_t>(i)]) continue;
            const Profile& xj = profiles[static_cast<std::size_t>(j)];
            if (!strict_dom(xi, xj)) continue;
            bool shadowed = false;
            for (int c : cov) {
                if (leq_profiles(profiles[static_cast<std::size_t>(c)], xj)) {
                    shadowed = true;
                    break;
                }
            }
            if (!shadowed) cov.push_back(j);
        }
        std::sort(cov.begin(), cov.end());
    });
    return covers;
}

Polyforest build_forest(const HypothesisSet& hyps, const GridSpec& grid, std::uint64_t seed,
                        const std::function<double(int, int)>& key) {
    hyps.validate(grid);
    const int m = static_cast<int>(hyps.size());
    const auto covers = covers_for_all(hyps.profiles, grid, 0);
    Polyforest forest;
    forest.parent.assign(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        const auto& cov = covers[static_cast<std::size_t>(i)];
        if (cov.empty()) {
            forest.roots.push_back(i);
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> tied;
        for (int j : cov) {
            const double k = key(i, j);
            if (k < best) {
                best = k;
                tied.assign(1, j);
            } else if (k == best) {
                tied.push_back(j);
            }
        }
        if (tied.size() == 1) {
            forest.parent[static_cast<std::size_t>(i)] = tied.front();
        } else {
            Rng rng(seed, static_cast<std::uint64_t>(i));
            forest.parent[static_cast<std::size_t>(i)] =
                tied[static_cast<std::size_t>(rng.below(tied.size()))];
        }
    }
    return forest;
}

// Shared state for the rejection loop.
struct TestState {
    const HypothesisSet& hyps;
    const GridSpec& grid;
    int m;
    std::vector<char> alive;
    std::vector<int> parent;
    std::vector<char> rejected;
    // strict-dominance mask rows (who dominates me), present for small m
    std::vector<std::uint64_t> dom_mask;
    std::size_t words = 0;

    TestState(const HypothesisSet& h, const Polyforest& forest, const GridSpec& g)
        : hyps(h), grid(g), m(static_cast<int>(h.size())) {
        if (forest.parent.size() != h.size()) {
            throw InputError("dag_test: forest does not match hypothesis set");
        }
        alive.assign(static_cast<std::size_t>(m), 1);
        parent = forest.parent;
        rejected.assign(static_cast<std::size_t>(m), 0);
        if (m > 0 && m <= 16384) {
            words = static_cast<std::size_t>((m + 63) / 64);
            dom_mask.assign(words * static_cast<std::size_t>(m), 0);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    if (i != j && strict_dom(h.profiles[static_cast<std::size_t>(i)],
                                             h.profiles[static_cast<std::size_t>(j)])) {
                        // j dominates i
                        dom_mask[static_cast<std::size_t>(i) * words +
                                 static_cast<std::size_t>(j) / 64] |= 1ull
                                                                      << (static_cast<unsigned>(j) %
                                                                          64);
                    }
                }
            }
        }
    }

    std::vector<int> current_roots() const {
        std::vector<int> roots;
        for (int i = 0; i < m; ++i) {
            if (alive[static_cast<std::size_t>(i)] && parent[static_cast<std::size_t>(i)] < 0) {
                roots.push_back(i);
            }
        }
        return roots;
    }

    // leaf-descendant count per node and the total leaf count
    std::pair<std::vector<std::int64_t>, std::int64_t> leaf_counts() const {
        std::vector<int> child_count(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            if (alive[static_cast<std::size_t>(i)] && parent[static_cast<std::size_t>(i)] >= 0) {
                ++child_count[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            }
        }
        std::vector<char> is_leaf(static_cast<std::size_t>(m), 0);
        std::int64_t total = 0;
        for (int i = 0; i < m; ++i) {
            if (alive[static_cast<std::size_t>(i)] && child_count[static_cast<std::size_t>(i)] == 0) {
                is_leaf[static_cast<std::size_t>(i)] = 1;
                ++total;
            }
        }
        // push each leaf up through its ancestors
        std::vector<std::int64_t> counts(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            if (!alive[static_cast<std::size_t>(i)] || !is_leaf[static_cast<std::size_t>(i)]) {
                continue;
            }
            int v = i;
            counts[static_cast<std::size_t>(v)] += 1;
            while (parent[static_cast<std::size_t>(v)] >= 0) {
                v = parent[static_cast<std::size_t>(v)];
                counts[static_cast<std::size_t>(v)] += 1;
            }
        }
        return {std::move(counts), total};
    }

    // closes `newly` under "reject everything strictly dominating a rejected node"
    void propagate(std::vector<int>& newly) {
        std::vector<int> extra;
        if (!dom_mask.empty()) {
            std::vector<std::uint64_t> mask(words, 0);
            for (int r : newly) {
                const auto* row = &dom_mask[static_cast<std::size_t>(r) * words];
                for (std::size_t w = 0; w < words; ++w) mask[w] |= row[w];
            }
            for (int j = 0; j < m; ++j) {
                if (!alive[static_cast<std::size_t>(j)] || rejected[static_cast<std::size_t>(j)]) {
                    continue;
                }
                if (mask[static_cast<std::size_t>(j) / 64] &
                    (1ull << (static_cast<unsigned>(j) % 64))) {
                    extra.push_back(j);
                }
            }
        } else {
            for (int j = 0; j < m; ++j) {
                if (!alive[static_cast<std::size_t>(j)] || rejected[static_cast<std::size_t>(j)]) {
                    continue;
                }
                bool dominates = false;
                for (int r : newly) {
                    if (strict_dom(hyps.profiles[static_cast<std::size_t>(r)],
                                   hyps.profiles[static_cast<std::size_t>(j)])) {
                        dominates = true;
                        break;
                    }
                }
                if (dominates) extra.push_back(j);
            }
        }
        for (int j : extra) newly.push_back(j);
    }

    void remove(const std::vector<int>& gone) {
        for (int r : gone) {
            rejected[static_cast<std::size_t>(r)] = 1;
            alive[static_cast<std::size_t>(r)] = 0;
        }
        for (int i = 0; i < m; ++i) {
            if (alive[static_cast<std::size_t>(i)]) {
                const int p = parent[static_cast<std::size_t>(i)];
                if (p >= 0 && !alive[static_cast<std::size_t>(p)]) {
                    parent[static_cast<std::size_t>(i)] = -1;
                }
            }
        }
    }
};

RejectionResult run_rejection_loop(
    const HypothesisSet& hyps, const Polyforest& forest, double alpha, const GridSpec& grid,
    const std::function<std::vector<int>(const std::vector<int>& roots,
                                         const std::vector<double>& budgets)>& select_rejections) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("dag_test: alpha must lie in (0,1)");
    hyps.validate(grid);
    if (hyps.p_valid.size() != hyps.size()) {
        throw InputError("dag_test: p_valid required for every hypothesis");
    }

    TestState state(hyps, forest, grid);
    RejectionResult result;
    for (int round = 0;; ++round) {
        const auto roots = state.current_roots();
        if (roots.empty()) break;
        const auto [leafdesc, total_leaves] = state.leaf_counts();

        std::vector<double> budgets(roots.size(), 0.0);
        for (std::size_t r = 0; r < roots.size(); ++r) {
            budgets[r] = alpha *
                         static_cast<double>(leafdesc[static_cast<std::size_t>(roots[r])]) /
                         static_cast<double>(total_leaves);
        }

        std::vector<int> newly = select_rejections(roots, budgets);
        state.propagate(newly);
        std::sort(newly.begin(), newly.end());
        newly.erase(std::unique(newly.begin(), newly.end()), newly.end());

        RoundRecord record;
        record.round = round;
        record.roots = roots;
        record.budgets = budgets;
        record.rejected = newly;
        result.rounds.push_back(std::move(record));

        if (newly.empty()) break;
        state.remove(newly);
    }
    for (int i = 0; i < state.m; ++i) {
        if (state.rejected[static_cast<std::size_t>(i)]) result.rejected.push_back(i);
    }
    return result;
}

}  // namespace

Polyforest build_polyforest_nearest(const HypothesisSet& hyps, const GridSpec& grid,
                                    std::uint64_t seed) {
    return build_forest(hyps, grid, seed, [&](int i, int j) {
        return static_cast<double>(linf_distance(hyps.profiles[static_cast<std::size_t>(i)],
                                                 hyps.profiles[static_cast<std::size_t>(j)]));
    });
}

Polyforest build_polyforest_evidence(const HypothesisSet& hyps, const GridSpec& grid,
                                     std::uint64_t seed) {
    if (hyps.p_screen.size() != hyps.size()) {
        throw InputError("build_polyforest_evidence: p_screen required");
    }
    return build_forest(hyps, grid, seed,
                        [&](int, int j) { return hyps.p_screen[static_cast<std::size_t>(j)]; });
}

RejectionResult dag_test(const HypothesisSet& hyps, const Polyforest& forest, double alpha,
                         const GridSpec& grid) {
    return run_rejection_loop(
        hyps, forest, alpha, grid,
        [&](const std::vector<int>& roots, const std::vector<double>& budgets) {
            std::vector<int> newly;
            for (std::size_t r = 0; r < roots.size(); ++r) {
                if (hyps.p_valid[static_cast<std::size_t>(roots[r])] <= budgets[r]) {
                    newly.push_back(roots[r]);
                }
            }
            return newly;
        });
}

RejectionResult dag_test_tiered(const HypothesisSet& hyps, const Polyforest& forest, double alpha,
                                const TierConfig& tiers, const GridSpec& grid) {
    tiers.validate(grid);
    const int T = tiers.tier_count();
    std::vector<double> weights = tiers.tier_weights;
    if (weights.empty()) weights.assign(static_cast<std::size_t>(T), 1.0);

    return run_rejection_loop(
        hyps, forest, alpha, grid,
        [&](const std::vector<int>& roots, const std::vector<double>& budgets) {
            // roots in lexicographic profile order, first-fit into antichain subsets
            std::vector<std::size_t> order(roots.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return hyps.profiles[static_cast<std::size_t>(roots[a])] <
                       hyps.profiles[static_cast<std::size_t>(roots[b])];
            });
            std::vector<std::vector<std::size_t>> subsets;
            for (std::size_t pos : order) {
                const Profile& x = hyps.profiles[static_cast<std::size_t>(roots[pos])];
                bool placed = false;
                for (auto& subset : subsets) {
                    bool comparable = false;
                    for (std::size_t q : subset) {
                        const Profile& y = hyps.profiles[static_cast<std::size_t>(roots[q])];
                        if (leq_profiles(x, y) || leq_profiles(y, x)) {
                            comparable = true;
                            break;
                        }
                    }
                    if (!comparable) {
                        subset.push_back(pos);
                        placed = true;
                        break;
                    }
                }
                if (!placed) subsets.push_back({pos});
            }

            std::vector<int> newly;
            for (const auto& subset : subsets) {
                // levels present in this subset, most important first
                std::vector<int> node_tier(subset.size());
                std::vector<int> levels;
                for (std::size_t s = 0; s < subset.size(); ++s) {
                    node_tier[s] = tiers.node_tier(
                        hyps.profiles[static_cast<std::size_t>(roots[subset[s]])], grid);
                    levels.push_back(node_tier[s]);
                }
                std::sort(levels.begin(), levels.end());
                levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

                double joint = 0;
                for (std::size_t s : subset) joint += budgets[s];

                // every root owns the full joint budget at the first level;
                // later levels only see what rejections recover
                std::vector<double> pool(levels.size(), 0.0);
                pool[0] = joint;
                for (std::size_t li = 0; li < levels.size(); ++li) {
                    std::vector<std::size_t> members;
                    double level_weight_sum = 0;
                    for (std::size_t s = 0; s < subset.size(); ++s) {
                        if (node_tier[s] == levels[li]) {
                            members.push_back(subset[s]);
                            level_weight_sum += budgets[subset[s]];
                        }
                    }
                    double carry = 0;
                    bool any = false;
                    for (std::size_t pos : members) {
                        const double share =
                            pool[li] * budgets[pos] / level_weight_sum;
                        const double p = hyps.p_valid[static_cast<std::size_t>(roots[pos])];
                        if (p <= share) {
                            newly.push_back(roots[pos]);
                            carry += share - p;
                            any = true;
                        }
                    }
                    if (!any) break; // gate closed: later tiers stay untested
                    if (li + 1 < levels.size() && carry > 0) {
                        double wsum = 0;
                        for (std::size_t lj = li + 1; lj < levels.size(); ++lj) {
                            wsum += weights[static_cast<std::size_t>(levels[lj] - 1)];
                        }
                        for (std::size_t lj = li + 1; lj < levels.size(); ++lj) {
                            pool[lj] +=
                                carry * weights[static_cast<std::size_t>(levels[lj] - 1)] / wsum;
                        }
                    }
                }
            }
            return newly;
        });
}

RiskRatio marginal_risk_ratio(int item, const EncodedDataset& data) {
    if (item < 0 || item >= data.grid.dims()) throw InputError("marginal_risk_ratio: bad item");
    std::int64_t n1 = 0, y1 = 0, n0 = 0, y0 = 0;
    for (const auto& row : data.rows) {
        if (row.profile[item] >= 1) {
            ++n1;
            y1 += row.y;
        } else {
            ++n0;
            y0 += row.y;
        }
    }
    if (n1 == 0 || n0 == 0) {
        throw UndefinedResultError("marginal_risk_ratio: an exposure group is empty");
    }
    const double exposed = static_cast<double>(y1) / static_cast<double>(n1);
    const double unexposed = static_cast<double>(y0) / static_cast<double>(n0);
    RiskRatio rr;
    if (unexposed > 0) {
        rr.value = exposed / unexposed;
    } else {
        rr.infinite = true;
        rr.value = exposed > 0 ? std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::quiet_NaN();
    }
    return rr;
}

double conditional_dominance_test(int i, int j, const EncodedDataset& data) {
    const int d = data.grid.dims();
    if (i == j || i < 0 || j < 0 || i >= d || j >= d) {
        throw InputError("conditional_dominance_test: bad item pair");
    }
    if (d > 64) throw InputError("conditional_dominance_test: too many items to stratify");

    struct Cell {
        std::int64_t nA = 0, yA = 0, nB = 0, yB = 0;
    };
    std::unordered_map<std::uint64_t, Cell> strata;
    for (const auto& row : data.rows) {
        const bool on_i = row.profile[i] >= 1;
        const bool on_j = row.profile[j] >= 1;
        if (on_i == on_j) continue; // discordant exposure patterns only
        std::uint64_t key = 0;
        for (int c = 0, bit = 0; c < d; ++c) {
            if (c == i || c == j) continue;
            if (row.profile[c] >= 1) key |= 1ull << bit;
            ++bit;
        }
        auto& cell = strata[key];
        if (on_i) {
            ++cell.nA;
            cell.yA += row.y;
        } else {
            ++cell.nB;
            cell.yB += row.y;
        }
    }

    double num = 0, var = 0;
    bool usable = false;
    for (const auto& [key, c] : strata) {
        if (c.nA == 0 || c.nB == 0) continue;
        const double N = static_cast<double>(c.nA + c.nB);
        const double m1 = static_cast<double>(c.yA + c.yB);
        if (N < 2 || m1 <= 0 || m1 >= N) continue; // no outcome variation: zero information
        usable = true;
        num += static_cast<double>(c.yA) - static_cast<double>(c.nA) * m1 / N;
        var += static_cast<double>(c.nA) * static_cast<double>(c.nB) * m1 * (N - m1) /
               (N * N * (N - 1.0));
    }
    if (!usable || var <= 0) {
        throw UndefinedResultError("conditional_dominance_test: no informative strata");
    }
    const double z = num / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TierConfig tiers_from_risk_ratios(const EncodedDataset& data, const std::vector<int>& tier_sizes) {
    const int d = data.grid.dims();
    std::vector<int> sizes = tier_sizes;
    const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
    if (total != d) {
        sizes.assign(3, d / 3);
        sizes[1] += d - 3 * (d / 3);
    }
    std::vector<std::pair<double, int>> ranked;
    for (int item = 0; item < d; ++item) {
        double score;
        try {
            const RiskRatio rr = marginal_risk_ratio(item, data);
            score = std::isnan(rr.value) ? -std::numeric_limits<double>::infinity() : rr.value;
        } catch (const UndefinedResultError&) {
            score = -std::numeric_limits<double>::infinity();
        }
        ranked.emplace_back(score, item);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    TierConfig config;
    int idx = 0;
    for (std::size_t t = 0; t < sizes.size(); ++t) {
        for (int k = 0; k < sizes[t] && idx < d; ++k, ++idx) {
            config.item_tiers[data.grid.item_names[static_cast<std::size_t>(ranked
                                                                                [static_cast<std::size_t>(
                                                                                     idx)]
                                                                                    .second)]] =
                static_cast<int>(t) + 1;
        }
    }
    return config;
}

}  // namespace iss
