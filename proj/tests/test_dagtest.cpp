#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "iss/dagtest.hpp"
#include "oracles.hpp"

using namespace iss;

namespace {

GridSpec grid4x3() { return GridSpec({3, 3, 3, 3}, {"w", "x", "y", "z"}); }

HypothesisSet hyps_of(std::vector<Profile> profiles, std::vector<double> p_valid,
                      std::vector<double> p_screen = {}) {
    HypothesisSet h;
    h.profiles = std::move(profiles);
    h.p_valid = std::move(p_valid);
    h.p_screen = std::move(p_screen);
    return h;
}

Polyforest forest_of(std::vector<int> parent) {
    Polyforest f;
    f.parent = std::move(parent);
    for (std::size_t i = 0; i < f.parent.size(); ++i) {
        if (f.parent[i] < 0) f.roots.push_back(static_cast<int>(i));
    }
    return f;
}

}  // namespace

TEST_CASE("nearest-cover polyforest") {
    SUBCASE("chain of comparable hypotheses becomes a path with the strongest at the root") {
        const GridSpec g({4}, {"x"});
        const auto h = hyps_of({Profile({0}), Profile({1}), Profile({2})}, {});
        const auto f = build_polyforest_nearest(h, g, 1);
        CHECK(f.parent == std::vector<int>{1, 2, -1});
        CHECK(f.roots == std::vector<int>{2});
    }
    SUBCASE("closer cover wins") {
        const GridSpec g({2, 3}, {"x", "y"});
        // covers of (0,0): (1,0) at distance 1 and (0,2) at distance 2
        const auto h = hyps_of({Profile({0, 0}), Profile({1, 0}), Profile({0, 2})}, {});
        const auto f = build_polyforest_nearest(h, g, 1);
        CHECK(f.parent[0] == 1);
    }
    SUBCASE("ties resolve uniformly across seeds and deterministically per seed") {
        const GridSpec g({2, 2}, {"x", "y"});
        const auto h = hyps_of({Profile({0, 0}), Profile({0, 1}), Profile({1, 0})}, {});
        int count1 = 0, count2 = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto f = build_polyforest_nearest(h, g, seed);
            const auto again = build_polyforest_nearest(h, g, seed);
            CHECK(f.parent == again.parent);
            (f.parent[0] == 1 ? count1 : count2) += 1;
        }
        CHECK(count1 + count2 == 1000);
        CHECK(count1 >= 400);
        CHECK(count2 >= 400);
    }
}

TEST_CASE("evidence-guided polyforest") {
    const GridSpec g({2, 2}, {"x", "y"});
    SUBCASE("cover with the smaller screening p-value is chosen") {
        const auto h = hyps_of({Profile({0, 0}), Profile({0, 1}), Profile({1, 0})}, {},
                               {0.5, 0.10, 0.03});
        const auto f = build_polyforest_evidence(h, g, 1);
        CHECK(f.parent[0] == 2); // the 0.03 cover
    }
    SUBCASE("single cover is taken regardless of its p-value") {
        const auto h = hyps_of({Profile({0, 0}), Profile({0, 1})}, {}, {0.01, 0.99});
        const auto f = build_polyforest_evidence(h, g, 1);
        CHECK(f.parent[0] == 1);
    }
    SUBCASE("equal screening p-values fall to the seeded uniform choice") {
        const auto h = hyps_of({Profile({0, 0}), Profile({0, 1}), Profile({1, 0})}, {},
                               {0.5, 0.04, 0.04});
        int count1 = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            count1 += build_polyforest_evidence(h, g, seed).parent[0] == 1 ? 1 : 0;
        }
        CHECK(count1 >= 400);
        CHECK(1000 - count1 >= 400);
    }
    SUBCASE("missing p_screen is an input error") {
        const auto h = hyps_of({Profile({0, 0}), Profile({0, 1})}, {});
        CHECK_THROWS_AS(build_polyforest_evidence(h, g, 1), InputError);
    }
}

TEST_CASE("dag_test rejects a strong root and every dominating hypothesis") {
    const GridSpec g({2, 2}, {"x", "y"});
    const auto h = hyps_of({Profile({0, 0}), Profile({1, 1})}, {0.01, 0.95});
    const auto r = dag_test(h, forest_of({-1, -1}), 0.05, g);
    CHECK(r.rejected == std::vector<int>{0, 1}); // (1,1) rejected by propagation
}

TEST_CASE("alpha blocking: a weak parent starves a strong descendant") {
    const GridSpec g = grid4x3();
    // isolated root (0.9) plus a 0.10 root holding a 0.01 child
    const auto h = hyps_of({Profile({2, 0, 0, 0}), Profile({0, 0, 1, 1}), Profile({0, 0, 1, 0})},
                           {0.9, 0.10, 0.01});
    const auto r = dag_test(h, forest_of({-1, -1, 1}), 0.05, g);
    CHECK(r.rejected.empty()); // root sees budget 0.025 < 0.10, child never reached
}

TEST_CASE("unblocking: a rejection frees budget, the 0.03 root falls, then the 0.01 node") {
    const GridSpec g = grid4x3();
    const std::vector<Profile> profiles = {
        Profile({2, 0, 0, 0}), // 0: isolated root, p = 0.01
        Profile({0, 1, 1, 0}), // 1: root, p = 0.03, children 2 and 3
        Profile({0, 1, 0, 0}), // 2: p = 0.01
        Profile({0, 0, 1, 0}), // 3: p = 1.0
        Profile({0, 0, 0, 2}), // 4: root, p = 0.10, child 5
        Profile({0, 0, 0, 1}), // 5: p = 1.0
    };
    const auto h = hyps_of(profiles, {0.01, 0.03, 0.01, 1.0, 0.10, 1.0});
    const auto r = dag_test(h, forest_of({-1, -1, 1, 1, -1, 4}), 0.05, g);

    CHECK(r.rejected == std::vector<int>{0, 1, 2});
    REQUIRE(r.rounds.size() == 4);
    // round 1: leaves {0,2,3,5}; budgets 0.0125 / 0.025 / 0.0125; only node 0 falls
    CHECK(r.rounds[0].roots == std::vector<int>{0, 1, 4});
    CHECK(r.rounds[0].budgets[0] == doctest::Approx(0.0125));
    CHECK(r.rounds[0].budgets[1] == doctest::Approx(0.025));
    CHECK(r.rounds[0].rejected == std::vector<int>{0});
    // round 2: node 1 now holds 2 of 3 leaves -> 0.0333 >= 0.03
    CHECK(r.rounds[1].roots == std::vector<int>{1, 4});
    CHECK(r.rounds[1].budgets[0] == doctest::Approx(0.05 * 2.0 / 3.0));
    CHECK(r.rounds[1].rejected == std::vector<int>{1});
    // round 3: promoted children 2 and 3 are roots; node 2 falls at 0.0167
    CHECK(r.rounds[2].roots == std::vector<int>{2, 3, 4});
    CHECK(r.rounds[2].rejected == std::vector<int>{2});
    CHECK(r.rounds[3].rejected.empty());
}

TEST_CASE("seven-node three-root instance matches the hand-executed rounds") {
    const GridSpec g = grid4x3();
    const std::vector<Profile> profiles = {
        Profile({2, 0, 0, 0}), // 0: isolated root
        Profile({0, 2, 0, 0}), // 1: root over node 2
        Profile({0, 1, 0, 0}), // 2
        Profile({0, 0, 2, 2}), // 3: root over node 4
        Profile({0, 0, 1, 1}), // 4: inner node over 5 and 6
        Profile({0, 0, 1, 0}), // 5
        Profile({0, 0, 0, 1}), // 6
    };
    const auto h = hyps_of(profiles, {0.012, 0.020, 0.004, 0.026, 0.008, 0.9, 0.035});
    const auto r = dag_test(h, forest_of({-1, -1, 1, -1, 3, 4, 4}), 0.05, g);

    // hand execution: 4 leaves {0,2,5,6} -> budgets 0.0125/0.0125/0.025, reject 0;
    // then 3 leaves -> 0.0167/0.0333, reject 3; then node 4 (2 leaves) -> 0.0333,
    // reject 4; final round tests {1,5,6} at 0.0167 each and stops.
    CHECK(r.rejected == std::vector<int>{0, 3, 4});
    REQUIRE(r.rounds.size() == 4);
    CHECK(r.rounds[0].rejected == std::vector<int>{0});
    CHECK(r.rounds[1].rejected == std::vector<int>{3});
    CHECK(r.rounds[2].rejected == std::vector<int>{4});
    CHECK(r.rounds[2].budgets[1] == doctest::Approx(0.05 * 2.0 / 3.0));
    CHECK(r.rounds[3].rejected.empty());
    // node 1 stays blocked at 0.020 > 0.0167 although its child held 0.004
}

namespace {

// random distinct profiles + p-values on a 3x3 grid
HypothesisSet random_instance(std::mt19937& rng, const GridSpec& g, int max_nodes) {
    std::vector<Profile> pool;
    for_each_profile(g, [&](const Profile& x) { pool.push_back(x); });
    std::shuffle(pool.begin(), pool.end(), rng);
    const int m = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - 1));
    pool.resize(static_cast<std::size_t>(std::min<int>(m, static_cast<int>(pool.size()))));
    std::sort(pool.begin(), pool.end());
    HypothesisSet h;
    h.profiles = pool;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        h.p_valid.push_back(std::max(1e-6, static_cast<double>(rng() % 1000) / 1000.0));
    }
    return h;
}

}  // namespace

TEST_CASE("dag_test invariants on random instances") {
    const GridSpec g({3, 3}, {"x", "y"});
    std::mt19937 rng(71);
    for (int trial = 0; trial < 150; ++trial) {
        HypothesisSet h = random_instance(rng, g, 9);
        const auto f = build_polyforest_nearest(h, g, trial);
        const auto r = dag_test(h, f, 0.05, g);

        // budgets sum to alpha every round
        for (const auto& round : r.rounds) {
            double sum = 0;
            for (double b : round.budgets) sum += b;
            CHECK(std::abs(sum - 0.05) < 1e-12);
        }
        // rejection set is upward closed within the hypothesis set
        std::vector<char> rejected(h.size(), 0);
        for (int i : r.rejected) rejected[static_cast<std::size_t>(i)] = 1;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (!rejected[i]) continue;
            for (std::size_t j = 0; j < h.size(); ++j) {
                if (i != j && leq(h.profiles[i], h.profiles[j], g)) CHECK(rejected[j] == 1);
            }
        }
        // monotone in evidence: lowering p-values never shrinks the rejection set
        HypothesisSet stronger = h;
        for (auto& p : stronger.p_valid) {
            if (rng() % 2 == 0) p = std::max(1e-9, p * 0.3);
        }
        const auto r2 = dag_test(stronger, f, 0.05, g);
        for (int i : r.rejected) {
            CHECK(std::find(r2.rejected.begin(), r2.rejected.end(), i) != r2.rejected.end());
        }
    }
}

TEST_CASE("tiered testing") {
    const GridSpec g({2, 2}, {"first", "second"});
    TierConfig tiers;
    tiers.item_tiers = {{"first", 1}, {"second", 2}};

    SUBCASE("recovered budget flows to the next tier inside one round") {
        // joint budget 0.04; tier-1 node tested at the full 0.04, leaves 0.025
        const auto h = hyps_of({Profile({1, 0}), Profile({0, 1})}, {0.015, 0.024});
        const auto r = dag_test_tiered(h, forest_of({-1, -1}), 0.04, tiers, g);
        REQUIRE(!r.rounds.empty());
        CHECK(r.rounds[0].rejected == std::vector<int>{0, 1}); // 0.024 <= 0.025 passes now
    }
    SUBCASE("carry is share minus p-value, not the full share") {
        const auto h = hyps_of({Profile({1, 0}), Profile({0, 1})}, {0.015, 0.0255});
        const auto r = dag_test_tiered(h, forest_of({-1, -1}), 0.04, tiers, g);
        // 0.0255 > 0.025 carry: node 1 only falls next round once it owns all leaves
        REQUIRE(r.rounds.size() >= 2);
        CHECK(r.rounds[0].rejected == std::vector<int>{0});
        CHECK(r.rounds[1].rejected == std::vector<int>{1});
    }
    SUBCASE("no tier-1 rejection closes the gate") {
        const auto h = hyps_of({Profile({1, 0}), Profile({0, 1})}, {0.06, 0.001});
        const auto r = dag_test_tiered(h, forest_of({-1, -1}), 0.04, tiers, g);
        CHECK(r.rejected.empty()); // tier-2 node untested despite p = 0.001
        // the untiered procedure would have rejected it
        const auto plain = dag_test(h, forest_of({-1, -1}), 0.04, g);
        CHECK(plain.rejected == std::vector<int>{1});
    }
    SUBCASE("single tier reduces exactly to dag_test") {
        const GridSpec g4 = grid4x3();
        TierConfig flat;
        for (const auto& name : g4.item_names) flat.item_tiers[name] = 1;
        const std::vector<Profile> profiles = {
            Profile({2, 0, 0, 0}), Profile({0, 2, 0, 0}), Profile({0, 1, 0, 0}),
            Profile({0, 0, 2, 2}), Profile({0, 0, 1, 1}), Profile({0, 0, 1, 0}),
            Profile({0, 0, 0, 1}),
        };
        const auto h = hyps_of(profiles, {0.012, 0.020, 0.004, 0.026, 0.008, 0.9, 0.035});
        const auto f = forest_of({-1, -1, 1, -1, 3, 4, 4});
        const auto tiered = dag_test_tiered(h, f, 0.05, flat, g4);
        const auto plain = dag_test(h, f, 0.05, g4);
        CHECK(tiered.rejected == plain.rejected);
        REQUIRE(tiered.rounds.size() == plain.rounds.size());
        for (std::size_t i = 0; i < tiered.rounds.size(); ++i) {
            CHECK(tiered.rounds[i].rejected == plain.rounds[i].rejected);
        }
    }
    SUBCASE("items without a tier are rejected up front") {
        TierConfig partial;
        partial.item_tiers = {{"first", 1}};
        const auto h = hyps_of({Profile({1, 0})}, {0.01});
        CHECK_THROWS_AS(dag_test_tiered(h, forest_of({-1}), 0.05, partial, g), InputError);
    }
}

TEST_CASE("marginal risk ratio") {
    const GridSpec g({2, 2}, {"e", "o"});
    SUBCASE("identical rates give 1") {
        EncodedDataset d;
        d.grid = g;
        d.rows = {{Profile({1, 0}), 1}, {Profile({1, 0}), 0},
                  {Profile({0, 0}), 1}, {Profile({0, 0}), 0}};
        CHECK(marginal_risk_ratio(0, d).value == doctest::Approx(1.0));
    }
    SUBCASE("exposed 1/2 vs unexposed 1/4 gives 2") {
        EncodedDataset d;
        d.grid = g;
        d.rows = {{Profile({1, 0}), 1}, {Profile({1, 0}), 0}, {Profile({0, 0}), 1},
                  {Profile({0, 0}), 0}, {Profile({0, 0}), 0}, {Profile({0, 0}), 0}};
        CHECK(marginal_risk_ratio(0, d).value == doctest::Approx(2.0));
    }
    SUBCASE("agrees with a stratified-count oracle on random data") {
        std::mt19937 rng(5);
        EncodedDataset d;
        d.grid = GridSpec({3, 2, 2}, {"a", "b", "c"});
        for (int i = 0; i < 500; ++i) {
            d.rows.push_back({Profile({static_cast<int>(rng() % 3), static_cast<int>(rng() % 2),
                                       static_cast<int>(rng() % 2)}),
                              static_cast<std::uint8_t>(rng() % 2)});
        }
        for (int item = 0; item < 3; ++item) {
            double y1 = 0, n1 = 0, y0 = 0, n0 = 0;
            for (const auto& row : d.rows) {
                if (row.profile[item] >= 1) {
                    n1 += 1;
                    y1 += row.y;
                } else {
                    n0 += 1;
                    y0 += row.y;
                }
            }
            CHECK(marginal_risk_ratio(item, d).value ==
                  doctest::Approx((y1 / n1) / (y0 / n0)));
        }
    }
    SUBCASE("error and flag paths") {
        EncodedDataset d;
        d.grid = g;
        d.rows = {{Profile({1, 0}), 1}};
        CHECK_THROWS_AS(marginal_risk_ratio(0, d), UndefinedResultError);
        d.rows.push_back({Profile({0, 0}), 0});
        CHECK(marginal_risk_ratio(0, d).infinite);
    }
}

TEST_CASE("conditional dominance test") {
    SUBCASE("swap-symmetric data gives p = 1/2 exactly") {
        EncodedDataset d;
        d.grid = GridSpec({2, 2, 2}, {"i", "j", "k"});
        const auto add_pair = [&](int a, int b, int rest, std::uint8_t y) {
            d.rows.push_back({Profile({a, b, rest}), y});
            d.rows.push_back({Profile({b, a, rest}), y});
        };
        add_pair(1, 0, 0, 1);
        add_pair(1, 0, 0, 0);
        add_pair(1, 0, 1, 1);
        add_pair(1, 0, 1, 0);
        add_pair(1, 0, 1, 0);
        CHECK(conditional_dominance_test(0, 1, d) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("single stratum matches the direct two-by-two computation") {
        EncodedDataset d;
        d.grid = GridSpec({2, 2}, {"i", "j"});
        // group A = (1,0): 6 rows, 4 events; group B = (0,1): 8 rows, 2 events
        for (int r = 0; r < 6; ++r) d.rows.push_back({Profile({1, 0}), r < 4});
        for (int r = 0; r < 8; ++r) d.rows.push_back({Profile({0, 1}), r < 2});
        const double nA = 6, nB = 8, m1 = 6, N = 14;
        const double num = 4.0 - nA * m1 / N;
        const double var = nA * nB * m1 * (N - m1) / (N * N * (N - 1));
        const double expected = 0.5 * std::erfc(num / std::sqrt(var) / std::sqrt(2.0));
        CHECK(conditional_dominance_test(0, 1, d) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("no discordant strata is an undefined result") {
        EncodedDataset d;
        d.grid = GridSpec({2, 2}, {"i", "j"});
        d.rows = {{Profile({1, 1}), 1}, {Profile({0, 0}), 0}};
        CHECK_THROWS_AS(conditional_dominance_test(0, 1, d), UndefinedResultError);
    }
    SUBCASE("null p-values are close to uniform (KS check)") {
        std::mt19937_64 rng(2024);
        auto unif = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::vector<double> pvalues;
        const int reps = 2000, n = 5000;
        for (int rep = 0; rep < reps; ++rep) {
            EncodedDataset d;
            d.grid = GridSpec({2, 2, 2, 2}, {"i", "j", "a", "b"});
            d.rows.reserve(n);
            for (int r = 0; r < n; ++r) {
                d.rows.push_back({Profile({unif() < 0.3, unif() < 0.4, unif() < 0.5,
                                           unif() < 0.5}),
                                  static_cast<std::uint8_t>(unif() < 0.3)});
            }
            pvalues.push_back(conditional_dominance_test(0, 1, d));
        }
        std::sort(pvalues.begin(), pvalues.end());
        double ks = 0;
        for (std::size_t i = 0; i < pvalues.size(); ++i) {
            const double cdf = static_cast<double>(i + 1) / static_cast<double>(reps);
            ks = std::max(ks, std::abs(cdf - pvalues[i]));
            ks = std::max(ks, std::abs(static_cast<double>(i) / reps - pvalues[i]));
        }
        CHECK(ks <= 0.05);
    }
}

TEST_CASE("risk-ratio tiers rank the strongest item first") {
    std::mt19937_64 rng(77);
    auto unif = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    EncodedDataset d;
    d.grid = GridSpec({2, 2, 2, 2}, {"strong", "null1", "mid", "null2"});
    for (int r = 0; r < 4000; ++r) {
        const int strong = unif() < 0.3, n1 = unif() < 0.3, mid = unif() < 0.3,
                  n2 = unif() < 0.3;
        const double rate = 0.05 + 0.5 * strong + 0.15 * mid;
        d.rows.push_back({Profile({strong, n1, mid, n2}), static_cast<std::uint8_t>(unif() < rate)});
    }
    const TierConfig tiers = tiers_from_risk_ratios(d, {1, 1, 2});
    CHECK(tiers.item_tiers.at("strong") == 1);
    CHECK(tiers.item_tiers.at("mid") == 2);
    CHECK(tiers.tier_count() == 3);
}
