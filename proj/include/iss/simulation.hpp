#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "iss/coding.hpp"
#include "iss/dagtest.hpp"
#include "iss/lattice.hpp"
#include "iss/turnover.hpp"

namespace iss {

enum class SignalShape { MainEffects, Interaction };

std::string shape_name(SignalShape s);
SignalShape shape_from_name(const std::string& name);

// Latent frequency-coded generator: independent coordinates with fixed
// marginals, logistic outcome b0 + s * eta0(x) with nonnegative coefficients,
// so the true superlevel set is upward closed.
struct DgpConfig {
    GridSpec grid;
    std::vector<std::vector<double>> marginals; // per item, over levels, each sums to 1
    SignalShape shape = SignalShape::MainEffects;
    std::vector<double> beta;
    double gamma = 0.5;       // interaction weight on the last two items
    double b0 = -2.1972245773362196; // logit(0.10)
    double tau = 0.20;
    double target_mass = 0.5;

    void validate() const;
    double pi(const Profile& x) const; // population mass of one cell
};

// Ten-item configuration mirroring the application grid; beta and marginals
// are documented stand-ins (the generator only promises monotone signal).
DgpConfig default_dgp(SignalShape shape, double target_mass);

double logit(double p);
double inv_logit(double z);

// eta0 then through the link
double eta(const Profile& x, const DgpConfig& config, double scale);

// Smallest s (to 1e-6) whose superlevel mass reaches the target, by bisection
// with exact grid enumeration per evaluation. Throws CalibrationError with the
// attainable mass when no s works.
double calibrate_scale(const DgpConfig& config, double tau, double target_mass);

struct OracleTruth {
    double scale = 0;
    UpwardClosedSet truth_freq;
    UpwardClosedSet truth_bin;
    double mass_freq = 0; // population mass of truth_freq
    double mass_bin = 0;
};

OracleTruth build_oracle(const DgpConfig& config, double scale);

// pi_bin(b) = sum of pi over the coarsening fiber of b (product form)
double pi_binary(const DgpConfig& config, const Profile& b);

struct SimulatedData {
    EncodedDataset red_freq;  // 55% of rows
    EncodedDataset blue_freq; // 45%
};

SimulatedData sample_dataset(const DgpConfig& config, double scale, int n, std::uint64_t seed);

// Mass of truth \ selected, with masses normalized to total 1.
double average_regret(const UpwardClosedSet& selected, const UpwardClosedSet& truth,
                      const std::function<double(const Profile&)>& mass);

struct SimRow {
    int n = 0;
    double target_mass = 0;
    std::string shape;
    std::string method;
    std::string metric;
    double value = 0;
    int replications = 0;
    std::uint64_t seed0 = 0;
};

struct Part1Grid {
    std::vector<int> n_values{10000};
    std::vector<double> target_masses{0.5};
    std::vector<SignalShape> shapes{SignalShape::MainEffects, SignalShape::Interaction};
    std::vector<ParentRule> parent_rules{ParentRule::Nearest, ParentRule::Evidence};
    int replications = 50;
    double tau = 0.20;
    double alpha = 0.05;
    std::uint64_t seed0 = 20240001;
    int threads = 0;
};

// Cross-screening in both directions on binary-coded data; reports mean
// regret of the union and intersection selections plus empirical FWER.
std::vector<SimRow> run_part1(const Part1Grid& grid);

struct Part2Grid {
    std::vector<int> n_values{20000};
    std::vector<double> target_masses{0.5};
    std::vector<SignalShape> shapes{SignalShape::MainEffects};
    int replications = 50;
    double tau = 0.20;
    double alpha = 0.05;
    std::uint64_t seed0 = 20240002;
    int threads = 0;
};

// Single-pass ISS per coding (score chain, binary, frequency); per-observation
// confusion metrics against the oracle labels.
std::vector<SimRow> run_part2(const Part2Grid& grid);

struct TieringGrid {
    std::vector<int> n_values{10000};
    std::vector<double> target_masses{0.5};
    std::vector<SignalShape> shapes{SignalShape::MainEffects};
    int replications = 50;
    double tau = 0.20;
    double alpha = 0.05;
    std::uint64_t seed0 = 20240003;
    int threads = 0;
};

// Blue->red direction only under frequency coding: nearest cover vs
// evidence-guided vs evidence-guided + tiering (tiers ranked per dataset from
// binarized marginal risk ratios).
std::vector<SimRow> run_tiering_experiment(const TieringGrid& grid);

void write_sim_rows_csv(const std::string& path, const std::vector<SimRow>& rows);

}  // namespace iss
