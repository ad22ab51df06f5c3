#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "iss/io.hpp"
#include "iss/metrics.hpp"
#include "iss/simulation.hpp"
#include "iss/turnover.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace iss;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct RunOptions {
    std::string data_path;
    std::string items_path;
    std::string corners_path;
    std::string out_dir = "out";
    std::string mode = "part1";
    double tau = 0.172;
    double alpha = 0.05;
    double kappa = 0.025;
    std::string parent_rule = "evidence";
    std::string coding_red_to_blue = "binary";
    std::string coding_blue_to_red = "frequency";
    bool tiering_enabled = false;
    std::map<std::string, int> tier_map;
    std::vector<double> tier_weights;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<int> n_values = {10000};
    std::vector<double> targets = {0.5};
    std::vector<std::string> shapes = {"main_effects"};
    std::vector<std::string> rules = {"nearest", "evidence"};
    int replications = 50;
    std::vector<int> ks = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    int top = 30;
};

// flat keys plus the tiering block; unknown keys are fatal
void apply_config_file(RunOptions& opt, const std::string& path) {
    json config;
    try {
        config = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    static const std::set<std::string> known = {
        "tau",     "alpha",        "kappa", "parent_rule", "coding_red_to_blue",
        "coding_blue_to_red",      "tiering", "seed",      "threads",
        "out_dir", "mode",         "n",     "targets",     "shapes",
        "rules",   "replications", "ks",    "top"};
    for (const auto& [key, value] : config.items()) {
        if (!known.count(key)) throw InputError("config file: unknown key '" + key + "'");
        (void)value;
    }
    if (config.contains("tau")) opt.tau = config["tau"].get<double>();
    if (config.contains("alpha")) opt.alpha = config["alpha"].get<double>();
    if (config.contains("kappa")) opt.kappa = config["kappa"].get<double>();
    if (config.contains("parent_rule")) opt.parent_rule = config["parent_rule"].get<std::string>();
    if (config.contains("coding_red_to_blue")) {
        opt.coding_red_to_blue = config["coding_red_to_blue"].get<std::string>();
    }
    if (config.contains("coding_blue_to_red")) {
        opt.coding_blue_to_red = config["coding_blue_to_red"].get<std::string>();
    }
    if (config.contains("seed")) opt.seed = config["seed"].get<std::uint64_t>();
    if (config.contains("threads")) opt.threads = config["threads"].get<int>();
    if (config.contains("out_dir")) opt.out_dir = config["out_dir"].get<std::string>();
    if (config.contains("mode")) opt.mode = config["mode"].get<std::string>();
    if (config.contains("n")) opt.n_values = config["n"].get<std::vector<int>>();
    if (config.contains("targets")) opt.targets = config["targets"].get<std::vector<double>>();
    if (config.contains("shapes")) opt.shapes = config["shapes"].get<std::vector<std::string>>();
    if (config.contains("rules")) opt.rules = config["rules"].get<std::vector<std::string>>();
    if (config.contains("replications")) opt.replications = config["replications"].get<int>();
    if (config.contains("ks")) opt.ks = config["ks"].get<std::vector<int>>();
    if (config.contains("top")) opt.top = config["top"].get<int>();
    if (config.contains("tiering")) {
        const auto& tiering = config["tiering"];
        static const std::set<std::string> tiering_known = {"enabled", "item_tiers",
                                                            "tier_weights"};
        for (const auto& [key, value] : tiering.items()) {
            if (!tiering_known.count(key)) {
                throw InputError("config file: unknown key 'tiering." + key + "'");
            }
            (void)value;
        }
        if (tiering.contains("enabled")) opt.tiering_enabled = tiering["enabled"].get<bool>();
        if (tiering.contains("item_tiers")) {
            opt.tier_map = tiering["item_tiers"].get<std::map<std::string, int>>();
        }
        if (tiering.contains("tier_weights")) {
            opt.tier_weights = tiering["tier_weights"].get<std::vector<double>>();
        }
    }
}

// ACE preset when the columns match it, a sidecar items file when given,
// integer level inference otherwise
std::vector<ItemSpec> resolve_items(const RawTable& raw, const std::string& items_path) {
    std::vector<std::string> data_cols;
    for (const auto& c : raw.columns) {
        if (c != "Y" && c != "PART") data_cols.push_back(c);
    }
    if (!items_path.empty()) {
        json spec;
        try {
            spec = json::parse(read_text_file(items_path));
        } catch (const json::exception& e) {
            throw DataError("items file: " + std::string(e.what()));
        }
        std::vector<ItemSpec> items;
        for (const auto& entry : spec) {
            ItemSpec item;
            item.name = entry.at("name").get<std::string>();
            item.n_levels = entry.at("levels").get<int>();
            item.reverse_coded = entry.value("reverse_coded", false);
            if (entry.contains("labels")) {
                item.level_labels = entry["labels"].get<std::vector<std::string>>();
            }
            items.push_back(std::move(item));
        }
        return items;
    }
    const auto preset = ace_item_preset();
    std::set<std::string> preset_names;
    for (const auto& it : preset) preset_names.insert(it.name);
    if (std::set<std::string>(data_cols.begin(), data_cols.end()) == preset_names) {
        std::vector<ItemSpec> items;
        for (const auto& col : data_cols) {
            for (const auto& it : preset) {
                if (it.name == col) items.push_back(it);
            }
        }
        return items;
    }
    // infer level counts from the observed integer values
    std::vector<ItemSpec> items;
    for (const auto& col : data_cols) {
        int col_idx = -1;
        for (std::size_t c = 0; c < raw.columns.size(); ++c) {
            if (raw.columns[c] == col) col_idx = static_cast<int>(c);
        }
        int max_level = 1;
        for (const auto& row : raw.cells) {
            const std::string& v = row[static_cast<std::size_t>(col_idx)];
            if (v.empty() || v == "NA") continue;
            try {
                max_level = std::max(max_level, std::stoi(v));
            } catch (...) {
                throw DataError("cannot infer levels for column " + col +
                                ": non-integer value '" + v + "' (provide --items)");
            }
        }
        items.push_back({col, max_level + 1, false, {}});
    }
    return items;
}

EncodeResult encode_or_die(const RawTable& raw, const std::vector<ItemSpec>& items,
                           Coding coding) {
    EncodeResult result = encode_dataset(raw, items, coding);
    if (!result.errors.empty()) {
        std::cerr << "input errors:\n";
        for (const auto& e : result.errors) {
            std::cerr << "  row " << e.row << ", column " << e.column << ": '" << e.value
                      << "'\n";
        }
        throw DataError(std::to_string(result.errors.size()) + " bad values in input");
    }
    return result;
}

json config_echo(const RunOptions& opt) {
    json tiering = {{"enabled", opt.tiering_enabled}};
    if (!opt.tier_map.empty()) tiering["item_tiers"] = opt.tier_map;
    if (!opt.tier_weights.empty()) tiering["tier_weights"] = opt.tier_weights;
    return {{"tau", opt.tau},
            {"alpha", opt.alpha},
            {"kappa", opt.kappa},
            {"parent_rule", opt.parent_rule},
            {"coding_red_to_blue", opt.coding_red_to_blue},
            {"coding_blue_to_red", opt.coding_blue_to_red},
            {"tiering", tiering},
            {"seed", opt.seed},
            {"threads", opt.threads},
            {"out_dir", opt.out_dir}};
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& config,
                    const json& inputs, const json& results) {
    const json manifest = {{"command", command},
                           {"version", kVersion},
                           {"config", config},
                           {"inputs", inputs},
                           {"results", results}};
    write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

json direction_summary(const DirectionResult& r) {
    const double grid_size = static_cast<double>(r.selection.grid().size());
    return {{"screened_candidates", r.screened.profiles.size()},
            {"rejected_pre_closure", r.rejected.size()},
            {"corners", r.selection.corners().size()},
            {"grid_coverage", r.grid_coverage},
            {"grid_coverage_pct", 100.0 * static_cast<double>(r.grid_coverage) / grid_size},
            {"flagged", r.flagged_count},
            {"flagged_pct", 100.0 * r.flagged_fraction}};
}

json set_summary(const UpwardClosedSet& set, std::int64_t flagged, double flagged_fraction) {
    const double grid_size = static_cast<double>(set.grid().size());
    const std::uint64_t coverage = set.closure_count();
    return {{"corners", set.corners().size()},
            {"grid_coverage", coverage},
            {"grid_coverage_pct", 100.0 * static_cast<double>(coverage) / grid_size},
            {"flagged", flagged},
            {"flagged_pct", 100.0 * flagged_fraction}};
}

void write_corner_files(const std::string& out_dir, const std::string& stem,
                        const UpwardClosedSet& set, const std::vector<ItemSpec>& items) {
    write_text_file(out_dir + "/" + stem + ".csv", corners_to_csv(set));
    write_text_file(out_dir + "/" + stem + ".json", corners_to_json(set, items).dump(2) + "\n");
}

json audit_json(const HypothesisSet& hyps, const RejectionResult& result) {
    json rounds = json::array();
    for (const auto& round : result.rounds) {
        json roots = json::array();
        for (std::size_t i = 0; i < round.roots.size(); ++i) {
            const auto root = static_cast<std::size_t>(round.roots[i]);
            roots.push_back({{"index", round.roots[i]},
                             {"profile", hyps.profiles[root].levels},
                             {"p_valid", hyps.p_valid.empty() ? json(nullptr)
                                                              : json(hyps.p_valid[root])},
                             {"budget", round.budgets[i]}});
        }
        rounds.push_back(
            {{"round", round.round}, {"roots", roots}, {"rejected", round.rejected}});
    }
    return {{"rounds", rounds}, {"rejected", result.rejected}};
}

int cmd_analyze(const RunOptions& opt) {
    const RawTable raw = read_csv(opt.data_path);
    if (std::find(raw.columns.begin(), raw.columns.end(), "PART") == raw.columns.end()) {
        throw InputError("analyze needs a PART column (red/blue)");
    }
    const auto items = resolve_items(raw, opt.items_path);
    const EncodeResult encoded = encode_or_die(raw, items, Coding::Frequency);

    EncodedDataset red, blue;
    red.grid = blue.grid = encoded.data.grid;
    red.part_label = "red";
    blue.part_label = "blue";
    for (std::size_t i = 0; i < encoded.data.rows.size(); ++i) {
        std::string part = encoded.parts[i];
        for (auto& ch : part) ch = static_cast<char>(std::tolower(ch));
        if (part == "red") {
            red.rows.push_back(encoded.data.rows[i]);
        } else if (part == "blue") {
            blue.rows.push_back(encoded.data.rows[i]);
        } else {
            throw DataError("row " + std::to_string(encoded.source_rows[i]) +
                            ": PART must be red or blue, got '" + encoded.parts[i] + "'");
        }
    }

    TurnoverConfig config;
    config.tau = opt.tau;
    config.alpha = opt.alpha;
    config.kappa = opt.kappa;
    config.alpha_red = opt.alpha / 2;
    config.alpha_blue = opt.alpha / 2;
    config.parent_rule = parent_rule_from_name(opt.parent_rule);
    config.coding_red_to_blue = coding_from_name(opt.coding_red_to_blue);
    config.coding_blue_to_red = coding_from_name(opt.coding_blue_to_red);
    config.seed = opt.seed;
    config.threads = opt.threads;
    if (opt.tiering_enabled) {
        TierConfig tiers;
        tiers.item_tiers = opt.tier_map;
        tiers.tier_weights = opt.tier_weights;
        config.tiering = tiers;
    }

    const TurnoverResult result = run_turnover(red, blue, config);

    fs::create_directories(opt.out_dir);
    write_corner_files(opt.out_dir, "corners_red_to_blue", result.red_to_blue.selection, items);
    write_corner_files(opt.out_dir, "corners_blue_to_red", result.blue_to_red.selection, items);
    write_corner_files(opt.out_dir, "corners_replicable", result.replicable, items);
    write_corner_files(opt.out_dir, "corners_global", result.global, items);
    write_text_file(opt.out_dir + "/audit_red_to_blue.json",
                    audit_json(result.red_to_blue.screened, result.red_to_blue.test).dump(2) +
                        "\n");
    write_text_file(opt.out_dir + "/audit_blue_to_red.json",
                    audit_json(result.blue_to_red.screened, result.blue_to_red.test).dump(2) +
                        "\n");

    const json inputs = {{"data", opt.data_path},
                         {"sha256", sha256_hex(read_text_file(opt.data_path))},
                         {"rows_used", encoded.data.rows.size()},
                         {"rows_dropped_missing", encoded.dropped_missing},
                         {"red_rows", red.rows.size()},
                         {"blue_rows", blue.rows.size()}};
    const json results = {
        {"red_to_blue", direction_summary(result.red_to_blue)},
        {"blue_to_red", direction_summary(result.blue_to_red)},
        {"replicable", set_summary(result.replicable, result.replicable_flagged,
                                   result.replicable_flagged_fraction)},
        {"global",
         set_summary(result.global, result.global_flagged, result.global_flagged_fraction)}};
    write_manifest(opt.out_dir, "analyze", config_echo(opt), inputs, results);
    std::cout << "analyze: wrote corner tables and manifest to " << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_simulate(const RunOptions& opt) {
    std::vector<SignalShape> shapes;
    for (const auto& s : opt.shapes) shapes.push_back(shape_from_name(s));

    std::vector<SimRow> rows;
    if (opt.mode == "part1") {
        Part1Grid grid;
        grid.n_values = opt.n_values;
        grid.target_masses = opt.targets;
        grid.shapes = shapes;
        grid.parent_rules.clear();
        for (const auto& r : opt.rules) grid.parent_rules.push_back(parent_rule_from_name(r));
        grid.replications = opt.replications;
        grid.alpha = opt.alpha;
        grid.seed0 = opt.seed;
        grid.threads = opt.threads;
        rows = run_part1(grid);
    } else if (opt.mode == "part2") {
        Part2Grid grid;
        grid.n_values = opt.n_values;
        grid.target_masses = opt.targets;
        grid.shapes = shapes;
        grid.replications = opt.replications;
        grid.alpha = opt.alpha;
        grid.seed0 = opt.seed;
        grid.threads = opt.threads;
        rows = run_part2(grid);
    } else if (opt.mode == "tiering") {
        TieringGrid grid;
        grid.n_values = opt.n_values;
        grid.target_masses = opt.targets;
        grid.shapes = shapes;
        grid.replications = opt.replications;
        grid.alpha = opt.alpha;
        grid.seed0 = opt.seed;
        grid.threads = opt.threads;
        rows = run_tiering_experiment(grid);
    } else {
        throw InputError("mode must be part1|part2|tiering, got '" + opt.mode + "'");
    }

    fs::create_directories(opt.out_dir);
    const std::string table = opt.out_dir + "/results_" + opt.mode + ".csv";
    write_sim_rows_csv(table, rows);
    const json inputs = {{"mode", opt.mode},
                         {"n", opt.n_values},
                         {"targets", opt.targets},
                         {"shapes", opt.shapes},
                         {"replications", opt.replications}};
    write_manifest(opt.out_dir, "simulate", config_echo(opt), inputs,
                   {{"rows", rows.size()}, {"table", table}});
    std::cout << "simulate: wrote " << rows.size() << " result rows to " << table << "\n";
    return kExitOk;
}

int cmd_evaluate(const RunOptions& opt) {
    const RawTable raw = read_csv(opt.data_path);
    const auto items = resolve_items(raw, opt.items_path);
    const EncodeResult encoded = encode_or_die(raw, items, Coding::Frequency);
    const UpwardClosedSet subgroup = read_corners_file(opt.corners_path);
    if (subgroup.grid() != encoded.data.grid) {
        throw DataError("corners file grid does not match the dataset items");
    }

    const auto reports = cutoff_sweep(encoded.data, opt.ks, subgroup);
    const auto comparison = matched_specificity_compare(reports);

    fs::create_directories(opt.out_dir);
    write_text_file(opt.out_dir + "/report.csv", screening_reports_to_csv(reports));
    const json cmp = {{"anchor", comparison.anchor_label},
                      {"matched", comparison.matched_label},
                      {"anchor_specificity", comparison.anchor_specificity},
                      {"matched_specificity", comparison.matched_specificity},
                      {"anchor_sensitivity", comparison.anchor_sensitivity},
                      {"matched_sensitivity", comparison.matched_sensitivity},
                      {"sensitivity_delta", comparison.sensitivity_delta},
                      {"relative_gain", comparison.relative_gain}};
    write_text_file(opt.out_dir + "/matched_compare.json", cmp.dump(2) + "\n");
    const json inputs = {{"data", opt.data_path},
                         {"sha256", sha256_hex(read_text_file(opt.data_path))},
                         {"corners", opt.corners_path},
                         {"rows_used", encoded.data.rows.size()}};
    write_manifest(opt.out_dir, "evaluate", config_echo(opt), inputs,
                   {{"rules", reports.size()}, {"matched_compare", cmp}});
    std::cout << "evaluate: wrote report.csv and matched_compare.json to " << opt.out_dir
              << "\n";
    return kExitOk;
}

int cmd_upset_data(const RunOptions& opt) {
    const RawTable raw = read_csv(opt.data_path);
    const auto items = resolve_items(raw, opt.items_path);
    const EncodeResult encoded = encode_or_die(raw, items, Coding::Binary);
    const EncodedDataset& data = encoded.data;

    std::map<std::vector<int>, std::int64_t> pattern_counts;
    std::vector<std::int64_t> marginals(static_cast<std::size_t>(data.grid.dims()), 0);
    for (const auto& row : data.rows) {
        ++pattern_counts[row.profile.levels];
        for (int j = 0; j < data.grid.dims(); ++j) {
            if (row.profile[j] >= 1) ++marginals[static_cast<std::size_t>(j)];
        }
    }
    std::vector<std::pair<std::vector<int>, std::int64_t>> sorted(pattern_counts.begin(),
                                                                  pattern_counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (opt.top > 0 && static_cast<int>(sorted.size()) > opt.top) {
        sorted.resize(static_cast<std::size_t>(opt.top));
    }

    fs::create_directories(opt.out_dir);
    std::string intersections = "rank,count";
    for (const auto& name : data.grid.item_names) intersections += "," + csv_escape(name);
    intersections += "\n";
    int rank = 1;
    for (const auto& [pattern, count] : sorted) {
        intersections += std::to_string(rank++) + "," + std::to_string(count);
        for (int v : pattern) intersections += "," + std::to_string(v);
        intersections += "\n";
    }
    write_text_file(opt.out_dir + "/upset_intersections.csv", intersections);

    std::string marginal_csv = "item,count\n";
    for (int j = 0; j < data.grid.dims(); ++j) {
        marginal_csv += csv_escape(data.grid.item_names[static_cast<std::size_t>(j)]) + "," +
                        std::to_string(marginals[static_cast<std::size_t>(j)]) + "\n";
    }
    write_text_file(opt.out_dir + "/upset_marginals.csv", marginal_csv);

    const json inputs = {{"data", opt.data_path},
                         {"sha256", sha256_hex(read_text_file(opt.data_path))},
                         {"rows_used", data.rows.size()},
                         {"top", opt.top}};
    write_manifest(opt.out_dir, "upset-data", config_echo(opt), inputs,
                   {{"distinct_combinations", pattern_counts.size()},
                    {"emitted", sorted.size()}});
    std::cout << "upset-data: wrote intersection and marginal tables to " << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_corners_count(const RunOptions& opt) {
    const UpwardClosedSet set = read_corners_file(opt.corners_path);
    const std::uint64_t count = set.closure_count();
    const std::uint64_t grid_size = set.grid().size();
    const json out = {
        {"corners", set.corners().size()},
        {"closure_count", count},
        {"grid_size", grid_size},
        {"percent", 100.0 * static_cast<double>(count) / static_cast<double>(grid_size)}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isotonic subgroup selection with data turnover"};
    app.require_subcommand(1);

    RunOptions opt;

    // config file values load first; explicit flags then override them
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") {
                apply_config_file(opt, argv[i + 1]);
            }
        }
    } catch (const InputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::string config_path_sink;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path_sink, "JSON config file");
        cmd->add_option("--out-dir", opt.out_dir, "output directory");
        cmd->add_option("--seed", opt.seed, "global seed");
        cmd->add_option("--threads", opt.threads, "worker cap (0 = auto)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "two-part turnover analysis of a CSV");
    analyze->add_option("--data", opt.data_path, "dataset CSV with item, Y, PART columns")
        ->required();
    analyze->add_option("--items", opt.items_path, "items JSON (optional)");
    analyze->add_option("--tau", opt.tau, "risk threshold");
    analyze->add_option("--alpha", opt.alpha, "family-wise error level");
    analyze->add_option("--kappa", opt.kappa, "screening cutoff");
    analyze->add_option("--parent-rule", opt.parent_rule, "nearest|evidence");
    analyze->add_option("--coding-red-to-blue", opt.coding_red_to_blue,
                        "binary|frequency|score");
    analyze->add_option("--coding-blue-to-red", opt.coding_blue_to_red,
                        "binary|frequency|score");
    add_common(analyze);

    CLI::App* simulate = app.add_subcommand("simulate", "seeded comparison experiments");
    simulate->add_option("--mode", opt.mode, "part1|part2|tiering");
    simulate->add_option("--n", opt.n_values, "sample sizes");
    simulate->add_option("--targets", opt.targets, "superlevel mass targets");
    simulate->add_option("--shapes", opt.shapes, "main_effects|interaction");
    simulate->add_option("--rules", opt.rules, "parent rules (part1)");
    simulate->add_option("--reps", opt.replications, "replications per cell");
    simulate->add_option("--alpha", opt.alpha, "family-wise error level");
    add_common(simulate);

    CLI::App* evaluate = app.add_subcommand("evaluate", "screening-rule metrics on a dataset");
    evaluate->add_option("--data", opt.data_path, "dataset CSV")->required();
    evaluate->add_option("--items", opt.items_path, "items JSON (optional)");
    evaluate->add_option("--corners", opt.corners_path, "subgroup corners JSON")->required();
    evaluate->add_option("--ks", opt.ks, "score cutoffs");
    add_common(evaluate);

    CLI::App* upset = app.add_subcommand("upset-data", "combination count tables");
    upset->add_option("--data", opt.data_path, "dataset CSV")->required();
    upset->add_option("--items", opt.items_path, "items JSON (optional)");
    upset->add_option("--top", opt.top, "how many combinations to keep");
    add_common(upset);

    CLI::App* count = app.add_subcommand("corners-count", "closure size of a corners file");
    count->add_option("--corners", opt.corners_path, "corners JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(opt);
        if (app.got_subcommand(upset)) return cmd_upset_data(opt);
        if (app.got_subcommand(count)) return cmd_corners_count(opt);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration error: " << e.what()
                  << " (max attainable mass: " << e.max_attainable << ")\n";
        return kExitNumeric;
    } catch (const UndefinedResultError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
