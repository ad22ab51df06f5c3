#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iss/coding.hpp"
#include "iss/dagtest.hpp"
#include "iss/lattice.hpp"
#include "iss/metrics.hpp"
#include "iss/pvalue.hpp"
#include "iss/simulation.hpp"
#include "iss/turnover.hpp"

namespace py = pybind11;
using namespace iss;

namespace {

Profile to_profile(const std::vector<int>& levels) { return Profile(levels); }

EncodedDataset make_dataset(const GridSpec& grid, const std::vector<std::vector<int>>& profiles,
                            const std::vector<int>& outcomes) {
    if (profiles.size() != outcomes.size()) {
        throw InputError("profiles and outcomes differ in length");
    }
    EncodedDataset data;
    data.grid = grid;
    data.rows.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        Profile p(profiles[i]);
        validate_profile(p, grid);
        data.rows.push_back({std::move(p), static_cast<std::uint8_t>(outcomes[i] != 0)});
    }
    return data;
}

std::vector<std::vector<int>> corner_lists(const UpwardClosedSet& set) {
    std::vector<std::vector<int>> out;
    for (const auto& c : set.corners()) out.push_back(c.levels);
    return out;
}

TurnoverConfig config_from_kwargs(double tau, double alpha, double kappa,
                                  const std::string& parent_rule,
                                  const std::string& coding_red_to_blue,
                                  const std::string& coding_blue_to_red, std::uint64_t seed,
                                  int threads) {
    TurnoverConfig config;
    config.tau = tau;
    config.alpha = alpha;
    config.kappa = kappa;
    config.alpha_red = alpha / 2;
    config.alpha_blue = alpha / 2;
    config.parent_rule = parent_rule_from_name(parent_rule);
    config.coding_red_to_blue = coding_from_name(coding_red_to_blue);
    config.coding_blue_to_red = coding_from_name(coding_blue_to_red);
    config.seed = seed;
    config.threads = threads;
    return config;
}

}  // namespace

PYBIND11_MODULE(isslib, m) {
    m.doc() = "isotonic subgroup selection on product lattices with data turnover";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<UndefinedResultError>(m, "UndefinedResultError", PyExc_ArithmeticError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_ArithmeticError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::vector<int>, std::vector<std::string>>(), py::arg("levels"),
             py::arg("item_names"))
        .def_readonly("levels", &GridSpec::levels)
        .def_readonly("item_names", &GridSpec::item_names)
        .def("size", &GridSpec::size)
        .def("dims", &GridSpec::dims);

    py::class_<UpwardClosedSet>(m, "UpwardClosedSet")
        .def_static(
            "from_corners",
            [](const GridSpec& grid, const std::vector<std::vector<int>>& corners) {
                std::vector<Profile> profiles;
                for (const auto& c : corners) profiles.emplace_back(c);
                return UpwardClosedSet::from_corners(grid, std::move(profiles));
            },
            py::arg("grid"), py::arg("corners"))
        .def_property_readonly("corners", &corner_lists)
        .def("contains",
             [](const UpwardClosedSet& set, const std::vector<int>& x) {
                 return set.contains(to_profile(x));
             })
        .def("closure_count", &UpwardClosedSet::closure_count)
        .def("grid", &UpwardClosedSet::grid);

    m.def(
        "leq",
        [](const std::vector<int>& a, const std::vector<int>& b, const GridSpec& grid) {
            return leq(to_profile(a), to_profile(b), grid);
        },
        py::arg("a"), py::arg("b"), py::arg("grid"));
    m.def("linf_distance", [](const std::vector<int>& a, const std::vector<int>& b) {
        return linf_distance(to_profile(a), to_profile(b));
    });
    m.def(
        "coarsen",
        [](const std::vector<int>& x, const GridSpec& freq_grid) {
            return coarsen(to_profile(x), freq_grid).levels;
        },
        py::arg("x"), py::arg("freq_grid"));
    m.def("ace_score",
          [](const std::vector<int>& x) { return ace_score(to_profile(x)); });
    m.def(
        "lift_membership",
        [](const UpwardClosedSet& binary_set, const std::vector<int>& x,
           const GridSpec& freq_grid) {
            return lift_membership(binary_set, to_profile(x), freq_grid);
        },
        py::arg("binary_set"), py::arg("x"), py::arg("freq_grid"));

    m.def("log_incomplete_beta", &log_incomplete_beta, py::arg("z"), py::arg("a"), py::arg("b"));
    m.def(
        "iss_pvalue",
        [](const std::vector<int>& responses, double tau) {
            std::vector<std::uint8_t> ys(responses.begin(), responses.end());
            const PValue p = iss_pvalue(ys, tau);
            return py::make_tuple(p.value, p.argmin_k);
        },
        py::arg("responses"), py::arg("tau"),
        "min-over-prefixes anytime-valid p-value of a response sequence");

    py::class_<EncodedDataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("grid"), py::arg("profiles"), py::arg("outcomes"))
        .def_property_readonly("n", [](const EncodedDataset& d) { return d.rows.size(); })
        .def_property_readonly("grid", [](const EncodedDataset& d) { return d.grid; });

    m.def(
        "iss_pvalue_at",
        [](const std::vector<int>& x, const EncodedDataset& data, double tau) {
            const PValue p = iss_pvalue(to_profile(x), data, tau);
            return py::make_tuple(p.value, p.argmin_k);
        },
        py::arg("x"), py::arg("data"), py::arg("tau"));

    m.def(
        "screen",
        [](const EncodedDataset& part, double tau, double kappa) {
            const HypothesisSet s = screen(part, tau, kappa);
            py::list out;
            for (std::size_t i = 0; i < s.profiles.size(); ++i) {
                out.append(py::make_tuple(s.profiles[i].levels, s.p_screen[i]));
            }
            return out;
        },
        py::arg("part"), py::arg("tau"), py::arg("kappa"));

    m.def(
        "run_iss",
        [](const EncodedDataset& data, double tau, double alpha, std::uint64_t seed) {
            const IssResult r = run_iss(data, tau, alpha, seed);
            return r.selection;
        },
        py::arg("data"), py::arg("tau"), py::arg("alpha"), py::arg("seed") = 0,
        "single-pass selection on one dataset (nearest-cover parenting)");

    m.def(
        "run_turnover",
        [](const EncodedDataset& red, const EncodedDataset& blue, double tau, double alpha,
           double kappa, const std::string& parent_rule, const std::string& coding_red_to_blue,
           const std::string& coding_blue_to_red, std::uint64_t seed, int threads) {
            const TurnoverConfig config =
                config_from_kwargs(tau, alpha, kappa, parent_rule, coding_red_to_blue,
                                   coding_blue_to_red, seed, threads);
            const TurnoverResult r = run_turnover(red, blue, config);
            py::dict out;
            out["red_to_blue_corners"] = corner_lists(r.red_to_blue.selection);
            out["blue_to_red_corners"] = corner_lists(r.blue_to_red.selection);
            out["replicable_corners"] = corner_lists(r.replicable);
            out["global_corners"] = corner_lists(r.global);
            out["replicable_coverage"] = r.replicable.closure_count();
            out["global_coverage"] = r.global.closure_count();
            out["replicable_flagged"] = r.replicable_flagged;
            out["global_flagged"] = r.global_flagged;
            out["screened_red"] = r.red_to_blue.screened.profiles.size();
            out["screened_blue"] = r.blue_to_red.screened.profiles.size();
            return out;
        },
        py::arg("red"), py::arg("blue"), py::arg("tau") = 0.172, py::arg("alpha") = 0.05,
        py::arg("kappa") = 0.025, py::arg("parent_rule") = "evidence",
        py::arg("coding_red_to_blue") = "binary", py::arg("coding_blue_to_red") = "frequency",
        py::arg("seed") = 0, py::arg("threads") = 0);

    m.def("replicable_set", &replicable_set, py::arg("freq_sel"), py::arg("bin_sel"));
    m.def("global_set", &global_set, py::arg("freq_sel"), py::arg("bin_sel"));
    m.def(
        "flag_fraction",
        [](const UpwardClosedSet& sel, const EncodedDataset& data) {
            const auto [count, fraction] = flag_fraction(sel, data);
            return py::make_tuple(count, fraction);
        },
        py::arg("selection"), py::arg("data"));

    m.def(
        "marginal_risk_ratio",
        [](int item, const EncodedDataset& data) {
            const RiskRatio rr = marginal_risk_ratio(item, data);
            return py::make_tuple(rr.value, rr.infinite);
        },
        py::arg("item"), py::arg("data"));
    m.def("conditional_dominance_test", &conditional_dominance_test, py::arg("i"), py::arg("j"),
          py::arg("data"));

    m.def("ace_grid", [](const std::string& coding) {
        return make_grid(ace_item_preset(), coding_from_name(coding));
    });
    m.def(
        "calibrate_scale",
        [](const std::string& shape, double target, double tau) {
            DgpConfig config = default_dgp(shape_from_name(shape), target);
            config.tau = tau;
            return calibrate_scale(config, tau, target);
        },
        py::arg("shape"), py::arg("target"), py::arg("tau") = 0.2);

    m.def(
        "evaluate_cutoffs",
        [](const EncodedDataset& data, const std::vector<int>& ks,
           const UpwardClosedSet& subgroup) {
            py::list out;
            for (const auto& r : cutoff_sweep(data, ks, subgroup)) {
                py::dict row;
                row["rule"] = r.label;
                row["ppr"] = r.ppr;
                row["sensitivity"] = r.sensitivity;
                row["specificity"] = r.specificity;
                row["ppv"] = r.ppv_defined ? py::object(py::float_(r.ppv)) : py::none();
                row["npv"] = r.npv_defined ? py::object(py::float_(r.npv)) : py::none();
                out.append(row);
            }
            return out;
        },
        py::arg("data"), py::arg("ks"), py::arg("subgroup"));

    m.attr("__version__") = "0.1.0";
}
