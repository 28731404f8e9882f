#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "crids/aggregate.hpp"
#include "crids/fuzzify.hpp"
#include "crids/pipeline.hpp"
#include "crids/plan.hpp"
#include "crids/synthetic.hpp"

namespace py = pybind11;
using namespace crids;

namespace {

using ScoreDict = std::map<std::string, double>;

PerFactor<double> dense_scores(const ScoreDict& in) {
    auto out = MembershipVector::filled(1.0);
    for (const auto& [key, v] : in) {
        const auto f = parse_factor(key);
        if (!f) throw InvalidParameter("unknown factor: " + key);
        out[index_of(*f)] = v;
    }
    return out;
}

py::dict membership_dict(const MembershipVector& mv) {
    py::dict scores;
    for (const auto& fi : registry()) scores[py::str(std::string(fi.code))] = mv.score(fi.factor);
    py::dict d;
    d["scores"] = scores;
    d["resistivity"] = mv.resistivity;
    d["adaptability"] = mv.adaptability;
    d["recovery"] = mv.recovery;
    d["index"] = mv.index;
    return d;
}

py::dict plan_dict(const Plan& p) {
    py::dict d;
    d["sites"] = p.sites;
    d["assignment"] = p.assignment;
    d["per_site_cost"] = p.per_site_cost;
    d["per_site_index"] = p.per_site_index;
    d["total_cost"] = p.total_cost;
    d["objective"] = p.objective;
    d["status"] = p.status == PlanStatus::Optimal ? "optimal" : "infeasible";
    d["infeasible_sites"] = p.infeasible_sites;
    return d;
}

// Dense instance from n x m tables; option ids are 1..m and column 0 is do-nothing.
PlanningInstance make_instance(const std::vector<std::vector<double>>& cost,
                               const std::vector<std::vector<double>>& index,
                               const std::optional<std::vector<std::vector<bool>>>& feasible,
                               const std::vector<double>& thresholds) {
    const std::size_t n = cost.size();
    const std::size_t m = n ? cost.front().size() : 0;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    std::vector<OptionRef> options;
    for (std::size_t l = 0; l < m; ++l) options.push_back({static_cast<int>(l + 1), "option " + std::to_string(l + 1)});
    auto inst = PlanningInstance::blank(ids, options);
    if (index.size() != n || (feasible && feasible->size() != n)) throw InvalidParameter("table row counts differ");
    for (std::size_t i = 0; i < n; ++i) {
        if (cost[i].size() != m || index[i].size() != m || (feasible && (*feasible)[i].size() != m)) {
            throw InvalidParameter("table column counts differ");
        }
        for (std::size_t l = 0; l < m; ++l) {
            inst.cost[inst.at(i, l)] = cost[i][l];
            inst.index[inst.at(i, l)] = index[i][l];
            inst.feasible[inst.at(i, l)] = feasible ? (*feasible)[i][l] : 1;
        }
    }
    inst.thresholds = thresholds.empty() ? std::vector<double>(n, 0.0) : thresholds;
    inst.validate();
    return inst;
}

py::dict assessment_dict(const AssessmentResult& r) {
    py::list sites;
    for (const auto& s : r.sites) {
        py::dict d = s.ok() ? membership_dict(*s.membership) : py::dict();
        d["id"] = s.site.id;
        d["error"] = s.error;
        sites.append(d);
    }
    py::dict out;
    out["sites"] = sites;
    out["warnings"] = r.warnings;
    out["succeeded"] = r.succeeded();
    out["exit_status"] = r.exit_status();
    out["report"] = r.report;
    out["manifest"] = r.manifest;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core of the crids package";
    m.attr("__version__") = kToolVersion;
    py::register_exception<Error>(m, "CridsError", PyExc_ValueError);

    m.def("sigmoid", &sigmoid_membership, py::arg("x"), py::arg("f1"), py::arg("f2"));
    m.def("inverse_sigmoid", &inverse_sigmoid_membership, py::arg("x"), py::arg("f1"), py::arg("f2"));
    m.def("grade", &grade_membership, py::arg("x"), py::arg("x_min"), py::arg("x_max"));
    m.def("inverse_grade", &inverse_grade_membership, py::arg("x"), py::arg("x_min"), py::arg("x_max"));
    m.def("median", [](const std::vector<double>& v) { return median(v); }, py::arg("values"));
    m.def("cri_ds", &cri_ds, py::arg("resistivity"), py::arg("adaptability"), py::arg("recovery"));

    m.def("factors", [] {
        py::list out;
        for (const auto& fi : registry()) {
            out.append(py::make_tuple(std::string(fi.code), std::string(fi.name),
                                      std::string(to_string(fi.category))));
        }
        return out;
    }, "(code, name, category) for every factor in registry order");

    m.def("aggregate", [](const ScoreDict& scores) {
        MembershipVector mv;
        mv.scores = dense_scores(scores);
        aggregate(mv);
        return membership_dict(mv);
    }, py::arg("scores"), "Scores keyed by factor code or name; missing factors score 1. A4 is re-derived.");

    m.def("assess", [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir) {
        AssessmentResult r;
        {
            py::gil_scoped_release release;
            r = run_assess(load_config(config));
            if (out_dir) write_assessment(r, *out_dir);
        }
        return assessment_dict(r);
    }, py::arg("config"), py::arg("out_dir") = py::none());

    m.def("plan", [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir) {
        PlanResult r;
        {
            py::gil_scoped_release release;
            r = run_plan(load_config(config));
            if (out_dir) write_plan(r, *out_dir);
        }
        py::dict d = plan_dict(r.plan);
        d["exit_status"] = r.exit_status;
        d["message"] = r.message;
        d["errored_sites"] = r.errored_sites;
        py::list frontier;
        for (const auto& p : r.frontier) frontier.append(py::make_tuple(p.total_cost, p.total_index));
        d["frontier"] = frontier;
        return d;
    }, py::arg("config"), py::arg("out_dir") = py::none());

    m.def("solve_threshold", [](const std::vector<std::vector<double>>& cost,
                                const std::vector<std::vector<double>>& index, const std::vector<double>& thresholds,
                                std::optional<std::vector<std::vector<bool>>> feasible) {
        return plan_dict(min_cost_assignment(make_instance(cost, index, feasible, thresholds)));
    }, py::arg("cost"), py::arg("index"), py::arg("thresholds"), py::arg("feasible") = py::none(),
       "Cheapest option per site meeting its threshold. Column 0 is do-nothing.");

    m.def("solve_budget", [](const std::vector<std::vector<double>>& cost,
                             const std::vector<std::vector<double>>& index, double budget,
                             std::optional<std::vector<std::vector<bool>>> feasible, double quantum,
                             const std::string& objective) {
        BudgetOptions opts;
        opts.quantum = quantum;
        if (objective == "minimum") {
            opts.objective = ResilienceObjective::Minimum;
        } else if (objective != "sum") {
            throw InvalidParameter("objective must be 'sum' or 'minimum'");
        }
        return plan_dict(max_resilience_under_budget(make_instance(cost, index, feasible, {}), budget, opts));
    }, py::arg("cost"), py::arg("index"), py::arg("budget"), py::arg("feasible") = py::none(),
       py::arg("quantum") = 1.0, py::arg("objective") = "sum");

    m.def("summarize", [](const std::vector<double>& indices, const std::vector<double>& thresholds) {
        const auto s = summarize(indices, thresholds);
        py::dict d;
        d["total"] = s.total;
        py::list below;
        for (const auto& b : s.below) below.append(py::make_tuple(b.threshold, b.count, b.share));
        d["below"] = below;
        d["histogram"] = std::vector<std::size_t>(s.histogram.begin(), s.histogram.end());
        d["text"] = s.text();
        return d;
    }, py::arg("indices"), py::arg("thresholds") = std::vector<double>{0.1, 0.5});

    m.def("synth", [](const std::filesystem::path& out_dir, std::size_t sites_count, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.site_count = sites_count;
        spec.seed = seed;
        SyntheticFixture fx;
        {
            py::gil_scoped_release release;
            fx = write_synthetic_fixture(out_dir, spec);
        }
        return py::make_tuple(fx.config, fx.below_low, fx.below_high);
    }, py::arg("out_dir"), py::arg("sites_count") = 1000, py::arg("seed") = 42,
       "Writes a generated study; returns (config path, sites below 0.1, sites below 0.5).");
}
