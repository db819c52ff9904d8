#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "clab/distances.hpp"
#include "clab/errors.hpp"
#include "clab/partition_tests.hpp"
#include "clab/runner.hpp"
#include "clab/scheduler.hpp"
#include "clab/simulation.hpp"

namespace py = pybind11;
using namespace clab;

namespace {

std::vector<FiniteMeasure> measures(const std::vector<std::vector<double>>& rows) {
    std::vector<FiniteMeasure> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r);
    return out;
}

py::object cell_to_py(const Cell& c) {
    return std::visit([](const auto& v) -> py::object { return py::cast(v); }, c);
}

py::dict output_to_py(const CommandOutput& out) {
    py::dict tables;
    for (const auto& t : out.tables) {
        py::list rows;
        for (const auto& row : t.rows) {
            py::list r;
            for (const auto& c : row) r.append(cell_to_py(c));
            rows.append(r);
        }
        py::dict d;
        d["columns"] = t.columns;
        d["rows"] = rows;
        d["csv"] = to_csv(t, out.manifest);
        tables[py::str(t.name)] = d;
    }
    py::dict documents;
    for (const auto& doc : out.documents) documents[py::str(doc.name)] = doc.text;
    py::dict result;
    result["exit_code"] = out.exit_code;
    result["summary"] = out.summary;
    result["manifest"] = manifest_json(out.manifest);
    result["tables"] = tables;
    result["documents"] = documents;
    return result;
}

py::dict run(const std::string& command, const std::string& scenario_text, std::uint64_t seed,
             std::optional<std::uint64_t> replications, unsigned workers,
             std::optional<std::filesystem::path> out, bool plots) {
    const Scenario scenario = parse_scenario(scenario_text);
    RunConfig config{seed, replications, workers, plots};
    CommandOutput output;
    {
        py::gil_scoped_release release;
        if (command == "distinguish") {
            output = run_distinguish(scenario, config);
        } else if (command == "bound") {
            output = run_bound(scenario, config);
        } else if (command == "simulate") {
            output = run_simulate(scenario, config);
        } else if (command == "schedule") {
            output = run_schedule(scenario, config);
        } else {
            throw ValidationError("unknown command '" + command + "'");
        }
        if (out) write_output(output, *out, plots);
    }
    return output_to_py(output);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Consistency lab core";
    m.attr("__version__") = version();

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<NumericError>(m, "NumericError", error);
    py::register_exception<ResourceError>(m, "ResourceError", error);
    py::register_exception<ConstructionError>(m, "ConstructionError", error);
    py::register_exception<DegenerateError>(m, "DegenerateError", error);

    m.def(
        "total_variation",
        [](const std::vector<double>& p, const std::vector<double>& q) {
            return total_variation(FiniteMeasure(p), FiniteMeasure(q));
        },
        py::arg("p"), py::arg("q"));

    m.def(
        "hull_variation",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            const auto r = hull_variation(measures(a), measures(b));
            py::dict d;
            d["value"] = r.value;
            d["mixture_p"] = r.mixture_p;
            d["mixture_q"] = r.mixture_q;
            return d;
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "kraft_bound",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            return kraft_bound(measures(a), measures(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "separation",
        [](std::vector<Vector> v0, std::vector<Vector> v1) {
            const auto r = separation(std::move(v0), std::move(v1));
            py::dict d;
            d["margin"] = r.margin;
            d["witness0"] = r.witness0;
            d["witness1"] = r.witness1;
            return d;
        },
        py::arg("v0"), py::arg("v1"));

    m.def(
        "chernoff",
        [](const std::vector<double>& p, const std::vector<double>& q) {
            return chernoff_information(FiniteMeasure(p), FiniteMeasure(q)).value;
        },
        py::arg("p"), py::arg("q"));

    m.def(
        "block_lengths", [](const std::vector<double>& exponents) { return block_lengths(exponents); },
        py::arg("exponents"));
    m.def(
        "tail_bound", [](std::size_t k, double c) { return tail_bound(k, c); }, py::arg("k"), py::arg("c"));
    m.def("poisson_atom_tail_bound", &poisson_atom_tail_bound, py::arg("lam"), py::arg("n"), py::arg("x"));

    m.def("scenario_hash", [](const std::string& text) { return parse_scenario(text).hash; }, py::arg("text"));

    m.def("run", &run, py::arg("command"), py::arg("scenario"), py::arg("seed") = 0,
          py::arg("replications") = py::none(), py::arg("workers") = 1, py::arg("out") = py::none(),
          py::arg("plots") = false);
}
