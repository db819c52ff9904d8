#include "clab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "clab/distances.hpp"
#include "clab/errors.hpp"
#include "clab/numeric.hpp"
#include "clab/scenarios.hpp"

namespace clab {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t replications(const Scenario& s, const RunConfig& c) {
    if (c.replications) return *c.replications;
    return s.sim.replications.value_or(kDefaultReplications);
}

MonteCarlo monte_carlo(const Scenario& s, const RunConfig& c) {
    const auto reps = replications(s, c);
    if (reps == 0) throw ValidationError("replications must be positive");
    return {reps, c.seed, std::max(1u, c.workers)};
}

CommandOutput start(const std::string& command, const Scenario& s, const RunConfig& c) {
    CommandOutput out;
    out.manifest = {command, s.name, s.hash, c.seed, replications(s, c), version()};
    return out;
}

ojson manifest_object(const Manifest& m) { return ojson::parse(manifest_json(m)); }

ojson number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson vectors(const std::vector<Vector>& vs) {
    ojson out = ojson::array();
    for (const auto& v : vs) {
        ojson row = ojson::array();
        for (double x : v) row.push_back(x);
        out.push_back(row);
    }
    return out;
}

std::vector<FiniteMeasure> discretized(const std::vector<Model>& models, std::size_t grid) {
    std::vector<FiniteMeasure> out;
    for (const auto& m : models) {
        if (const auto* f = std::get_if<FiniteMeasure>(&m)) out.push_back(*f);
        else out.push_back(discretize(std::get<DensitySpec>(m), grid));
    }
    return out;
}

bool has_models(const Scenario& s) { return s.kind != ScenarioKind::poisson && s.kind != ScenarioKind::signal_detection; }

void add_mc_columns(std::vector<std::string>& cols, const std::string& prefix) {
    for (const char* suffix : {"", "_low", "_high", "_events"}) cols.push_back(prefix + suffix);
}

void add_mc_cells(std::vector<Cell>& row, const SimulationReport& r) {
    row.insert(row.end(), {r.estimate, r.ci_low, r.ci_high, r.events});
}

Cell optional_count(const std::optional<std::size_t>& v) {
    if (v) return static_cast<std::uint64_t>(*v);
    return std::string("none");
}

std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string role_name(Role r) { return r == Role::hypothesis ? "hypothesis" : "alternative"; }

double signal_margin(const Scenario& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : s.signals0) {
        for (const auto& b : s.signals1) {
            double d = 0.0;
            for (std::size_t j = 0; j < s.dimension; ++j) {
                const double x = j < a.size() ? a[j] : 0.0;
                const double y = j < b.size() ? b[j] : 0.0;
                d = std::max(d, std::abs(x - y));
            }
            best = std::min(best, d);
        }
    }
    return best;
}

// --- simulate, per kind ---------------------------------------------------------

void simulate_sine(const Scenario& s, CommandOutput& out) {
    const auto res = scenario_sine_indistinguishable(s.i_max, s.grid_size, s.partition);
    Table margins{"sine_margins", {"frequency", "margin_exact", "margin_discrete", "tv_exact", "tv_discrete"}, {}};
    Plot plot{"sine_margins", "Separation margin of uniform vs 1 + sin(2 pi i x)", "frequency i", "margin", false, {}};
    Series exact{"exact", {}, {}}, disc{"discretized", {}, {}};
    for (const auto& r : res.rows) {
        margins.add({std::int64_t{r.frequency}, r.margin_exact, r.margin_discrete, r.tv_exact, r.tv_discrete});
        exact.x.push_back(r.frequency);
        exact.y.push_back(r.margin_exact);
        disc.x.push_back(r.frequency);
        disc.y.push_back(r.margin_discrete);
    }
    plot.series = {exact, disc};
    Table hull{"sine_hull", {"i_max", "grid_size", "hull_variation_discrete", "kraft_bound_discrete"}, {}};
    hull.add({std::int64_t{s.i_max}, std::uint64_t{s.grid_size}, res.hull_variation_discrete, res.kraft_bound_discrete});
    out.tables = {margins, hull};
    out.plots = {plot};
    std::ostringstream text;
    text << "sine: " << res.rows.size() << " frequencies, hull variation (discretized) "
         << numeric::format_double(res.hull_variation_discrete) << '\n';
    out.summary = text.str();
}

void simulate_mazur(const Scenario& s, CommandOutput& out) {
    const auto rows = scenario_mazur_mixture(s.m_max, s.grid_size);
    Table t{"mazur",
            {"order", "tv_exact", "tv_discrete", "kraft_exact", "hull_variation_discrete", "hull_kraft_discrete"},
            {}};
    Series tv{"TV to Cesaro mixture", {}, {}}, hull{"hull variation", {}, {}};
    for (const auto& r : rows) {
        t.add({std::int64_t{r.order}, r.tv_exact, r.tv_discrete, r.kraft_exact, r.hull_variation_discrete,
               r.hull_kraft_discrete});
        tv.x.push_back(r.order);
        tv.y.push_back(r.tv_exact);
        hull.x.push_back(r.order);
        hull.y.push_back(r.hull_variation_discrete);
    }
    out.tables = {t};
    out.plots = {{"mazur", "Distance of uniform to mixtures of sine densities", "order m", "variation", false, {tv, hull}}};
    out.summary = "mazur: TV at m=1 " + numeric::format_double(rows.front().tv_exact) + ", at m=" +
                  std::to_string(rows.back().order) + " " + numeric::format_double(rows.back().tv_exact) + "\n";
}

void simulate_kolmogorov(const Scenario& s, const MonteCarlo& mc, CommandOutput& out) {
    const auto res = scenario_kolmogorov_family(s.u_list, s.sim.n_grid, s.grid_size, mc);
    Table dist{"kolmogorov_distances", {"u", "ks", "tv", "margin", "margin_discrete", "kraft"}, {}};
    for (const auto& r : res.rows) dist.add({r.u, r.ks, r.tv, r.margin, r.margin_discrete, r.kraft});
    std::vector<std::string> cols{"u", "n", "alpha_exact", "beta_exact", "total_exact"};
    add_mc_columns(cols, "alpha_mc");
    add_mc_columns(cols, "beta_mc");
    cols.push_back("total_mc");
    Table err{"kolmogorov_errors", cols, {}};
    Plot plot{"kolmogorov_errors", "Exact alpha + beta of the half-split frequency test", "n", "alpha + beta", true, {}};
    for (const auto& r : res.errors) {
        std::vector<Cell> row{r.u, std::uint64_t{r.n}, r.alpha_exact, r.beta_exact, r.alpha_exact + r.beta_exact};
        add_mc_cells(row, r.alpha_mc);
        add_mc_cells(row, r.beta_mc);
        row.push_back(r.alpha_mc.estimate + r.beta_mc.estimate);
        err.add(std::move(row));
        const std::string label = "u = " + short_number(r.u);
        if (plot.series.empty() || plot.series.back().label != label) plot.series.push_back({label, {}, {}});
        plot.series.back().x.push_back(static_cast<double>(r.n));
        plot.series.back().y.push_back(r.alpha_exact + r.beta_exact);
    }
    out.tables = {dist, err};
    out.plots = {plot};
    out.summary = "kolmogorov: " + std::to_string(res.rows.size()) + " values of u, " +
                  std::to_string(res.errors.size()) + " error rows\n";
}

void simulate_pair(const Scenario& s, const MonteCarlo& mc, CommandOutput& out) {
    const auto res = scenario_model_pair(s.hypothesis, s.alternative(), s.partition, s.sim.n_grid, s.grid_size, mc);
    Table sum{"pair_summary",
              {"margin", "witness0", "witness1", "hull_variation", "kraft_bound", "chernoff", "chernoff_status",
               "certified_onset"},
              {}};
    const char* status = res.exponent.status == ExponentStatus::finite    ? "finite"
                         : res.exponent.status == ExponentStatus::perfect ? "perfect"
                                                                          : "degenerate";
    sum.add({res.separation.margin, std::uint64_t{res.separation.witness0}, std::uint64_t{res.separation.witness1},
             res.hull_variation, res.kraft_bound, res.exponent.value, std::string(status), optional_count(res.onset)});
    std::vector<std::string> cols{"n", "alpha_exact", "beta_exact", "total_exact"};
    add_mc_columns(cols, "alpha_mc");
    add_mc_columns(cols, "beta_mc");
    cols.push_back("total_mc");
    Table err{"pair_errors", cols, {}};
    Series exact{"exact", {}, {}}, sim{"Monte Carlo", {}, {}};
    for (const auto& r : res.errors) {
        std::vector<Cell> row{std::uint64_t{r.n}, r.alpha_exact, r.beta_exact, r.alpha_exact + r.beta_exact};
        add_mc_cells(row, r.alpha_mc);
        add_mc_cells(row, r.beta_mc);
        row.push_back(r.alpha_mc.estimate + r.beta_mc.estimate);
        err.add(std::move(row));
        exact.x.push_back(static_cast<double>(r.n));
        exact.y.push_back(r.alpha_exact + r.beta_exact);
        sim.x.push_back(static_cast<double>(r.n));
        sim.y.push_back(r.alpha_mc.estimate + r.beta_mc.estimate);
    }
    out.tables = {sum, err};
    out.plots = {{"pair_errors", "Worst-case alpha + beta of the frequency test", "n", "alpha + beta", true,
                  {exact, sim}}};
    out.summary = "pair: margin " + numeric::format_double(res.separation.margin) + ", Kraft bound " +
                  numeric::format_double(res.kraft_bound) + "\n";
}

void simulate_signal(const Scenario& s, const MonteCarlo& mc, CommandOutput& out) {
    const auto res = scenario_signal_detection(s.signals0, s.signals1, s.dimension, s.sim.epsilon_list, mc);
    Table sum{"signal_summary", {"dimension", "margin", "half_margin_dimension"}, {}};
    sum.add({std::uint64_t{s.dimension}, res.margin, std::uint64_t{res.half_margin_dimension}});
    std::vector<std::string> cols{"epsilon", "error_exact", "error_mc"};
    add_mc_columns(cols, "alpha_mc");
    add_mc_columns(cols, "beta_mc");
    Table err{"signal_errors", cols, {}};
    Series exact{"exact", {}, {}}, sim{"Monte Carlo", {}, {}};
    for (const auto& r : res.rows) {
        std::vector<Cell> row{r.epsilon, r.error_exact, r.error_mc};
        add_mc_cells(row, r.alpha_mc);
        add_mc_cells(row, r.beta_mc);
        err.add(std::move(row));
        exact.x.push_back(r.epsilon);
        exact.y.push_back(r.error_exact);
        sim.x.push_back(r.epsilon);
        sim.y.push_back(r.error_mc);
    }
    Table proj{"signal_projection", {"m", "margin"}, {}};
    for (const auto& p : res.projection) proj.add({std::uint64_t{p.m}, p.margin});
    out.tables = {sum, err, proj};
    out.plots = {{"signal_errors", "Linear-functional test error", "noise level epsilon", "alpha + beta", true,
                  {exact, sim}}};
    out.summary = "signal detection: margin " + numeric::format_double(res.margin) + "\n";
}

void simulate_poisson(const Scenario& s, const MonteCarlo& mc, CommandOutput& out) {
    const auto res = scenario_poisson(*s.poisson0, *s.poisson1, s.sim.n_grid, mc);
    Table sum{"poisson_summary", {"lambda0", "lambda1", "shape_margin"}, {}};
    sum.add({s.poisson0->lambda, s.poisson1->lambda, res.shape_margin});
    std::vector<std::string> cols{"n", "threshold", "count_bound", "alpha_exact", "beta_exact"};
    add_mc_columns(cols, "alpha_mc");
    add_mc_columns(cols, "beta_mc");
    add_mc_columns(cols, "count_tail_mc");
    Table err{"poisson_errors", cols, {}};
    Series exact{"exact", {}, {}}, sim{"Monte Carlo", {}, {}};
    for (const auto& r : res.rows) {
        std::vector<Cell> row{std::uint64_t{r.n}, r.threshold, r.count_bound, r.alpha_exact, r.beta_exact};
        add_mc_cells(row, r.alpha_mc);
        add_mc_cells(row, r.beta_mc);
        add_mc_cells(row, r.count_tail_mc);
        err.add(std::move(row));
        exact.x.push_back(static_cast<double>(r.n));
        exact.y.push_back(r.alpha_exact + r.beta_exact);
        sim.x.push_back(static_cast<double>(r.n));
        sim.y.push_back(r.alpha_mc.estimate + r.beta_mc.estimate);
    }
    out.tables = {sum, err};
    out.plots = {{"poisson_errors", "Count and shape test for Poisson processes", "n", "alpha + beta", true,
                  {exact, sim}}};
    out.summary = "poisson: shape margin " + numeric::format_double(res.shape_margin) + "\n";
}

NestedConfig nested_config(const Scenario& s) {
    if (!has_models(s)) throw ValidationError("schedule needs finite or density models");
    return {s.hypothesis, s.pieces, s.partition, s.exponents, s.onsets, s.sim.n_max, s.sim.k_grid, 0.01};
}

void schedule_into(const Scenario& s, const MonteCarlo& mc, CommandOutput& out) {
    const auto res = scenario_nested_alternatives(nested_config(s), mc);
    const auto& sch = res.schedule;

    ojson doc;
    doc["manifest"] = manifest_object(out.manifest);
    doc["n_max"] = sch.n_max();
    ojson pieces = ojson::array();
    for (std::size_t i = 0; i < res.pieces.size(); ++i) {
        pieces.push_back({{"label", "piece" + std::to_string(i + 1)},
                          {"margin", res.pieces[i].margin},
                          {"witness0", res.pieces[i].witness0},
                          {"witness1", res.pieces[i].witness1}});
    }
    doc["pieces"] = pieces;
    ojson families = ojson::array();
    for (std::size_t i = 0; i < sch.family().size(); ++i) {
        const auto& f = sch.family()[i];
        families.push_back({{"index", i},
                            {"label", f.label()},
                            {"exponent", f.exponent()},
                            {"onset", f.onset()},
                            {"alpha_scale", f.alpha_scale()},
                            {"beta_scale", f.beta_scale()}});
    }
    doc["families"] = families;
    ojson blocks = ojson::array();
    for (const auto& b : sch.blocks()) {
        blocks.push_back({{"start", b.start},
                          {"end", b.end},
                          {"family", b.family},
                          {"exponent", b.exponent},
                          {"bound_at_start", number(b.bound_at_start)}});
    }
    doc["blocks"] = blocks;
    out.documents.push_back({"schedule.json", doc.dump(2) + "\n"});

    Table curve{"discernibility",
                {"member", "role", "piece", "k", "fraction", "erring_paths", "replications", "tail_bound"},
                {}};
    Table members{"members", {"member", "role", "piece", "k_star", "fraction_after_k_star"}, {}};
    Plot plot{"discernibility", "Paths erring after k", "k", "fraction of paths", false, {}};
    for (const auto& m : res.curves) {
        Series series{m.member, {}, {}};
        for (std::size_t i = 0; i < m.curve.k.size(); ++i) {
            curve.add({m.member, role_name(m.role), std::uint64_t{m.piece + (m.role == Role::alternative ? 1u : 0u)},
                       std::uint64_t{m.curve.k[i]}, m.curve.fraction[i], m.curve.erring_paths[i],
                       m.curve.replications, m.tail[i]});
            series.x.push_back(static_cast<double>(m.curve.k[i]));
            series.y.push_back(m.curve.fraction[i]);
        }
        members.add({m.member, role_name(m.role), std::uint64_t{m.piece + (m.role == Role::alternative ? 1u : 0u)},
                     optional_count(m.k_star), m.fraction_after_k_star});
        plot.series.push_back(std::move(series));
    }
    Table chain{"chain", {"block", "start", "tail", "chain"}, {}};
    for (const auto& c : res.chain) chain.add({std::uint64_t{c.block}, std::uint64_t{c.start}, c.tail, c.chain});
    out.tables = {curve, members, chain};
    out.plots = {plot};
    std::ostringstream text;
    text << "schedule: " << sch.blocks().size() << " blocks up to n = " << sch.n_max() << '\n';
    for (const auto& m : res.curves) {
        text << "  " << m.member << ": k* = "
             << (m.k_star ? std::to_string(*m.k_star) : std::string("none"))
             << ", fraction erring after k* = " << numeric::format_double(m.fraction_after_k_star) << '\n';
    }
    out.summary = text.str();
}

}  // namespace

CommandOutput run_distinguish(const Scenario& s, const RunConfig& c) {
    auto out = start("distinguish", s, c);
    ojson doc;
    doc["manifest"] = manifest_object(out.manifest);
    std::ostringstream text;
    double margin = 0.0;
    if (s.kind == ScenarioKind::poisson) {
        const auto& a = s.poisson0->shape;
        const auto& b = s.poisson1->shape;
        const auto rep = separation({Vector(a.weights().begin(), a.weights().end())},
                                    {Vector(b.weights().begin(), b.weights().end())});
        const double gap = std::abs(s.poisson0->lambda - s.poisson1->lambda);
        margin = std::max(rep.margin, gap);
        Table t{"separation", {"shape_margin", "lambda_gap"}, {}};
        t.add({rep.margin, gap});
        out.tables = {t};
        doc["shape_margin"] = rep.margin;
        doc["lambda_gap"] = gap;
        text << "shape margin = " << numeric::format_double(rep.margin) << '\n'
             << "lambda gap = " << numeric::format_double(gap) << '\n';
    } else if (s.kind == ScenarioKind::signal_detection) {
        margin = signal_margin(s);
        Table t{"separation", {"margin"}, {}};
        t.add({margin});
        out.tables = {t};
        doc["margin"] = margin;
        text << "margin = " << numeric::format_double(margin) << '\n';
    } else {
        const auto alt = s.alternative();
        const auto rep = separation(s.hypothesis, alt, s.partition);
        const auto a = discretized(s.hypothesis, s.grid_size);
        const auto b = discretized(alt, s.grid_size);
        const double hv = hull_variation(a, b).value;
        margin = rep.margin;
        Table t{"separation",
                {"margin", "witness0", "witness0_model", "witness1", "witness1_model", "hull_variation", "kraft_bound"},
                {}};
        t.add({rep.margin, std::uint64_t{rep.witness0}, model_label(s.hypothesis[rep.witness0]),
               std::uint64_t{rep.witness1}, model_label(alt[rep.witness1]), hv, 1.0 - hv});
        out.tables = {t};
        doc["partition"] = s.partition.label();
        doc["margin"] = rep.margin;
        doc["witness0"] = rep.witness0;
        doc["witness1"] = rep.witness1;
        doc["hypothesis_vectors"] = vectors(rep.v0);
        doc["alternative_vectors"] = vectors(rep.v1);
        doc["kraft_bound"] = 1.0 - hv;
        text << "partition: " << s.partition.label() << '\n'
             << "margin = " << numeric::format_double(rep.margin) << '\n'
             << "witnesses: " << model_label(s.hypothesis[rep.witness0]) << " vs " << model_label(alt[rep.witness1])
             << '\n'
             << "kraft bound = " << numeric::format_double(1.0 - hv) << '\n';
    }
    const bool separated = margin > kMarginTolerance;
    doc["verdict"] = separated ? "separated" : "indistinguishable";
    text << "verdict: " << (separated ? "separated" : "indistinguishable on this partition") << '\n';
    out.documents.push_back({"distinguish.json", doc.dump(2) + "\n"});
    out.summary = text.str();
    out.exit_code = separated ? 0 : 2;
    return out;
}

CommandOutput run_bound(const Scenario& s, const RunConfig& c) {
    if (!has_models(s)) throw ValidationError("bound needs finite or density models");
    auto out = start("bound", s, c);
    const auto alt = s.alternative();
    const auto a = discretized(s.hypothesis, s.grid_size);
    const auto b = discretized(alt, s.grid_size);
    const auto hv = hull_variation(a, b);
    Table t{"bound", {"hull_variation", "kraft_bound", "lp_iterations"}, {}};
    t.add({hv.value, 1.0 - hv.value, std::uint64_t{hv.lp_iterations}});
    Table mix{"mixtures", {"side", "index", "model", "weight"}, {}};
    for (std::size_t i = 0; i < hv.mixture_p.size(); ++i) {
        mix.add({std::string("hypothesis"), std::uint64_t{i}, model_label(s.hypothesis[i]), hv.mixture_p[i]});
    }
    for (std::size_t i = 0; i < hv.mixture_q.size(); ++i) {
        mix.add({std::string("alternative"), std::uint64_t{i}, model_label(alt[i]), hv.mixture_q[i]});
    }
    out.tables = {t, mix};
    std::ostringstream text;
    text << "hull variation = " << numeric::format_double(hv.value) << '\n'
         << "kraft bound = " << numeric::format_double(1.0 - hv.value) << '\n';
    for (const auto& row : mix.rows) {
        const double w = std::get<double>(row[3]);
        if (w > 0.0) {
            text << "  " << std::get<std::string>(row[0]) << ' ' << std::get<std::string>(row[2]) << ": "
                 << numeric::format_double(w) << '\n';
        }
    }
    out.summary = text.str();
    return out;
}

CommandOutput run_simulate(const Scenario& s, const RunConfig& c) {
    auto out = start("simulate", s, c);
    const auto mc = monte_carlo(s, c);
    switch (s.kind) {
    case ScenarioKind::sine: simulate_sine(s, out); break;
    case ScenarioKind::mazur: simulate_mazur(s, out); break;
    case ScenarioKind::kolmogorov: simulate_kolmogorov(s, mc, out); break;
    case ScenarioKind::finite_pair:
    case ScenarioKind::density_pair: simulate_pair(s, mc, out); break;
    case ScenarioKind::nested: schedule_into(s, mc, out); break;
    case ScenarioKind::poisson: simulate_poisson(s, mc, out); break;
    case ScenarioKind::signal_detection: simulate_signal(s, mc, out); break;
    }
    ojson doc;
    doc["manifest"] = manifest_object(out.manifest);
    doc["kind"] = kind_name(s.kind);
    ojson files = ojson::array();
    for (const auto& t : out.tables) files.push_back(t.name + ".csv");
    for (const auto& d : out.documents) files.push_back(d.name);
    doc["files"] = files;
    out.documents.push_back({"manifest.json", doc.dump(2) + "\n"});
    return out;
}

CommandOutput run_schedule(const Scenario& s, const RunConfig& c) {
    auto out = start("schedule", s, c);
    schedule_into(s, monte_carlo(s, c), out);
    return out;
}

std::vector<std::string> write_output(const CommandOutput& output, const std::filesystem::path& dir, bool plots) {
    std::vector<std::string> names;
    for (const auto& t : output.tables) {
        write_file(dir, t.name + ".csv", to_csv(t, output.manifest));
        names.push_back(t.name + ".csv");
    }
    for (const auto& d : output.documents) {
        write_file(dir, d.name, d.text);
        names.push_back(d.name);
    }
    if (plots) {
        for (const auto& p : output.plots) {
            write_file(dir, p.name + ".svg", to_svg(p, output.manifest));
            names.push_back(p.name + ".svg");
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace clab
