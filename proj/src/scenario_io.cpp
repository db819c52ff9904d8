#include "clab/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

#include "clab/errors.hpp"

namespace clab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError("scenario: " + where + ": " + what);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(where, "unknown key '" + key + "'");
    }
}

const json& require_object(const json& v, const std::string& where) {
    if (!v.is_object()) fail(where, "expected an object");
    return v;
}

const json& require_array(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    return v;
}

double as_double(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(where, "expected a nonnegative integer");
}

int as_int(const json& v, const std::string& where) {
    const auto n = as_count(v, where);
    if (n > 1000000) fail(where, "value too large");
    return static_cast<int>(n);
}

std::vector<double> as_doubles(const json& v, const std::string& where) {
    std::vector<double> out;
    for (std::size_t i = 0; i < require_array(v, where).size(); ++i) {
        out.push_back(as_double(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::size_t> as_counts(const json& v, const std::string& where) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < require_array(v, where).size(); ++i) {
        out.push_back(as_count(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

// Library validation errors are re-raised with the JSON location attached.
template <class F>
auto located(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        fail(where, e.what());
    }
}

FiniteMeasure parse_finite(const json& v, const std::string& where) {
    if (v.is_object()) {
        check_keys(v, {"weights"}, where);
        if (!v.contains("weights")) fail(where, "missing 'weights'");
        return parse_finite(v["weights"], where + ".weights");
    }
    auto w = as_doubles(v, where);
    return located(where, [&] { return FiniteMeasure(std::move(w)); });
}

DensitySpec parse_density(const json& v, const std::string& where) {
    if (v.is_string()) {
        if (v.get<std::string>() == "uniform") return DensitySpec::uniform();
        fail(where, "only 'uniform' may be given as a bare string");
    }
    require_object(v, where);
    check_keys(v, {"density", "frequency", "order", "u"}, where);
    if (!v.contains("density") || !v["density"].is_string()) fail(where, "missing string 'density'");
    const auto kind = v["density"].get<std::string>();
    auto param = [&](const char* key) -> const json& {
        if (!v.contains(key)) fail(where, "density '" + kind + "' needs '" + key + "'");
        return v[key];
    };
    return located(where, [&] {
        if (kind == "uniform") return DensitySpec::uniform();
        if (kind == "one_plus_sine") return DensitySpec::one_plus_sine(as_int(param("frequency"), where + ".frequency"));
        if (kind == "cesaro_mixture") return DensitySpec::cesaro_mixture(as_int(param("order"), where + ".order"));
        if (kind == "pu_family") return DensitySpec::pu_family(as_double(param("u"), where + ".u"));
        fail(where, "unknown density '" + kind + "'");
    });
}

Model parse_model(const json& v, bool density, const std::string& where) {
    if (density) return parse_density(v, where);
    return parse_finite(v, where);
}

PoissonModel parse_poisson(const json& v, const std::string& where) {
    require_object(v, where);
    check_keys(v, {"lambda", "shape"}, where);
    if (!v.contains("lambda") || !v.contains("shape")) fail(where, "poisson models need 'lambda' and 'shape'");
    const double lambda = as_double(v["lambda"], where + ".lambda");
    auto shape = parse_finite(v["shape"], where + ".shape");
    return located(where, [&] { return PoissonModel(lambda, std::move(shape)); });
}

Partition parse_partition(const json& v, bool density, std::size_t alphabet, const std::string& where) {
    require_object(v, where);
    check_keys(v, {"cells"}, where);
    if (!v.contains("cells")) fail(where, "missing 'cells'");
    const auto& cells = require_array(v["cells"], where + ".cells");
    if (density) {
        std::vector<std::pair<double, double>> iv;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto pair = as_doubles(cells[i], where + ".cells[" + std::to_string(i) + "]");
            if (pair.size() != 2) fail(where, "interval cells are [left, right] pairs");
            iv.emplace_back(pair[0], pair[1]);
        }
        std::sort(iv.begin(), iv.end());
        std::vector<double> breaks;
        for (std::size_t i = 0; i < iv.size(); ++i) {
            if (i == 0) breaks.push_back(iv[i].first);
            else if (iv[i].first != iv[i - 1].second) fail(where, "interval cells must be contiguous");
            breaks.push_back(iv[i].second);
        }
        return located(where, [&] { return Partition::intervals(std::move(breaks)); });
    }
    std::vector<std::vector<std::size_t>> atoms;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        atoms.push_back(as_counts(cells[i], where + ".cells[" + std::to_string(i) + "]"));
    }
    return located(where, [&] { return Partition::atoms(std::move(atoms), alphabet); });
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void parse_sim(const json& v, SimSettings& sim) {
    require_object(v, "sim");
    check_keys(v, {"replications", "n_grid", "k_grid", "epsilon_list", "n_max"}, "sim");
    if (v.contains("replications")) {
        sim.replications = as_count(v["replications"], "sim.replications");
        if (*sim.replications == 0) fail("sim.replications", "must be positive");
    }
    if (v.contains("n_grid")) sim.n_grid = as_counts(v["n_grid"], "sim.n_grid");
    if (v.contains("k_grid")) sim.k_grid = as_counts(v["k_grid"], "sim.k_grid");
    if (v.contains("epsilon_list")) sim.epsilon_list = as_doubles(v["epsilon_list"], "sim.epsilon_list");
    if (v.contains("n_max")) sim.n_max = as_count(v["n_max"], "sim.n_max");
    for (std::size_t n : sim.n_grid) {
        if (n == 0) fail("sim.n_grid", "sample sizes must be positive");
    }
    for (double e : sim.epsilon_list) {
        if (!(e > 0.0)) fail("sim.epsilon_list", "noise levels must be positive");
    }
    if (sim.n_max == 0) fail("sim.n_max", "must be positive");
}

void parse_finite_or_density(const json& doc, const json& model, Scenario& s) {
    const bool density = model["type"] == "density";
    std::string family;
    if (density) {
        check_keys(model, {"type", "family", "grid_size", "i_max", "m_max", "u_list"}, "model");
        if (model.contains("family")) {
            if (!model["family"].is_string()) fail("model.family", "expected a string");
            family = model["family"].get<std::string>();
            if (family != "sine" && family != "mazur" && family != "kolmogorov") {
                fail("model.family", "unknown family '" + family + "'");
            }
        }
        if (model.contains("grid_size")) {
            s.grid_size = as_count(model["grid_size"], "model.grid_size");
            if (s.grid_size < 2 || s.grid_size > 4096) fail("model.grid_size", "must lie in [2, 4096]");
        }
        if (model.contains("i_max")) s.i_max = as_int(model["i_max"], "model.i_max");
        if (model.contains("m_max")) s.m_max = as_int(model["m_max"], "model.m_max");
        if (model.contains("u_list")) s.u_list = as_doubles(model["u_list"], "model.u_list");
    } else {
        check_keys(model, {"type"}, "model");
    }

    if (doc.contains("hypothesis")) {
        const auto& h = require_array(doc["hypothesis"], "hypothesis");
        for (std::size_t i = 0; i < h.size(); ++i) {
            s.hypothesis.push_back(parse_model(h[i], density, "hypothesis[" + std::to_string(i) + "]"));
        }
    }
    if (doc.contains("alternative")) {
        const auto& a = require_array(doc["alternative"], "alternative");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string where = "alternative[" + std::to_string(i) + "]";
            if (a[i].is_object() && a[i].contains("piece")) {
                check_keys(a[i], {"piece"}, where);
                const auto& p = require_array(a[i]["piece"], where + ".piece");
                if (p.empty()) fail(where, "empty piece");
                std::vector<Model> piece;
                for (std::size_t j = 0; j < p.size(); ++j) {
                    piece.push_back(parse_model(p[j], density, where + ".piece[" + std::to_string(j) + "]"));
                }
                s.pieces.push_back(std::move(piece));
            } else {
                s.pieces.push_back({parse_model(a[i], density, where)});
            }
        }
    }

    if (family == "sine") {
        s.kind = ScenarioKind::sine;
        if (s.i_max == 0) {
            for (const auto& m : s.alternative()) {
                const auto& d = std::get<DensitySpec>(m);
                if (d.kind() == DensityKind::one_plus_sine) s.i_max = std::max(s.i_max, d.index());
            }
        }
        if (s.i_max < 1) fail("model.i_max", "sine family needs i_max >= 1");
        if (s.pieces.empty()) {
            for (int i = 1; i <= s.i_max; ++i) s.pieces.push_back({DensitySpec::one_plus_sine(i)});
        }
    } else if (family == "mazur") {
        s.kind = ScenarioKind::mazur;
        if (s.m_max < 1) fail("model.m_max", "mazur family needs m_max >= 1");
        if (s.pieces.empty()) {
            for (int i = 1; i <= s.m_max; ++i) s.pieces.push_back({DensitySpec::one_plus_sine(i)});
        }
    } else if (family == "kolmogorov") {
        s.kind = ScenarioKind::kolmogorov;
        if (s.u_list.empty()) fail("model.u_list", "kolmogorov family needs a nonempty u_list");
        for (double u : s.u_list) {
            if (!(u >= 0.0 && u < 1.0)) fail("model.u_list", "every u must lie in [0, 1)");
        }
        if (s.pieces.empty()) {
            for (double u : s.u_list) s.pieces.push_back({DensitySpec::pu_family(u)});
        }
    } else {
        s.kind = doc.contains("schedule") ? ScenarioKind::nested
                 : density                ? ScenarioKind::density_pair
                                          : ScenarioKind::finite_pair;
    }
    if (!family.empty() && doc.contains("schedule")) fail("schedule", "not supported for density families");
    if (!family.empty() && s.hypothesis.empty()) s.hypothesis.push_back(DensitySpec::uniform());
    if (s.hypothesis.empty()) fail("hypothesis", "at least one model is required");
    if (s.pieces.empty()) fail("alternative", "at least one model is required");

    std::size_t alphabet = 0;
    if (!density) {
        alphabet = std::get<FiniteMeasure>(s.hypothesis.front()).size();
        auto same = [&](const Model& m) { return std::get<FiniteMeasure>(m).size() == alphabet; };
        const auto alt = s.alternative();
        if (!std::all_of(s.hypothesis.begin(), s.hypothesis.end(), same) || !std::all_of(alt.begin(), alt.end(), same)) {
            fail("model", "all finite models must share one alphabet size");
        }
        if (alphabet < 2) fail("model", "alphabet size must be at least 2");
    }
    if (doc.contains("partition")) {
        s.partition = parse_partition(doc["partition"], density, alphabet, "partition");
    } else {
        s.partition = density ? Partition::half_split() : Partition::identity(alphabet);
    }

    if (doc.contains("schedule")) {
        const auto& sch = require_object(doc["schedule"], "schedule");
        check_keys(sch, {"exponents", "onsets"}, "schedule");
        if (sch.contains("exponents")) s.exponents = as_doubles(sch["exponents"], "schedule.exponents");
        if (sch.contains("onsets")) s.onsets = as_counts(sch["onsets"], "schedule.onsets");
        for (double c : s.exponents) {
            if (!(c > 0.0) || !std::isfinite(c)) fail("schedule.exponents", "exponents must be positive and finite");
        }
        if (!s.exponents.empty() && s.exponents.size() != s.pieces.size()) {
            fail("schedule.exponents", "need one exponent per alternative piece");
        }
        if (!s.onsets.empty() && s.onsets.size() != s.pieces.size()) {
            fail("schedule.onsets", "need one onset per alternative piece");
        }
    }
}

}  // namespace

std::string_view kind_name(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::finite_pair: return "finite_pair";
    case ScenarioKind::density_pair: return "density_pair";
    case ScenarioKind::sine: return "sine";
    case ScenarioKind::mazur: return "mazur";
    case ScenarioKind::kolmogorov: return "kolmogorov";
    case ScenarioKind::nested: return "nested";
    case ScenarioKind::poisson: return "poisson";
    case ScenarioKind::signal_detection: return "signal_detection";
    }
    return "unknown";
}

std::vector<Model> Scenario::alternative() const {
    std::vector<Model> out;
    for (const auto& p : pieces) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string detail = e.what();
        if (const auto pos = detail.find(": ", detail.find("column")); pos != std::string::npos) {
            detail = detail.substr(pos + 2);
        }
        throw ValidationError("scenario: malformed JSON at line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ": " + detail);
    }
    require_object(doc, "document");
    check_keys(doc, {"name", "hypothesis", "alternative", "model", "partition", "schedule", "sim"}, "document");

    Scenario s;
    s.hash = fnv1a_hex(doc.dump());
    if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
        fail("name", "a nonempty string is required");
    }
    s.name = doc["name"].get<std::string>();
    if (!doc.contains("model")) fail("model", "missing");
    const auto& model = require_object(doc["model"], "model");
    if (!model.contains("type") || !model["type"].is_string()) fail("model.type", "missing string");
    const auto type = model["type"].get<std::string>();

    if (doc.contains("sim")) parse_sim(doc["sim"], s.sim);

    if (type == "finite" || type == "density") {
        parse_finite_or_density(doc, model, s);
    } else if (type == "poisson" || type == "gaussian_sequence") {
        for (const char* key : {"partition", "schedule"}) {
            if (doc.contains(key)) fail(key, "not supported for model type '" + type + "'");
        }
        if (!doc.contains("hypothesis") || !doc.contains("alternative")) {
            fail("document", "'hypothesis' and 'alternative' are required");
        }
        const auto& h = require_array(doc["hypothesis"], "hypothesis");
        const auto& a = require_array(doc["alternative"], "alternative");
        if (type == "poisson") {
            check_keys(model, {"type"}, "model");
            s.kind = ScenarioKind::poisson;
            if (h.size() != 1 || a.size() != 1) fail("document", "poisson scenarios take one model per side");
            s.poisson0 = parse_poisson(h[0], "hypothesis[0]");
            s.poisson1 = parse_poisson(a[0], "alternative[0]");
            if (s.poisson0->shape.size() != s.poisson1->shape.size()) fail("alternative[0].shape", "size mismatch");
        } else {
            check_keys(model, {"type", "d"}, "model");
            s.kind = ScenarioKind::signal_detection;
            for (std::size_t i = 0; i < h.size(); ++i) {
                s.signals0.push_back(as_doubles(h[i], "hypothesis[" + std::to_string(i) + "]"));
            }
            for (std::size_t i = 0; i < a.size(); ++i) {
                s.signals1.push_back(as_doubles(a[i], "alternative[" + std::to_string(i) + "]"));
            }
            if (s.signals0.empty() || s.signals1.empty()) fail("document", "signal sets must be nonempty");
            std::size_t longest = 0;
            for (const auto* set : {&s.signals0, &s.signals1}) {
                for (const auto& sig : *set) {
                    longest = std::max(longest, sig.size());
                    for (double x : sig) {
                        if (!std::isfinite(x)) fail("document", "signal entries must be finite");
                    }
                }
            }
            s.dimension = model.contains("d") ? as_count(model["d"], "model.d") : longest;
            if (s.dimension == 0 || s.dimension < longest) fail("model.d", "must cover every signal and be positive");
            if (s.sim.epsilon_list.empty()) s.sim.epsilon_list = {1.0, 0.5, 0.2, 0.1};
        }
    } else {
        fail("model.type", "unknown type '" + type + "'");
    }
    if (s.sim.n_grid.empty()) s.sim.n_grid = {16, 32, 64, 128, 256};
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace clab
