#include "clab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "clab/errors.hpp"
#include "clab/numeric.hpp"

namespace clab {

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return numeric::format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string comment_safe(std::string s) {
    for (std::size_t pos; (pos = s.find("--")) != std::string::npos;) s.replace(pos, 2, "- -");
    return s;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Roughly `count` round tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi, int count) {
    const double raw = (hi - lo) / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t == 0.0 ? 0.0 : t);
    return ticks;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string version() { return CLAB_VERSION; }

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw ValidationError("table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                              std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::string to_csv(const Table& table, const Manifest& m) {
    std::ostringstream out;
    out << "# command=" << m.command << " scenario=" << m.scenario << " scenario_hash=" << m.scenario_hash
        << " seed=" << m.seed << " replications=" << m.replications << " version=" << m.version << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
        out << '\n';
    }
    return out.str();
}

std::string manifest_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["scenario"] = m.scenario;
    j["scenario_hash"] = m.scenario_hash;
    j["seed"] = m.seed;
    j["replications"] = m.replications;
    j["version"] = m.version;
    return j.dump();
}

std::string to_svg(const Plot& plot, const Manifest& m) {
    constexpr double width = 640, height = 420;
    constexpr double left = 70, right = 170, top = 40, bottom = 55;
    const double pw = width - left - right, ph = height - top - bottom;

    auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0.0); };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    if (plot.log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    }
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<!-- " << comment_safe(manifest_json(m)) << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(plot.title) << "</text>\n";
    out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
        << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : linear_ticks(x0, x1, 6)) {
        const double x = px(t);
        out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top + ph) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(top + ph + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    const auto yticks = plot.log_y ? linear_ticks(y0, y1, std::max(1, std::min(8, static_cast<int>(y1 - y0))))
                                   : linear_ticks(y0, y1, 6);
    for (double t : yticks) {
        const double y = top + (1.0 - (t - y0) / (y1 - y0)) * ph;
        out << "<line x1=\"" << fixed(left - 5) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left) << "\" y2=\""
            << fixed(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
            << (plot.log_y ? "1e" + tick_label(t) : tick_label(t)) << "</text>\n";
    }
    out << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(height - 12) << "\" text-anchor=\"middle\">"
        << xml_escape(plot.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << xml_escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            out << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
            first = false;
        }
        out << "\"/>\n";
        const double ly = top + 12 + 16 * static_cast<double>(k);
        out << "<line x1=\"" << fixed(left + pw + 10) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(left + pw + 30)
            << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fixed(left + pw + 35) << "\" y=\"" << fixed(ly + 4) << "\">" << xml_escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& bytes) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ResourceError("cannot write '" + path.string() + "'");
}

}  // namespace clab
