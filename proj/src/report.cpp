// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "recurlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "recurlab/serialize.hpp"

namespace recurlab {

std::string Manifest::now_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ResultTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size()) {
        throw InvalidArgumentError("ResultTable: row width mismatch");
    }
    rows.push_back(std::move(cells));
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        throw InvalidArgumentError(
            "ResultTable cells must not be NaN; report failures as strings");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_count(uint64_t v) { return std::to_string(v); }

EmitFormat emit_format_from_string(const std::string &name) {
    if (name == "csv") {
        return EmitFormat::Csv;
    }
    if (name == "json") {
        return EmitFormat::Json;
    }
    if (name == "svg-histogram") {
        return EmitFormat::SvgHistogram;
    }
    throw InvalidArgumentError("unknown output format: " + name);
}

namespace {

std::string manifest_header_lines(const Manifest &m, const char *prefix) {
    std::ostringstream out;
    out << prefix << "tool: recurlab " << m.version << '\n';
    out << prefix << "subcommand: " << m.subcommand << '\n';
    out << prefix << "seed: " << m.master_seed << '\n';
    for (const auto &[key, value] : m.flags) {
        out << prefix << "flag " << key << ": " << value << '\n';
    }
    out << prefix << "timestamp: " << m.timestamp << '\n';
    return out.str();
}

std::string csv_escape(const std::string &cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        return cell;
    }
    std::string quoted = "\"";
    for (char c : cell) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string emit_csv(const ResultTable &table, const Manifest &manifest) {
    std::ostringstream out;
    out << manifest_header_lines(manifest, "# ");
    for (size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << csv_escape(table.columns[c]);
    }
    out << '\n';
    for (const auto &row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << csv_escape(row[c]);
        }
        out << '\n';
    }
    return out.str();
}

std::string emit_json(const ResultTable &table, const Manifest &manifest) {
    Json doc;
    doc["manifest"] = {{"tool", "recurlab"},
                       {"version", manifest.version},
                       {"subcommand", manifest.subcommand},
                       {"seed", manifest.master_seed},
                       {"flags", manifest.flags},
                       {"timestamp", manifest.timestamp}};
    doc["columns"] = table.columns;
    doc["rows"] = table.rows;
    // Indented so the timestamp occupies its own line and data bytes
    // stay comparable across runs.
    return doc.dump(2) + "\n";
}

std::string emit_svg(const ResultTable &table, const Manifest &manifest) {
    if (table.columns.size() != 2) {
        throw InvalidArgumentError(
            "svg-histogram wants exactly two columns (label, count)");
    }
    uint64_t max_count = 1;
    std::vector<uint64_t> counts;
    counts.reserve(table.rows.size());
    for (const auto &row : table.rows) {
        const uint64_t c = std::stoull(row[1]);
        counts.push_back(c);
        max_count = std::max(max_count, c);
    }
    const int bar = 18;
    const int gap = 4;
    const int plot_h = 240;
    const int label_h = 24;
    const int width =
        std::max<int>(80, static_cast<int>(table.rows.size()) * (bar + gap) +
                              gap);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n"
        << manifest_header_lines(manifest, "") << "-->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << plot_h + label_h << "\">\n";
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const int h = static_cast<int>(
            static_cast<double>(counts[i]) / static_cast<double>(max_count) *
            plot_h);
        const int x = gap + static_cast<int>(i) * (bar + gap);
        out << "  <rect x=\"" << x << "\" y=\"" << plot_h - h << "\" width=\""
            << bar << "\" height=\"" << h << "\" fill=\"#4477aa\" data-label=\""
            << table.rows[i][0] << "\" data-count=\"" << counts[i]
            << "\"/>\n";
        out << "  <text x=\"" << x << "\" y=\"" << plot_h + 16
            << "\" font-size=\"10\">" << table.rows[i][0] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace

void emit(const ResultTable &table, const Manifest &manifest,
          EmitFormat format, const std::string &path) {
    std::string content;
    switch (format) {
    case EmitFormat::Csv:
        content = emit_csv(table, manifest);
        break;
    case EmitFormat::Json:
        content = emit_json(table, manifest);
        break;
    case EmitFormat::SvgHistogram:
        content = emit_svg(table, manifest);
        break;
    }
    write_text_file(path, content);
}

std::string data_bytes(const std::string &path) {
    std::istringstream in(read_text_file(path));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("timestamp") != std::string::npos) {
            continue;
        }
        out << line << '\n';
    }
    return out.str();
}

std::string render_text(const ResultTable &table) {
    std::vector<size_t> width(table.columns.size());
    for (size_t c = 0; c < table.columns.size(); ++c) {
        width[c] = table.columns[c].size();
    }
    for (const auto &row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string> &cells) {
        for (size_t c = 0; c < cells.size(); ++c) {
            out << (c ? "  " : "") << cells[c]
                << std::string(width[c] - cells[c].size(), ' ');
        }
        out << '\n';
    };
    line(table.columns);
    for (const auto &row : table.rows) {
        line(row);
    }
    return out.str();
}

} // namespace recurlab
