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
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "recurlab/common.hpp"

namespace recurlab {

/// What produced an output file: recorded verbatim in its header. The
/// timestamp is the only non-reproducible field and lives on its own
/// header line so data sections stay byte-comparable.
struct Manifest {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    uint64_t master_seed = 0;
    std::string version = kVersion;
    std::string timestamp;

    static std::string now_utc();
};

/// Columnar results. Cells are preformatted strings; numeric helpers
/// format deterministically and reject NaN (failures are typed strings,
/// never NaN cells).
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

std::string format_double(double v);
std::string format_count(uint64_t v);

enum class EmitFormat { Csv, Json, SvgHistogram };

EmitFormat emit_format_from_string(const std::string &name);

/// Write the table with its manifest header. Formats: csv, json, or an
/// SVG bar chart (expects label,count columns). Same manifest fields
/// and table produce byte-identical data sections.
void emit(const ResultTable &table, const Manifest &manifest,
          EmitFormat format, const std::string &path);

/// File content with timestamp header lines removed; what determinism
/// is judged on.
std::string data_bytes(const std::string &path);

/// Render the table as aligned text for stdout.
std::string render_text(const ResultTable &table);

} // namespace recurlab
