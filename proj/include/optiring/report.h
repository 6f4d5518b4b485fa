#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "optiring/analytics.h"
#include "optiring/rwa.h"
#include "optiring/simulator.h"

namespace optiring {

/// A cell is empty, an integer, a real or text. Empty cells render as an
/// empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, long long, double, std::string>;

/// Column-ordered result table shared by every CLI command.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// Header row then one line per row; reals use "%.12g", so output is
/// byte-stable for identical inputs.
void write_csv(std::ostream& out, const Table& table);
nlohmann::ordered_json to_json(const Table& table);

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& name);
void write_table(std::ostream& out, const Table& table, OutputFormat format);

/// Schedule document:
/// {algorithm, n, w, radices?, stages:[{steps:[{transfers:[
///     {src, dst, item, items, wavelength, direction, links:[[tail, head], ...]}]}]}]}
nlohmann::ordered_json schedule_to_json(const Schedule& schedule);

/// {algorithm, n, w, k, steps, stage_steps[], time_seconds, complete}
nlohmann::ordered_json metrics_to_json(const Metrics& metrics);
/// Same fields flattened; stage_steps joined with ';'.
Table metrics_table(const std::vector<Metrics>& metrics);

/// Columns algorithm,n,w,k,steps,time_seconds.
Table comparison_rows(const std::vector<TableRow>& rows);

}  // namespace optiring
