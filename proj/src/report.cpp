#include "optiring/report.h"

#include <cstdio>
#include <ostream>

#include "optiring/error.h"

namespace optiring {

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(const std::string& v) const {
            if (v.find_first_of(",\"\n") == std::string::npos) return v;
            std::string quoted = "\"";
            for (char c : v) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            return quoted + "\"";
        }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json json_value(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(long long v) const { return v; }
        nlohmann::ordered_json operator()(double v) const { return v; }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

}  // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw Error(ErrorKind::InvalidConfig, "row width does not match table columns");
    }
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table) {
    for (size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << '\n';
    }
}

nlohmann::ordered_json to_json(const Table& table) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_value(row[i]);
        out.push_back(std::move(obj));
    }
    return out;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw Error(ErrorKind::InvalidConfig, "unknown format '" + name + "' (csv|json)");
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_csv(out, table);
    } else {
        out << to_json(table).dump(2) << '\n';
    }
}

nlohmann::ordered_json schedule_to_json(const Schedule& schedule) {
    nlohmann::ordered_json doc;
    doc["algorithm"] = std::string(to_string(schedule.algorithm));
    doc["n"] = schedule.n;
    doc["w"] = schedule.w;
    if (!schedule.radices.empty()) doc["radices"] = schedule.radices;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& stage : schedule.stages) {
        auto steps = nlohmann::ordered_json::array();
        for (const auto& step : stage.steps) {
            auto transfers = nlohmann::ordered_json::array();
            for (const auto& a : step.assignments) {
                const auto& d = a.demand;
                nlohmann::ordered_json t;
                t["src"] = d.src;
                t["dst"] = d.dst;
                t["item"] = d.items.empty() ? nlohmann::ordered_json(nullptr)
                                            : nlohmann::ordered_json(d.items.front());
                t["items"] = d.items;
                t["wavelength"] = a.wavelength;
                t["direction"] = std::string(to_string(d.path.direction));
                auto links = nlohmann::ordered_json::array();
                for (int i = 0; i < d.path.hops; ++i) {
                    const NodeId tail = d.path.hop_tail(i);
                    const NodeId head = d.path.hop_tail(i + 1);
                    links.push_back({tail, head});
                }
                t["links"] = std::move(links);
                transfers.push_back(std::move(t));
            }
            steps.push_back({{"transfers", std::move(transfers)}});
        }
        stages.push_back({{"steps", std::move(steps)}});
    }
    doc["stages"] = std::move(stages);
    return doc;
}

nlohmann::ordered_json metrics_to_json(const Metrics& metrics) {
    nlohmann::ordered_json doc;
    doc["algorithm"] = std::string(to_string(metrics.algorithm));
    doc["n"] = metrics.n;
    doc["w"] = metrics.w;
    doc["k"] = metrics.k ? nlohmann::ordered_json(*metrics.k) : nlohmann::ordered_json(nullptr);
    doc["steps"] = metrics.total_steps;
    doc["stage_steps"] = metrics.per_stage_steps;
    doc["time_seconds"] = metrics.total_time_seconds;
    doc["complete"] = metrics.complete;
    return doc;
}

Table metrics_table(const std::vector<Metrics>& metrics) {
    Table table;
    table.columns = {"algorithm", "n", "w", "k", "steps", "stage_steps", "time_seconds", "complete"};
    for (const auto& m : metrics) {
        std::string stages;
        for (size_t i = 0; i < m.per_stage_steps.size(); ++i) {
            stages += (i ? ";" : "") + std::to_string(m.per_stage_steps[i]);
        }
        table.add({std::string(to_string(m.algorithm)), static_cast<long long>(m.n),
                   static_cast<long long>(m.w),
                   m.k ? Cell{static_cast<long long>(*m.k)} : Cell{}, static_cast<long long>(m.total_steps),
                   stages, m.total_time_seconds, std::string(m.complete ? "true" : "false")});
    }
    return table;
}

Table comparison_rows(const std::vector<TableRow>& rows) {
    Table table;
    table.columns = {"algorithm", "n", "w", "k", "steps", "time_seconds"};
    for (const auto& r : rows) {
        table.add({r.algorithm, static_cast<long long>(r.n), static_cast<long long>(r.w),
                   r.k ? Cell{static_cast<long long>(*r.k)} : Cell{}, r.steps, r.time_seconds});
    }
    return table;
}

}  // namespace optiring
