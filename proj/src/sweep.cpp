#include <algorithm>

#include "usfd/csv.hpp"
#include "usfd/experiment.hpp"

namespace usfd {

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& axis,
                            const std::vector<std::string>& values)
{
    const auto keys = ExperimentConfig::keys();
    if (std::find(keys.begin(), keys.end(), axis) == keys.end() || axis == "schema_version") {
        throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
    }
    if (values.empty()) {
        throw std::invalid_argument("sweep: no values given");
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const auto& v : values) {
        ExperimentConfig point = cfg;
        point.set(axis, v);
        point.validate();
        rows.push_back({v, run_experiment(point).aggregate});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows)
{
    CsvWriter w(out);
    std::vector<std::string> header = {"axis", "value", "trials", "ok"};
    for (const auto& c : metric_columns()) {
        header.push_back(std::string(c.name) + "_mean");
        header.push_back(std::string(c.name) + "_std");
    }
    w.row(header);
    for (const auto& r : rows) {
        std::vector<std::string> row = {axis, r.value, std::to_string(r.aggregate.trials),
                                        std::to_string(r.aggregate.ok)};
        for (std::size_t c = 0; c < r.aggregate.mean.size(); ++c) {
            row.push_back(csv_number(r.aggregate.mean[c]));
            row.push_back(csv_number(r.aggregate.std[c]));
        }
        w.row(row);
    }
}

}  // namespace usfd
