#pragma once

#include "dyta/eval/harness.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dyta::eval {

inline nlohmann::json to_json(const Metrics& m)
{
    return {{"ndcg_at_5", m.ndcg_at_5}, {"ndcg_at_10", m.ndcg_at_10}, {"hr_at_3", m.hr_at_3}};
}

inline nlohmann::json to_json(const MetricReport& r)
{
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [rank, count] : run.ranks.histogram()) {
            hist[std::to_string(rank)] = count;
        }
        runs.push_back({{"seed", run.seed},
                        {"metrics", to_json(run.metrics)},
                        {"evaluated", run.evaluated},
                        {"failures", run.failures},
                        {"backend_failures", run.backend_failures},
                        {"fallbacks", run.fallbacks},
                        {"valid", run.valid},
                        {"gt_rank_histogram", hist}});
    }
    return {{"preset", r.preset},
            {"model", std::string(display_name(r.preset))},
            {"metrics", to_json(r.metrics)},
            {"runs", r.runs.size()},
            {"per_run", runs},
            {"user_count", r.user_count},
            {"failures", r.failures()},
            {"valid", r.valid},
            {"config_digest", r.config_digest},
            {"truncated_prompts", r.truncated_prompts}};
}

/// RFC 4180: fields with separators, quotes or line breaks are quoted and
/// embedded quotes doubled; records end in CRLF.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_) {
            throw ConfigError("cannot write " + path.string());
        }
    }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) {
                out_ << ',';
            }
            out_ << quote(fields[i]);
        }
        out_ << "\r\n";
    }

    static std::string quote(const std::string& field)
    {
        if (field.find_first_of(",\"\r\n") == std::string::npos) {
            return field;
        }
        std::string q = "\"";
        for (char c : field) {
            if (c == '"') {
                q += '"';
            }
            q += c;
        }
        q += '"';
        return q;
    }

private:
    std::ofstream out_;
};

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void write_table1(const std::filesystem::path& path, const std::vector<MetricReport>& reports)
{
    CsvWriter csv(path);
    csv.row({"preset", "model", "ndcg_at_5", "ndcg_at_10", "hr_at_3", "runs", "users", "failures", "valid"});
    for (const auto& r : reports) {
        csv.row({r.preset, std::string(display_name(r.preset)), num(r.metrics.ndcg_at_5), num(r.metrics.ndcg_at_10),
                 num(r.metrics.hr_at_3), std::to_string(r.runs.size()), std::to_string(r.user_count),
                 std::to_string(r.failures()), r.valid ? "true" : "false"});
    }
}

inline void write_rating_dist(const std::filesystem::path& path, const RatingAlignment& a)
{
    CsvWriter csv(path);
    csv.row({"source", "rating", "count", "probability"});
    auto emit = [&](const char* source, const RatingDistribution& d) {
        for (std::size_t i = 0; i < 5; ++i) {
            csv.row({source, std::to_string(i + 1), std::to_string(d.counts[i]), num(d.probability[i])});
        }
    };
    emit("ground_truth", a.ground_truth);
    emit("simulated", a.simulated);
}

inline void write_position_bias(const std::filesystem::path& path, const PositionBiasResult& r)
{
    CsvWriter csv(path);
    csv.row({"direct_prompting", "position", "hit_rate", "ndcg_at_5", "ndcg_at_10", "hr_at_3"});
    for (const auto& row : r.rows) {
        csv.row({row.direct_prompting ? "on" : "off", std::to_string(row.position), num(row.hit_rate),
                 num(row.metrics.ndcg_at_5), num(row.metrics.ndcg_at_10), num(row.metrics.hr_at_3)});
    }
}

inline void write_sweep(const std::filesystem::path& path, const std::vector<SweepCell>& cells, bool by_history)
{
    CsvWriter csv(path);
    csv.row({by_history ? "history_len" : "icl_k", "ndcg_at_5", "ndcg_at_10", "hr_at_3", "valid"});
    for (const auto& c : cells) {
        csv.row({by_history ? std::to_string(c.history_len) : std::to_string(c.icl_k), num(c.report.metrics.ndcg_at_5),
                 num(c.report.metrics.ndcg_at_10), num(c.report.metrics.hr_at_3), c.report.valid ? "true" : "false"});
    }
}

} // namespace dyta::eval
