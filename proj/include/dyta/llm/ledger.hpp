#pragma once

#include "dyta/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dyta::llm {

struct LedgerEntry {
    std::string tag;
    std::string request_digest;
    std::string response_content;
    int attempts = 0;
    std::int64_t latency_ms = 0;
    std::optional<std::string> error;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

inline nlohmann::json to_json(const LedgerEntry& e)
{
    nlohmann::json j = {{"tag", e.tag},
                        {"request_digest", e.request_digest},
                        {"response_content", e.response_content},
                        {"attempts", e.attempts},
                        {"latency_ms", e.latency_ms}};
    if (e.error) {
        j["error"] = *e.error;
    }
    if (e.prompt_tokens > 0 || e.completion_tokens > 0) {
        j["usage"] = {{"prompt_tokens", e.prompt_tokens}, {"completion_tokens", e.completion_tokens}};
    }
    return j;
}

inline LedgerEntry ledger_entry_from_json(const nlohmann::json& j)
{
    LedgerEntry e;
    e.tag = j.at("tag").get<std::string>();
    e.request_digest = j.at("request_digest").get<std::string>();
    e.response_content = j.at("response_content").get<std::string>();
    e.attempts = j.at("attempts").get<int>();
    e.latency_ms = j.at("latency_ms").get<std::int64_t>();
    if (j.contains("error")) {
        e.error = j.at("error").get<std::string>();
    }
    return e;
}

/// Thread-safe call log, optionally mirrored to a JSON-lines file.
class Ledger {
public:
    Ledger() = default;
    explicit Ledger(const std::filesystem::path& file) { open(file); }

    void open(const std::filesystem::path& file)
    {
        std::lock_guard lock(mutex_);
        sink_.open(file, std::ios::out | std::ios::trunc);
        if (!sink_) {
            throw ConfigError("cannot write ledger file " + file.string());
        }
    }

    void append(LedgerEntry entry)
    {
        std::lock_guard lock(mutex_);
        if (sink_.is_open()) {
            sink_ << to_json(entry).dump() << '\n';
            sink_.flush();
        }
        entries_.push_back(std::move(entry));
    }

    [[nodiscard]] std::vector<LedgerEntry> entries() const
    {
        std::lock_guard lock(mutex_);
        return entries_;
    }

    [[nodiscard]] std::size_t count(const std::string& tag) const
    {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& e : entries_) {
            n += e.tag == tag ? 1 : 0;
        }
        return n;
    }

    [[nodiscard]] std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

    void clear()
    {
        std::lock_guard lock(mutex_);
        entries_.clear();
    }

private:
    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
    std::ofstream sink_;
};

inline std::vector<LedgerEntry> read_ledger(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot read ledger file " + file.string());
    }
    std::vector<LedgerEntry> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(ledger_entry_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(file.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

} // namespace dyta::llm
