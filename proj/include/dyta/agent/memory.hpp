#pragma once

#include "dyta/dataset/types.hpp"

#include <deque>
#include <string>
#include <vector>

namespace dyta::agent {

struct ShortTermMemory {
    data::Interaction interaction;
    std::string feeling;

    friend bool operator==(const ShortTermMemory&, const ShortTermMemory&) = default;
};

struct LongTermMemory {
    std::string summary;
    int round = 0;

    friend bool operator==(const LongTermMemory&, const LongTermMemory&) = default;
};

/// Two-tier memory: a bounded window of recent interactions with feelings, and
/// an append-only list of consolidated summaries.
class MemoryStore {
public:
    explicit MemoryStore(std::size_t short_term_capacity = 10) : capacity_(short_term_capacity) {}

    void remember(const data::Interaction& interaction)
    {
        short_term_.push_back({interaction, interaction.feeling.value_or("")});
        while (short_term_.size() > capacity_) {
            short_term_.pop_front();
        }
    }

    void append_summary(std::string summary, int round) { long_term_.push_back({std::move(summary), round}); }

    [[nodiscard]] const std::deque<ShortTermMemory>& short_term() const { return short_term_; }
    [[nodiscard]] const std::vector<LongTermMemory>& long_term() const { return long_term_; }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }

    /// Recency retrieval: long-term summaries newest first, then the most recent
    /// short-term entries, cut at `budget` characters. `describe` renders one
    /// interaction, feeling included.
    template <typename Describe>
    [[nodiscard]] std::string retrieve(std::size_t budget, Describe&& describe) const
    {
        std::vector<std::string> lines;
        for (auto it = long_term_.rbegin(); it != long_term_.rend(); ++it) {
            lines.push_back("- [pattern, round " + std::to_string(it->round) + "] " + it->summary);
        }
        for (auto it = short_term_.rbegin(); it != short_term_.rend(); ++it) {
            lines.push_back("- [recent] " + describe(it->interaction));
        }
        std::string out;
        for (const auto& l : lines) {
            if (out.size() + l.size() + 1 > budget) {
                break;
            }
            out += l;
            out += '\n';
        }
        return out.empty() ? std::string("(none)\n") : out;
    }

    friend bool operator==(const MemoryStore&, const MemoryStore&) = default;

private:
    std::size_t capacity_;
    std::deque<ShortTermMemory> short_term_;
    std::vector<LongTermMemory> long_term_;
};

} // namespace dyta::agent
