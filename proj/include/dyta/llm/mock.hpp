#pragma once

#include "dyta/llm/backend.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

namespace dyta::llm {

enum class MockPolicy {
    scripted,        // fixed replies by request tag
    gt_first,        // ground truth ranked first
    gt_at,           // ground truth at a fixed rank
    position_picker, // candidates in page order
    utility,         // candidates by a hidden per-item utility
};

inline MockPolicy parse_mock_policy(const std::string& name)
{
    if (name == "scripted") return MockPolicy::scripted;
    if (name == "gt_first") return MockPolicy::gt_first;
    if (name == "gt_at") return MockPolicy::gt_at;
    if (name == "position_picker") return MockPolicy::position_picker;
    if (name == "utility") return MockPolicy::utility;
    throw ConfigError("unknown mock policy '" + name + "'");
}

inline const char* to_string(MockPolicy p)
{
    switch (p) {
    case MockPolicy::scripted: return "scripted";
    case MockPolicy::gt_first: return "gt_first";
    case MockPolicy::gt_at: return "gt_at";
    case MockPolicy::position_picker: return "position_picker";
    case MockPolicy::utility: return "utility";
    }
    return "?";
}

struct MockConfig {
    MockPolicy policy = MockPolicy::gt_first;
    int gt_position = 1;
    std::unordered_map<ItemId, double> utilities;
    /// Replies by tag. The only source under `scripted`; overrides the
    /// built-in defaults for non-ranking tags under every other policy.
    std::map<std::string, std::string> script;
    /// Transient failures (HTTP 503) returned before the first success.
    int fail_first = 0;
};

/// Deterministic stand-in for a chat model. Replies depend only on the
/// configuration and the request, except for the `fail_first` countdown.
class MockBackend final : public Backend {
public:
    explicit MockBackend(MockConfig config = {}) : config_(std::move(config)), remaining_failures_(config_.fail_first) {}

    [[nodiscard]] std::string id() const override { return std::string("mock:") + to_string(config_.policy); }

    BackendResult send(const ChatRequest& request) override
    {
        if (remaining_failures_.load() > 0 && remaining_failures_.fetch_sub(1) > 0) {
            return BackendFailure{FailureKind::transient, 503, "mock transient failure"};
        }
        if (config_.policy == MockPolicy::scripted) {
            const auto it = config_.script.find(request.tag);
            if (it == config_.script.end()) {
                return BackendFailure{FailureKind::fatal, 0, "no scripted reply for tag '" + request.tag + "'"};
            }
            return BackendReply{it->second};
        }
        if (const auto it = config_.script.find(request.tag); it != config_.script.end()) {
            return BackendReply{it->second};
        }
        if (!request.hints.page_order.empty()) {
            return BackendReply{format_ranking(rank(request.hints))};
        }
        return BackendReply{default_reply(request)};
    }

    [[nodiscard]] std::vector<ItemId> rank(const OracleHints& hints) const
    {
        std::vector<ItemId> order = hints.page_order;
        switch (config_.policy) {
        case MockPolicy::gt_first:
            place_ground_truth(order, hints, 1);
            break;
        case MockPolicy::gt_at:
            place_ground_truth(order, hints, config_.gt_position);
            break;
        case MockPolicy::utility:
            std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) { return utility(a) > utility(b); });
            break;
        case MockPolicy::position_picker:
        case MockPolicy::scripted:
            break;
        }
        return order;
    }

    static std::string format_ranking(const std::vector<ItemId>& order)
    {
        std::ostringstream out;
        for (std::size_t i = 0; i < order.size(); ++i) {
            out << (i ? ", " : "") << order[i];
        }
        return out.str();
    }

private:
    static void place_ground_truth(std::vector<ItemId>& order, const OracleHints& hints, int position)
    {
        if (!hints.ground_truth) {
            return;
        }
        const auto it = std::find(order.begin(), order.end(), *hints.ground_truth);
        if (it == order.end()) {
            return;
        }
        order.erase(it);
        const auto p = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(position, 1)) - 1, 0, order.size());
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(p), *hints.ground_truth);
    }

    [[nodiscard]] double utility(ItemId id) const
    {
        const auto it = config_.utilities.find(id);
        return it == config_.utilities.end() ? 0.0 : it->second;
    }

    static std::string default_reply(const ChatRequest& request)
    {
        const auto& tag = request.tag;
        if (tag == "act.rate") {
            const int rating = std::clamp(request.hints.rating_hint.value_or(3), 1, 5);
            return "Rating: " + std::to_string(rating) + "\nFeeling: It matched what I expected from it.";
        }
        if (tag == "tpe.detect") {
            return "sequential: yes\nclustering: yes\nclusters: recent viewing concentrates on a few genres";
        }
        if (tag == "tpe.cluster.analyze") {
            return "Recent interactions form a cluster around a few closely related genres.";
        }
        if (tag == "profile.short") {
            return "Recently watching a steady mix of familiar genres.";
        }
        if (tag == "memory.consolidate") {
            return "Rates films consistently and returns to favourite genres.";
        }
        return "Enjoys a broad range of films.";
    }

    MockConfig config_;
    std::atomic<int> remaining_failures_;
};

} // namespace dyta::llm
