#pragma once

#include "dyta/agent/agent.hpp"

#include <nlohmann/json.hpp>

namespace dyta::agent {

namespace detail {

inline nlohmann::json interaction_json(const Interaction& i)
{
    nlohmann::json j = {{"item_id", i.item_id}, {"rating", i.rating}, {"timestamp", i.timestamp}};
    if (i.feeling) {
        j["feeling"] = *i.feeling;
    }
    return j;
}

inline Interaction interaction_from(const nlohmann::json& j)
{
    Interaction i;
    i.item_id = j.at("item_id").get<ItemId>();
    i.rating = j.at("rating").get<int>();
    i.timestamp = j.at("timestamp").get<std::int64_t>();
    if (j.contains("feeling")) {
        i.feeling = j.at("feeling").get<std::string>();
    }
    return i;
}

} // namespace detail

/// Inspection / resume document for one agent.
inline nlohmann::json snapshot(const AgentState& s)
{
    const auto& lt = s.long_term;
    nlohmann::json stm = nlohmann::json::array();
    for (const auto& m : s.memory.short_term()) {
        stm.push_back({{"interaction", detail::interaction_json(m.interaction)}, {"feeling", m.feeling}});
    }
    nlohmann::json ltm = nlohmann::json::array();
    for (const auto& m : s.memory.long_term()) {
        ltm.push_back({{"summary", m.summary}, {"round", m.round}});
    }
    nlohmann::json window = nlohmann::json::array();
    for (const auto& i : s.history_window) {
        window.push_back(detail::interaction_json(i));
    }
    return {
        {"user_id", s.user_id},
        {"round", s.round},
        {"history_len", s.history_len},
        {"long_term",
         {{"demographics",
           {{"user_id", lt.demographics.user_id},
            {"gender", lt.demographics.gender == data::Gender::female ? "F" : "M"},
            {"age_bracket", lt.demographics.age_bracket},
            {"occupation", lt.demographics.occupation},
            {"zip", lt.demographics.zip}}},
          {"personality", lt.personality},
          {"item_preferences", lt.item_preferences},
          {"stats",
           {{"mean_rating", lt.stats.mean_rating},
            {"rating_histogram", lt.stats.rating_histogram},
            {"popular_item_fraction", lt.stats.popular_item_fraction},
            {"high_rated_item_fraction", lt.stats.high_rated_item_fraction},
            {"empty", lt.stats.empty}}},
          {"degraded", lt.degraded}}},
        {"short_term", {{"summary", s.short_term.summary}, {"last_updated_round", s.short_term.last_updated_round}}},
        {"short_term_update_rounds", s.short_term_update_rounds},
        {"memory", {{"capacity", s.memory.capacity()}, {"short_term", stm}, {"long_term", ltm}}},
        {"history_window", window},
    };
}

inline AgentState restore(const nlohmann::json& j)
{
    AgentState s;
    s.user_id = j.at("user_id").get<data::UserId>();
    s.round = j.at("round").get<int>();
    s.history_len = j.at("history_len").get<std::size_t>();
    const auto& lt = j.at("long_term");
    const auto& demo = lt.at("demographics");
    s.long_term.demographics.user_id = demo.at("user_id").get<data::UserId>();
    s.long_term.demographics.gender = demo.at("gender").get<std::string>() == "F" ? data::Gender::female
                                                                                 : data::Gender::male;
    s.long_term.demographics.age_bracket = demo.at("age_bracket").get<int>();
    s.long_term.demographics.occupation = demo.at("occupation").get<int>();
    s.long_term.demographics.zip = demo.at("zip").get<std::string>();
    s.long_term.personality = lt.at("personality").get<std::string>();
    s.long_term.item_preferences = lt.at("item_preferences").get<std::string>();
    const auto& st = lt.at("stats");
    s.long_term.stats.mean_rating = st.at("mean_rating").get<double>();
    s.long_term.stats.rating_histogram = st.at("rating_histogram").get<std::array<int, 5>>();
    s.long_term.stats.popular_item_fraction = st.at("popular_item_fraction").get<double>();
    s.long_term.stats.high_rated_item_fraction = st.at("high_rated_item_fraction").get<double>();
    s.long_term.stats.empty = st.at("empty").get<bool>();
    s.long_term.degraded = lt.at("degraded").get<bool>();
    s.short_term.summary = j.at("short_term").at("summary").get<std::string>();
    s.short_term.last_updated_round = j.at("short_term").at("last_updated_round").get<int>();
    s.short_term_update_rounds = j.at("short_term_update_rounds").get<std::vector<int>>();
    const auto& mem = j.at("memory");
    s.memory = MemoryStore(mem.at("capacity").get<std::size_t>());
    for (const auto& m : mem.at("short_term")) {
        s.memory.remember(detail::interaction_from(m.at("interaction")));
    }
    for (const auto& m : mem.at("long_term")) {
        s.memory.append_summary(m.at("summary").get<std::string>(), m.at("round").get<int>());
    }
    for (const auto& i : j.at("history_window")) {
        s.history_window.push_back(detail::interaction_from(i));
    }
    return s;
}

} // namespace dyta::agent
