#pragma once

#include "dyta/error.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace dyta {

/// Named prompt templates with `{placeholder}` slots.
struct PromptName {
    static constexpr std::string_view profile_personality = "profile_personality";
    static constexpr std::string_view profile_preferences = "profile_preferences";
    static constexpr std::string_view profile_short = "profile_short";
    static constexpr std::string_view memory_consolidate = "memory_consolidate";
    static constexpr std::string_view act_profile = "act_profile";
    static constexpr std::string_view act_rate = "act_rate";
    static constexpr std::string_view tpe_detect = "tpe_detect";
    static constexpr std::string_view tpe_cluster_analyze = "tpe_cluster_analyze";
    static constexpr std::string_view tpe_cluster_rank = "tpe_cluster_rank";
    static constexpr std::string_view tpe_cluster_onestep = "tpe_cluster_onestep";
    static constexpr std::string_view tpe_seq = "tpe_seq";
};

inline constexpr std::string_view position_note_text =
    "Note: candidate positions carry no significance. The candidates are listed in random order, so judge each "
    "one on its own merits.";

inline constexpr std::string_view ranking_format_text =
    "Answer with the candidate ids only, separated by commas, from most to least likely. Include every candidate "
    "exactly once.";

namespace detail {

inline const std::map<std::string, std::string, std::less<>>& default_templates()
{
    static const std::map<std::string, std::string, std::less<>> templates{
        {std::string(PromptName::profile_personality),
         "You are analysing a movie viewer.\n"
         "Profile:\n{long_term}\n\n"
         "Viewing history (oldest first):\n{history}\n\n"
         "Describe this viewer's personality as it shows in their viewing and rating habits, in two or three "
         "sentences."},
        {std::string(PromptName::profile_preferences),
         "You are analysing a movie viewer.\n"
         "Profile:\n{long_term}\n\n"
         "Viewing history (oldest first):\n{history}\n\n"
         "Summarise this viewer's preferences for genres, eras and specific kinds of films, in two or three "
         "sentences."},
        {std::string(PromptName::profile_short),
         "Recent viewing history (oldest first):\n{history}\n\n"
         "Summarise this viewer's recent behaviour and how their interests are currently evolving, in one or two "
         "sentences."},
        {std::string(PromptName::memory_consolidate),
         "Recent interactions and the feelings they produced:\n{memory}\n\n"
         "Extract the high-level, lasting patterns these interactions reveal about the viewer, in one or two "
         "sentences."},
        {std::string(PromptName::act_profile),
         "You are role-playing the following movie viewer.\n"
         "Long-term profile:\n{long_term}\n\n"
         "Recent interests:\n{short_term}\n\n"
         "Memories:\n{memory}\n\n"
         "Candidate movies:\n{candidates}\n\n"
         "{position_note}\n"
         "Rank the candidates by how likely this viewer is to watch each one next.\n"},
        {std::string(PromptName::act_rate),
         "You are role-playing the following movie viewer.\n"
         "Long-term profile:\n{long_term}\n\n"
         "Recent interests:\n{short_term}\n\n"
         "Recent viewing history (oldest first):\n{history}\n\n"
         "You just watched:\n{candidates}\n\n"
         "Reply in exactly two lines:\nRating: <integer 1-5>\nFeeling: <one sentence>"},
        {std::string(PromptName::tpe_detect),
         "Recent viewing history (oldest first):\n{history}\n\n"
         "Decide whether this history shows (a) a clear sequential pattern, where each choice follows from the "
         "previous ones, and (b) temporal clusters of closely related interactions.\n"
         "Reply in exactly this format:\nsequential: yes|no\nclustering: yes|no\nclusters: <short description, or "
         "none>"},
        {std::string(PromptName::tpe_cluster_analyze),
         "Recent viewing history (oldest first):\n{history}\n\n"
         "Identify recurring behaviour patterns and clusters in this history, and any shift in the viewer's "
         "interests. Do not recommend anything yet."},
        {std::string(PromptName::tpe_cluster_rank),
         "Recent viewing history (oldest first):\n{history}\n\n"
         "Analysis of recurring patterns in this history:\n{analysis}\n\n"
         "Candidate movies:\n{candidates}\n\n"
         "{position_note}\n"
         "Using the analysis, rank the candidates by how well each fits the viewer's current patterns.\n"},
        {std::string(PromptName::tpe_cluster_onestep),
         "Recent viewing history (oldest first):\n{history}\n\n"
         "Candidate movies:\n{candidates}\n\n"
         "{position_note}\n"
         "Identify the recurring patterns in the history and rank the candidates by how well each fits them.\n"},
        {std::string(PromptName::tpe_seq),
         "Predict the next movie a viewer watches from the sequence of what they watched before.\n\n"
         "{icl_examples}"
         "Now the live case.\n"
         "Sequence (oldest first):\n{history}\n\n"
         "Candidate movies:\n{candidates}\n\n"
         "{position_note}\n"
         "Rank the candidates by how likely each is to be watched next.\n"},
    };
    return templates;
}

} // namespace detail

using PromptVars = std::map<std::string, std::string, std::less<>>;

/// Replace `{name}` for every name in `vars`; other braces are left alone and
/// substituted text is never rescanned.
inline std::string render_template(std::string_view tmpl, const PromptVars& vars)
{
    std::string out;
    out.reserve(tmpl.size() + 256);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto key = tmpl.substr(i + 1, close - i - 1);
                if (const auto it = vars.find(key); it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
        ++i;
    }
    return out;
}

class PromptSet {
public:
    /// Built-in templates.
    PromptSet() : templates_(detail::default_templates()) {}

    /// Every template must be present as `<name>.txt` in `directory`.
    static PromptSet from_directory(const std::filesystem::path& directory)
    {
        if (!std::filesystem::is_directory(directory)) {
            throw ConfigError("prompts_dir is not a directory: " + directory.string());
        }
        PromptSet set;
        for (auto& [name, text] : set.templates_) {
            const auto file = directory / (name + ".txt");
            std::ifstream in(file, std::ios::binary);
            if (!in) {
                throw ConfigError("missing prompt template file: " + file.string());
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        return set;
    }

    static const std::map<std::string, std::string, std::less<>>& defaults() { return detail::default_templates(); }

    [[nodiscard]] const std::string& get(std::string_view name) const
    {
        const auto it = templates_.find(name);
        if (it == templates_.end()) {
            throw ConfigError("unknown prompt template '" + std::string(name) + "'");
        }
        return it->second;
    }

    [[nodiscard]] std::string render(std::string_view name, const PromptVars& vars) const
    {
        return render_template(get(name), vars);
    }

    [[nodiscard]] const auto& all() const { return templates_; }

private:
    std::map<std::string, std::string, std::less<>> templates_;
};

} // namespace dyta
