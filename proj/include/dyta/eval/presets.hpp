#pragma once

#include "dyta/agent/agent.hpp"
#include "dyta/error.hpp"

#include <array>
#include <string>
#include <string_view>

namespace dyta::eval {

enum class MethodKind { agent, random, bm25 };

struct Preset {
    std::string name;
    MethodKind kind = MethodKind::agent;
    agent::AgentConfig agent;
};

inline constexpr std::array<std::string_view, 11> preset_names{
    "dyta_bc", "dyta_rrf", "long_term", "long_short", "sequential", "clustering",
    "seq_long", "no_saa_bc", "no_saa_rrf", "random", "bm25"};

/// Rows of the ablation table, in table order.
inline constexpr std::array<std::string_view, 9> ablation_presets{
    "long_term", "long_short", "sequential", "clustering", "seq_long", "no_saa_bc", "no_saa_rrf", "dyta_bc", "dyta_rrf"};

inline std::string_view display_name(std::string_view preset)
{
    if (preset == "long_term") return "Long-term";
    if (preset == "long_short") return "Long- & Short-term";
    if (preset == "sequential") return "Sequential";
    if (preset == "clustering") return "Clustering";
    if (preset == "seq_long") return "Sequential+Long-term";
    if (preset == "no_saa_bc") return "DyTA4Rec w/o SAA (BC)";
    if (preset == "no_saa_rrf") return "DyTA4Rec w/o SAA (RRF)";
    if (preset == "dyta_bc") return "DyTA4Rec (BC)";
    if (preset == "dyta_rrf") return "DyTA4Rec (RRF)";
    if (preset == "random") return "Random";
    if (preset == "bm25") return "BM25";
    return preset;
}

/// Applies a preset's signal switches and fusion mode on top of `base`, which
/// supplies history_len, cadence, icl_k, weights and prompting settings.
inline Preset make_preset(std::string_view name, const agent::AgentConfig& base)
{
    Preset p{std::string(name), MethodKind::agent, base};
    auto& a = p.agent;
    auto signals = [&](bool profile, bool short_term, bool seq, bool clu) {
        a.use_profile = profile;
        a.use_short_term = short_term;
        a.use_sequential = seq;
        a.use_clustering = clu;
    };
    auto fixed = [&](fusion::Method method, fusion::Weights w) {
        a.fusion.method = method;
        a.fusion.adaptive = false;
        a.fusion.static_weights = w;
    };
    if (name == "dyta_bc" || name == "dyta_rrf") {
        signals(true, true, true, true);
        a.fusion.adaptive = true;
        a.fusion.method = name == "dyta_bc" ? fusion::Method::borda : fusion::Method::rrf;
    } else if (name == "long_term") {
        signals(true, false, false, false);
        fixed(base.fusion.method, {1.0, 0.0, 0.0});
    } else if (name == "long_short") {
        signals(true, true, false, false);
        fixed(base.fusion.method, {1.0, 0.0, 0.0});
    } else if (name == "sequential") {
        signals(false, false, true, false);
        fixed(base.fusion.method, {0.0, 1.0, 0.0});
    } else if (name == "clustering") {
        signals(false, false, false, true);
        fixed(base.fusion.method, {0.0, 0.0, 1.0});
    } else if (name == "seq_long") {
        signals(true, false, true, false);
        fixed(fusion::Method::rrf, {1.0, base.fusion.static_weights.sequential, 0.0});
    } else if (name == "no_saa_bc" || name == "no_saa_rrf") {
        signals(true, true, true, true);
        fixed(name == "no_saa_bc" ? fusion::Method::borda : fusion::Method::rrf, base.fusion.static_weights);
    } else if (name == "random") {
        p.kind = MethodKind::random;
    } else if (name == "bm25") {
        p.kind = MethodKind::bm25;
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    return p;
}

} // namespace dyta::eval
