#pragma once

#include "dyta/dataset/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dyta::eval {

using data::ItemId;

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Lowercased runs of ASCII alphanumerics; everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) != 0) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

/// Okapi BM25 over a small in-memory corpus (here: the candidate page).
/// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which stays positive when a
/// term occurs in most of a tiny corpus. Query tokens count with repetition.
class Bm25Scorer {
public:
    Bm25Scorer(std::vector<std::vector<std::string>> documents, Bm25Params params = {})
        : docs_(std::move(documents)), params_(params)
    {
        double total = 0.0;
        tf_.resize(docs_.size());
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            total += static_cast<double>(docs_[d].size());
            for (const auto& t : docs_[d]) {
                ++tf_[d][t];
            }
            for (const auto& [t, c] : tf_[d]) {
                ++df_[t];
            }
        }
        avgdl_ = docs_.empty() ? 0.0 : total / static_cast<double>(docs_.size());
    }

    [[nodiscard]] double idf(const std::string& term) const
    {
        const auto it = df_.find(term);
        const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
        const auto n = static_cast<double>(docs_.size());
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    [[nodiscard]] double score(std::size_t doc, const std::vector<std::string>& query) const
    {
        const auto dl = static_cast<double>(docs_[doc].size());
        const double norm = avgdl_ > 0.0 ? params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_) : params_.k1;
        double s = 0.0;
        for (const auto& q : query) {
            const auto it = tf_[doc].find(q);
            if (it == tf_[doc].end()) {
                continue;
            }
            const auto f = static_cast<double>(it->second);
            s += idf(q) * f * (params_.k1 + 1.0) / (f + norm);
        }
        return s;
    }

    [[nodiscard]] std::vector<double> scores(const std::vector<std::string>& query) const
    {
        std::vector<double> out(docs_.size());
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            out[d] = score(d, query);
        }
        return out;
    }

    [[nodiscard]] std::size_t size() const { return docs_.size(); }

private:
    std::vector<std::vector<std::string>> docs_;
    std::vector<std::unordered_map<std::string, int>> tf_;
    std::unordered_map<std::string, int> df_;
    Bm25Params params_;
    double avgdl_ = 0.0;
};

inline std::string item_document(const data::ItemRecord& item)
{
    std::string doc = item.title;
    for (const auto& g : item.genres) {
        doc += ' ';
        doc += g;
    }
    return doc;
}

} // namespace dyta::eval
