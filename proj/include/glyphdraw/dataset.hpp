#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glyphdraw/bbox.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/record.hpp"
#include "glyphdraw/utf8.hpp"

namespace glyphdraw {

/// Thresholds of the OCR-record filter. Character counts ignore
/// whitespace throughout.
struct FilterConfig {
    double min_confidence = 0.8;           // keep boxes with confidence strictly above
    std::size_t max_chars_per_box = 15;    // keep boxes with strictly fewer characters
    std::size_t max_boxes = 10;            // keep at most this many boxes per record
    double border_exclusion = 0.05;        // drop boxes centered this close to an edge
    double center_margin = 0.15;           // require this distance from the edges on some axis
    std::int64_t min_char_area = 2000;     // keep boxes with area per character strictly above
    std::int64_t min_long_side = 1024;     // long side strictly above
    std::int64_t min_short_side = 768;     // short side at least
    double small_text_ratio = 0.001;       // masked when area / image area is below
    std::optional<double> min_aesthetic;   // aesthetic gate, off unless set

    void validate() const {
        for (double f : {min_confidence, border_exclusion, center_margin, small_text_ratio})
            if (!(f > 0.0 && f < 1.0))
                throw ConfigError("filter fractions must lie in (0, 1)");
        if (max_chars_per_box == 0 || max_boxes == 0 || min_char_area <= 0 || min_long_side <= 0 ||
            min_short_side <= 0)
            throw ConfigError("filter counts must be positive");
    }
};

enum class FilterRule {
    resolution,
    aesthetic,
    confidence,
    char_count,
    border,
    center_margin,
    char_area,
    max_boxes,
    no_boxes,
};

inline const char* to_string(FilterRule r) noexcept {
    switch (r) {
    case FilterRule::resolution: return "resolution";
    case FilterRule::aesthetic: return "aesthetic";
    case FilterRule::confidence: return "confidence";
    case FilterRule::char_count: return "char_count";
    case FilterRule::border: return "border";
    case FilterRule::center_margin: return "center_margin";
    case FilterRule::char_area: return "char_area";
    case FilterRule::max_boxes: return "max_boxes";
    case FilterRule::no_boxes: return "no_boxes";
    }
    return "?";
}

struct FilterDecision {
    bool kept = false;
    std::vector<std::pair<std::size_t, FilterRule>> dropped_boxes;  // (box index, first failing rule)
    std::optional<FilterRule> reject_reason;
    std::vector<std::size_t> kept_boxes;

    friend bool operator==(const FilterDecision&, const FilterDecision&) = default;
};

namespace detail {

// Box center at least frac·side away from both edges of one axis.
// Doubled coordinates keep the center integral.
inline bool center_at_least(std::int64_t lo, std::int64_t hi, std::int64_t side, double frac) {
    const std::int64_t twice_center = lo + hi;
    const std::int64_t twice_dist = std::min(twice_center, 2 * side - twice_center);
    return static_cast<double>(twice_dist) >= frac * static_cast<double>(2 * side);
}

inline std::optional<FilterRule> first_failing_rule(const BBox& b, std::int64_t w, std::int64_t h,
                                                    const FilterConfig& cfg) {
    if (!b.confidence || !(*b.confidence > cfg.min_confidence))
        return FilterRule::confidence;
    const std::size_t chars = utf8::count_chars(utf8::decode(b.text));
    if (chars == 0 || chars >= cfg.max_chars_per_box)
        return FilterRule::char_count;
    if (!center_at_least(b.x1, b.x2, w, cfg.border_exclusion) || !center_at_least(b.y1, b.y2, h, cfg.border_exclusion))
        return FilterRule::border;
    if (!center_at_least(b.x1, b.x2, w, cfg.center_margin) && !center_at_least(b.y1, b.y2, h, cfg.center_margin))
        return FilterRule::center_margin;
    if (!(b.area() > cfg.min_char_area * static_cast<std::int64_t>(chars)))
        return FilterRule::char_area;
    return std::nullopt;
}

}  // namespace detail

/// Applies, in order: the resolution gate, the optional aesthetic gate,
/// the per-box rules (confidence, char_count, border, center_margin,
/// char_area), then the box-count cap, which keeps the highest-confidence
/// boxes with ties going to the lower index. A record with no surviving
/// box is rejected.
inline FilterDecision filter_record(const DatasetRecord& r, const FilterConfig& cfg = {}) {
    FilterDecision d;
    const std::int64_t long_side = std::max(r.width, r.height);
    const std::int64_t short_side = std::min(r.width, r.height);
    if (!(long_side > cfg.min_long_side && short_side >= cfg.min_short_side)) {
        d.reject_reason = FilterRule::resolution;
        return d;
    }
    if (cfg.min_aesthetic && !(r.aesthetic_score && *r.aesthetic_score >= *cfg.min_aesthetic)) {
        d.reject_reason = FilterRule::aesthetic;
        return d;
    }
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < r.boxes.size(); ++i) {
        if (auto rule = detail::first_failing_rule(r.boxes[i], r.width, r.height, cfg))
            d.dropped_boxes.emplace_back(i, *rule);
        else
            survivors.push_back(i);
    }
    if (survivors.size() > cfg.max_boxes) {
        std::vector<std::size_t> ranked = survivors;
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
            return *r.boxes[a].confidence > *r.boxes[b].confidence;
        });
        for (std::size_t k = cfg.max_boxes; k < ranked.size(); ++k)
            d.dropped_boxes.emplace_back(ranked[k], FilterRule::max_boxes);
        ranked.resize(cfg.max_boxes);
        std::sort(ranked.begin(), ranked.end());
        survivors = std::move(ranked);
        std::sort(d.dropped_boxes.begin(), d.dropped_boxes.end());
    }
    d.kept_boxes = std::move(survivors);
    if (d.kept_boxes.empty()) {
        d.reject_reason = FilterRule::no_boxes;
        return d;
    }
    d.kept = true;
    return d;
}

/// Copy of the record holding only the boxes the decision kept.
inline DatasetRecord apply_decision(const DatasetRecord& r, const FilterDecision& d) {
    DatasetRecord out = r;
    out.boxes.clear();
    for (std::size_t i : d.kept_boxes)
        out.boxes.push_back(r.boxes[i]);
    return out;
}

inline json decision_to_json(const FilterDecision& d) {
    json dropped = json::array();
    for (const auto& [idx, rule] : d.dropped_boxes)
        dropped.push_back(json::array({idx, to_string(rule)}));
    json j = {{"kept", d.kept}, {"dropped_boxes", std::move(dropped)}};
    if (d.reject_reason)
        j["reject_reason"] = to_string(*d.reject_reason);
    return j;
}

/// Boxes whose share of the image area is below small_text_ratio, in
/// input order. These are the regions to mask for inpainting.
inline std::vector<BBox> small_text_boxes(const DatasetRecord& r, const FilterConfig& cfg = {}) {
    std::vector<BBox> out;
    const double image_area = static_cast<double>(r.width) * static_cast<double>(r.height);
    for (const auto& b : r.boxes)
        if (static_cast<double>(b.area()) < cfg.small_text_ratio * image_area)
            out.push_back(b);
    return out;
}

// ---- corpus statistics ----

struct LanguageTotals {
    std::uint64_t samples = 0;
    std::uint64_t chars = 0;
    std::uint64_t words = 0;
    std::map<char32_t, std::uint64_t> char_freq;

    void merge(const LanguageTotals& o) {
        samples += o.samples;
        chars += o.chars;
        words += o.words;
        for (const auto& [c, n] : o.char_freq)
            char_freq[c] += n;
    }

    friend bool operator==(const LanguageTotals&, const LanguageTotals&) = default;
};

/// Mergeable corpus statistics. Reports form a commutative monoid under
/// merge, so chunks can be counted independently.
struct StatsReport {
    LanguageTotals total;
    std::map<Language, LanguageTotals> by_language;
    std::uint64_t boxes = 0;
    std::map<std::uint64_t, std::uint64_t> words_per_image;  // word count -> images
    std::map<std::uint64_t, std::uint64_t> boxes_per_image;  // box count -> images

    void add(const DatasetRecord& r) {
        LanguageTotals t;
        t.samples = 1;
        for (const auto& b : r.boxes) {
            const auto cps = utf8::decode(b.text);
            t.chars += utf8::count_chars(cps);
            t.words += utf8::count_words(cps);
            for (char32_t c : cps)
                if (!utf8::is_whitespace(c))
                    ++t.char_freq[c];
        }
        ++words_per_image[t.words];
        ++boxes_per_image[r.boxes.size()];
        boxes += r.boxes.size();
        by_language[r.language].merge(t);
        total.merge(t);
    }

    void merge(const StatsReport& o) {
        total.merge(o.total);
        for (const auto& [lang, t] : o.by_language)
            by_language[lang].merge(t);
        boxes += o.boxes;
        for (const auto& [k, n] : o.words_per_image)
            words_per_image[k] += n;
        for (const auto& [k, n] : o.boxes_per_image)
            boxes_per_image[k] += n;
    }

    /// Most frequent characters, ties broken by code point.
    std::vector<std::pair<char32_t, std::uint64_t>> top_chars(std::size_t k = 100) const {
        std::vector<std::pair<char32_t, std::uint64_t>> v(total.char_freq.begin(), total.char_freq.end());
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (v.size() > k)
            v.resize(k);
        return v;
    }

    friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

template <typename Range>
StatsReport corpus_stats(const Range& records) {
    StatsReport s;
    for (const DatasetRecord& r : records)
        s.add(r);
    return s;
}

inline json stats_to_json(const StatsReport& s, std::size_t top_k = 100) {
    auto totals = [](const LanguageTotals& t) {
        return json{{"samples", t.samples},
                    {"chars", t.chars},
                    {"words", t.words},
                    {"unique_chars", t.char_freq.size()}};
    };
    json j = totals(s.total);
    j["boxes"] = s.boxes;
    json langs = json::object();
    for (Language l : {Language::zh, Language::en, Language::mixed}) {
        auto it = s.by_language.find(l);
        langs[to_string(l)] = totals(it == s.by_language.end() ? LanguageTotals{} : it->second);
    }
    j["by_language"] = std::move(langs);
    auto hist = [](const std::map<std::uint64_t, std::uint64_t>& m) {
        json h = json::object();
        for (const auto& [k, n] : m)
            h[std::to_string(k)] = n;
        return h;
    };
    j["words_per_image"] = hist(s.words_per_image);
    j["boxes_per_image"] = hist(s.boxes_per_image);
    json top = json::array();
    for (const auto& [c, n] : s.top_chars(top_k)) {
        std::string ch;
        utf8::append(ch, c);
        top.push_back(json::array({ch, n}));
    }
    j["top_chars"] = std::move(top);
    return j;
}

}  // namespace glyphdraw
