#pragma once

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphdraw/error.hpp"
#include "glyphdraw/record.hpp"
#include "glyphdraw/utf8.hpp"

namespace glyphdraw {

struct EvalPair {
    std::string predicted;
    std::string truth;
    std::optional<std::string> box_id;
};

/// Text preparation applied before every metric. NFC is always applied.
struct MetricOptions {
    bool case_sensitive = true;
    bool fold_width = false;  // full-width ASCII forms and U+3000 to their half-width forms
};

/// Unicode NFC followed by the optional foldings, as scalar values.
inline std::u32string prepare_text(std::string_view s, const MetricOptions& opt = {}) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status))
        throw Error("ICU NFC normalizer unavailable");
    utf8::decode(s);  // reject malformed input before ICU replaces it
    const icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    const icu::UnicodeString normalized = nfc->normalize(in, status);
    if (U_FAILURE(status))
        throw Error("NFC normalization failed");
    std::string utf8_out;
    normalized.toUTF8String(utf8_out);
    std::u32string out = utf8::decode(utf8_out);
    for (char32_t& c : out) {
        if (opt.fold_width) {
            if (c >= 0xFF01 && c <= 0xFF5E)
                c -= 0xFEE0;
            else if (c == 0x3000)
                c = 0x20;
        }
        if (!opt.case_sensitive)
            c = static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
    }
    return out;
}

/// Levenshtein distance with unit costs.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size())
        std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

/// Levenshtein distance over the Unicode scalar values of two UTF-8 strings.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    return edit_distance(std::u32string_view(utf8::decode(a)), std::u32string_view(utf8::decode(b)));
}

inline std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// edit_distance / max length, lower is better.
inline double normalized_edit_distance(const EvalPair& p, const MetricOptions& opt = {}) {
    const auto a = prepare_text(p.predicted, opt), b = prepare_text(p.truth, opt);
    const std::size_t len = std::max(a.size(), b.size());
    if (len == 0)
        throw DomainError("ned: both strings are empty");
    return static_cast<double>(edit_distance(a, b)) / static_cast<double>(len);
}

/// 1 − normalized edit distance, higher is better.
inline double ned(const EvalPair& p, const MetricOptions& opt = {}) { return 1.0 - normalized_edit_distance(p, opt); }

/// Character accuracy: |LCS(predicted, truth)| / |truth|. Matching by
/// longest common subsequence tolerates OCR alignment drift.
inline double char_acc(const EvalPair& p, const MetricOptions& opt = {}) {
    const auto pred = prepare_text(p.predicted, opt), truth = prepare_text(p.truth, opt);
    if (truth.empty())
        throw DomainError("char_acc: empty ground truth");
    return std::min(1.0, static_cast<double>(lcs_length(pred, truth)) / static_cast<double>(truth.size()));
}

namespace detail {

inline std::u32string_view trim(std::u32string_view s) {
    while (!s.empty() && utf8::is_whitespace(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && utf8::is_whitespace(s.back()))
        s.remove_suffix(1);
    return s;
}

inline bool exact_box_match(const EvalPair& p, const MetricOptions& opt) {
    if (!p.box_id)
        throw InputError("pw_acc: pair without box_id");
    const auto a = prepare_text(p.predicted, opt), b = prepare_text(p.truth, opt);
    return trim(a) == trim(b);
}

}  // namespace detail

/// Position-wise accuracy: share of boxes whose prediction equals the
/// truth exactly after trimming surrounding whitespace.
inline double pw_acc(std::span<const EvalPair> pairs, const MetricOptions& opt = {}) {
    if (pairs.empty())
        throw InputError("pw_acc: no pairs");
    std::size_t hits = 0;
    for (const auto& p : pairs)
        hits += detail::exact_box_match(p, opt) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

struct BenchmarkReport {
    double acc = 0.0;
    double pwacc = 0.0;
    double ned = 0.0;
    double ned_distance = 0.0;  // mean raw normalized distance, for auditing
    std::size_t pair_count = 0;
    std::optional<double> clip_score;  // filled from external scorers only
    std::optional<double> hpsv2;
};

/// Streaming aggregation. Accumulators merge by summation.
class BenchmarkAccumulator {
public:
    explicit BenchmarkAccumulator(MetricOptions opt = {}) : opt_(opt) {}

    void add(const EvalPair& p) {
        const auto pred = prepare_text(p.predicted, opt_), truth = prepare_text(p.truth, opt_);
        if (!p.box_id)
            throw InputError("benchmark: pair without box_id");
        if (truth.empty())
            throw DomainError("benchmark: empty ground truth");
        acc_sum_ += std::min(1.0, static_cast<double>(lcs_length(pred, truth)) / static_cast<double>(truth.size()));
        const double dist = static_cast<double>(edit_distance(pred, truth)) /
                            static_cast<double>(std::max(pred.size(), truth.size()));
        dist_sum_ += dist;
        hits_ += detail::trim(pred) == detail::trim(truth) ? 1 : 0;
        ++count_;
    }

    void merge(const BenchmarkAccumulator& o) {
        acc_sum_ += o.acc_sum_;
        dist_sum_ += o.dist_sum_;
        hits_ += o.hits_;
        count_ += o.count_;
    }

    std::size_t count() const noexcept { return count_; }

    BenchmarkReport report() const {
        if (count_ == 0)
            throw InputError("benchmark: empty report, no pairs");
        const auto n = static_cast<double>(count_);
        BenchmarkReport r;
        r.acc = acc_sum_ / n;
        r.pwacc = static_cast<double>(hits_) / n;
        r.ned_distance = dist_sum_ / n;
        r.ned = 1.0 - r.ned_distance;
        r.pair_count = count_;
        return r;
    }

private:
    MetricOptions opt_;
    double acc_sum_ = 0.0;
    double dist_sum_ = 0.0;
    std::size_t hits_ = 0;
    std::size_t count_ = 0;
};

template <typename Range>
BenchmarkReport benchmark(const Range& pairs, const MetricOptions& opt = {}) {
    BenchmarkAccumulator acc(opt);
    for (const EvalPair& p : pairs)
        acc.add(p);
    return acc.report();
}

inline EvalPair pair_from_json(const json& j) {
    if (!j.is_object())
        throw InputError("eval pair must be a JSON object");
    EvalPair p{detail::json_str(j, "predicted"), detail::json_str(j, "truth"), std::nullopt};
    if (j.contains("box_id") && !j.at("box_id").is_null())
        p.box_id = detail::json_str(j, "box_id");
    return p;
}

inline json report_to_json(const BenchmarkReport& r) {
    return {{"acc", r.acc},
            {"pwacc", r.pwacc},
            {"ned", r.ned},
            {"ned_distance", r.ned_distance},
            {"pair_count", r.pair_count},
            {"clip_score", r.clip_score ? json(*r.clip_score) : json(nullptr)},
            {"hpsv2", r.hpsv2 ? json(*r.hpsv2) : json(nullptr)}};
}

}  // namespace glyphdraw
