#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "glyphdraw/dataset.hpp"
#include "glyphdraw/rng.hpp"

using namespace glyphdraw;

namespace {

const std::filesystem::path data_dir = GLYPHDRAW_TEST_DATA;

std::vector<json> read_jsonl(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::vector<json> out;
    std::string line;
    while (std::getline(is, line))
        out.push_back(json::parse(line));
    return out;
}

std::vector<DatasetRecord> stats_records() {
    std::vector<DatasetRecord> out;
    for (const auto& j : read_jsonl(data_dir / "stats_records.jsonl"))
        out.push_back(record_from_json(j));
    return out;
}

DatasetRecord centered_record(double confidence, std::string text = "AB") {
    DatasetRecord r;
    r.width = 1200;
    r.height = 900;
    r.boxes = {{450, 375, 750, 525, std::move(text), confidence}};
    return r;
}

}  // namespace

TEST(FilterRecord, ConfidenceBoundary) {
    auto d = filter_record(centered_record(0.79));
    ASSERT_EQ(d.dropped_boxes.size(), 1u);
    EXPECT_EQ(d.dropped_boxes[0].second, FilterRule::confidence);
    EXPECT_EQ(d.reject_reason, FilterRule::no_boxes);
    EXPECT_FALSE(filter_record(centered_record(0.8)).kept);
    EXPECT_TRUE(filter_record(centered_record(0.8000001)).kept);
}

TEST(FilterRecord, FifteenCharactersIsTooMany) {
    auto d = filter_record(centered_record(0.9, "ABCDEFGHIJKLMNO"));
    ASSERT_EQ(d.dropped_boxes.size(), 1u);
    EXPECT_EQ(d.dropped_boxes[0].second, FilterRule::char_count);
    EXPECT_TRUE(filter_record(centered_record(0.9, "ABCDEFG HIJKLMN")).kept);
}

TEST(FilterRecord, ResolutionGate) {
    DatasetRecord r = centered_record(0.9);
    r.width = r.height = 800;
    r.boxes[0] = {100, 100, 400, 250, "AB", 0.9};
    const auto d = filter_record(r);
    EXPECT_FALSE(d.kept);
    EXPECT_EQ(d.reject_reason, FilterRule::resolution);
    EXPECT_TRUE(d.dropped_boxes.empty());
}

TEST(FilterRecord, AestheticGateIsOptIn) {
    DatasetRecord r = centered_record(0.9);
    FilterConfig cfg;
    EXPECT_TRUE(filter_record(r, cfg).kept);
    cfg.min_aesthetic = 5.0;
    EXPECT_EQ(filter_record(r, cfg).reject_reason, FilterRule::aesthetic);
    r.aesthetic_score = 5.0;
    EXPECT_TRUE(filter_record(r, cfg).kept);
}

TEST(FilterRecord, KeptImpliesNoRejectReason) {
    for (const auto& j : read_jsonl(data_dir / "filter_cases.jsonl")) {
        const auto d = filter_record(record_from_json(j));
        EXPECT_EQ(d.kept, !d.reject_reason.has_value());
    }
}

TEST(FilterRecord, LabeledFixtureAgreesEverywhere) {
    const auto rows = read_jsonl(data_dir / "filter_cases.jsonl");
    ASSERT_EQ(rows.size(), 200u);
    std::map<std::string, int> rules_seen;
    std::size_t box_decisions = 0;
    for (const auto& j : rows) {
        const DatasetRecord r = record_from_json(j);
        const json got = decision_to_json(filter_record(r));
        const json& want = j.at("expect");
        EXPECT_EQ(got, want) << r.image_id;
        for (const auto& drop : want.at("dropped_boxes"))
            ++rules_seen[drop.at(1).get<std::string>()];
        if (want.value("reject_reason", "") == "resolution")
            ++rules_seen["resolution"];
        else
            box_decisions += r.boxes.size();
    }
    for (const char* rule : {"resolution", "confidence", "char_count", "border", "center_margin", "char_area",
                             "max_boxes"})
        EXPECT_GT(rules_seen[rule], 0) << rule;
    EXPECT_GT(box_decisions, 500u);
}

TEST(FilterRecord, BoxCapKeepsHighestConfidenceLowerIndexOnTies) {
    DatasetRecord r;
    r.width = 1200;
    r.height = 900;
    for (int i = 0; i < 12; ++i)
        r.boxes.push_back({450, 375, 750, 525, "AB", i == 3 ? 0.85 : 0.9});
    const auto d = filter_record(r);
    ASSERT_TRUE(d.kept);
    EXPECT_EQ(d.kept_boxes.size(), 10u);
    const std::vector<std::pair<std::size_t, FilterRule>> dropped{{3, FilterRule::max_boxes},
                                                                  {11, FilterRule::max_boxes}};
    EXPECT_EQ(d.dropped_boxes, dropped);
}

TEST(FilterRecord, RaisingMinConfidenceNeverKeepsMore) {
    const auto rows = read_jsonl(data_dir / "filter_cases.jsonl");
    const double steps[] = {0.1, 0.5, 0.8, 0.85, 0.9, 0.95, 0.99};
    for (const auto& j : rows) {
        const DatasetRecord r = record_from_json(j);
        std::vector<std::size_t> prev;
        bool first = true;
        for (double c : steps) {
            FilterConfig cfg;
            cfg.min_confidence = c;
            cfg.max_boxes = 1000;  // the cap is rank-based and would mask the property
            const auto kept = filter_record(r, cfg).kept_boxes;
            if (!first) {
                EXPECT_TRUE(std::includes(prev.begin(), prev.end(), kept.begin(), kept.end())) << r.image_id;
            }
            prev = kept;
            first = false;
        }
    }
}

TEST(FilterRecord, Deterministic) {
    for (const auto& j : read_jsonl(data_dir / "filter_cases.jsonl")) {
        const DatasetRecord r = record_from_json(j);
        EXPECT_EQ(filter_record(r), filter_record(r));
    }
}

TEST(FilterRecord, ApplyDecisionKeepsSurvivors) {
    DatasetRecord r = centered_record(0.9);
    r.boxes.push_back({450, 375, 750, 525, "AB", 0.1});
    const DatasetRecord out = apply_decision(r, filter_record(r));
    ASSERT_EQ(out.boxes.size(), 1u);
    EXPECT_EQ(out.boxes[0], r.boxes[0]);
}

TEST(FilterConfig, Validation) {
    FilterConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.center_margin = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.max_boxes = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SmallTextBoxes, RatioThreshold) {
    DatasetRecord r;
    r.width = r.height = 1024;
    r.boxes = {{0, 0, 30, 30, "a", 0.9}, {100, 100, 140, 140, "b", 0.9}, {500, 500, 510, 510, "c", 0.9}};
    const auto small = small_text_boxes(r);
    ASSERT_EQ(small.size(), 2u);
    EXPECT_EQ(small[0].text, "a");
    EXPECT_EQ(small[1].text, "c");
    r.boxes.clear();
    EXPECT_TRUE(small_text_boxes(r).empty());
}

TEST(RecordJson, RoundTripAndErrors) {
    const auto rows = read_jsonl(data_dir / "filter_cases.jsonl");
    const DatasetRecord r = record_from_json(rows[0]);
    const DatasetRecord back = record_from_json(record_to_json(r));
    EXPECT_EQ(back.boxes, r.boxes);
    EXPECT_EQ(back.image_id, r.image_id);

    EXPECT_THROW(parse_record_line("{not json"), InputError);
    EXPECT_THROW(parse_record_line("[1,2]"), InputError);
    EXPECT_THROW(parse_record_line(R"({"image_id":"x","width":0,"height":5})"), InputError);
    EXPECT_THROW(parse_record_line(R"({"image_id":"x","width":10,"height":10,"boxes":[{"x1":0,"y1":0,"x2":11,"y2":5}]})"),
                 InputError);
    EXPECT_THROW(parse_record_line(R"({"image_id":"x","width":10,"height":10,"language":"fr"})"), InputError);
    EXPECT_THROW(parse_record_line(R"({"image_id":"x","width":1.5,"height":10})"), InputError);
}

TEST(CorpusStats, EmptyStreamIsZero) {
    const StatsReport s = corpus_stats(std::vector<DatasetRecord>{});
    EXPECT_EQ(s.total.samples, 0u);
    EXPECT_EQ(s.total.chars, 0u);
    EXPECT_EQ(s.total.words, 0u);
    EXPECT_TRUE(s.top_chars().empty());
}

TEST(CorpusStats, HandCountedRecord) {
    DatasetRecord r;
    r.width = r.height = 10;
    r.boxes = {{0, 0, 5, 5, "ab cd", 0.9}};
    const StatsReport s = corpus_stats(std::vector<DatasetRecord>{r});
    EXPECT_EQ(s.total.words, 2u);
    EXPECT_EQ(s.total.chars, 4u);
    EXPECT_EQ(s.total.char_freq.size(), 4u);

    r.boxes = {{0, 0, 5, 5, "新年 SALE快乐", 0.9}};
    const StatsReport t = corpus_stats(std::vector<DatasetRecord>{r});
    EXPECT_EQ(t.total.words, 5u);
    EXPECT_EQ(t.total.chars, 8u);
}

TEST(CorpusStats, MatchesCountingScript) {
    const auto got = nlohmann::json::parse(stats_to_json(corpus_stats(stats_records())).dump());
    std::ifstream is(data_dir / "stats_expected.json");
    const auto want = nlohmann::json::parse(is);
    EXPECT_EQ(got, want);
}

TEST(CorpusStats, MergeOfAnyFourWayChunking) {
    const auto records = stats_records();
    const StatsReport whole = corpus_stats(records);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> cuts{0, records.size()};
        for (int i = 0; i < 3; ++i)
            cuts.push_back(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(records.size()))));
        std::sort(cuts.begin(), cuts.end());
        StatsReport merged;
        // merge in a shuffled chunk order to cover commutativity too
        std::vector<std::size_t> order{0, 1, 2, 3};
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
        for (std::size_t c : order) {
            std::vector<DatasetRecord> chunk(records.begin() + static_cast<std::ptrdiff_t>(cuts[c]),
                                             records.begin() + static_cast<std::ptrdiff_t>(cuts[c + 1]));
            merged.merge(corpus_stats(chunk));
        }
        EXPECT_EQ(merged, whole);
    }
}

TEST(CorpusStats, RecordOrderIrrelevant) {
    auto records = stats_records();
    const StatsReport a = corpus_stats(records);
    std::reverse(records.begin(), records.end());
    EXPECT_EQ(corpus_stats(records), a);
}

TEST(CorpusStats, TopCharsTieBreakByCodePoint) {
    DatasetRecord r;
    r.width = r.height = 10;
    r.boxes = {{0, 0, 5, 5, "ba", 0.9}};
    const auto top = corpus_stats(std::vector<DatasetRecord>{r}).top_chars(1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].first, U'a');
}
