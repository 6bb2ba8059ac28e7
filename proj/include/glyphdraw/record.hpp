#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glyphdraw/bbox.hpp"
#include "glyphdraw/error.hpp"
#include "json.hpp"

namespace glyphdraw {

using json = nlohmann::ordered_json;

enum class Language { zh, en, mixed };

inline const char* to_string(Language l) noexcept {
    switch (l) {
    case Language::zh: return "zh";
    case Language::en: return "en";
    case Language::mixed: return "mixed";
    }
    return "?";
}

/// One OCR-annotated image: metadata, caption and text boxes.
struct DatasetRecord {
    std::string image_id;
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::string caption;
    std::vector<BBox> boxes;
    std::optional<double> aesthetic_score;
    Language language = Language::mixed;
};

namespace detail {

inline std::int64_t json_int(const json& j, const char* key) {
    if (!j.contains(key))
        throw InputError(std::string("missing field '") + key + "'");
    const json& v = j.at(key);
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15)
            return static_cast<std::int64_t>(d);
    }
    throw InputError(std::string("field '") + key + "' must be an integer");
}

inline double json_real(const json& v, const char* key) {
    if (!v.is_number())
        throw InputError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline std::string json_str(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw InputError(std::string("field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

}  // namespace detail

inline BBox box_from_json(const json& j) {
    if (!j.is_object())
        throw InputError("box must be an object");
    BBox b;
    b.x1 = detail::json_int(j, "x1");
    b.y1 = detail::json_int(j, "y1");
    b.x2 = detail::json_int(j, "x2");
    b.y2 = detail::json_int(j, "y2");
    b.text = j.contains("text") ? detail::json_str(j, "text") : std::string{};
    if (j.contains("confidence") && !j.at("confidence").is_null())
        b.confidence = detail::json_real(j.at("confidence"), "confidence");
    return b;
}

inline json box_to_json(const BBox& b) {
    json j = {{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}, {"text", b.text}};
    if (b.confidence)
        j["confidence"] = *b.confidence;
    return j;
}

/// Parses and validates a record: positive dimensions and every box
/// inside the image.
inline DatasetRecord record_from_json(const json& j) {
    if (!j.is_object())
        throw InputError("record must be a JSON object");
    DatasetRecord r;
    r.image_id = detail::json_str(j, "image_id");
    r.width = detail::json_int(j, "width");
    r.height = detail::json_int(j, "height");
    if (r.width <= 0 || r.height <= 0)
        throw InputError("record '" + r.image_id + "': width and height must be positive");
    r.caption = j.contains("caption") ? detail::json_str(j, "caption") : std::string{};
    if (j.contains("language") && !j.at("language").is_null()) {
        const std::string lang = detail::json_str(j, "language");
        if (lang == "zh")
            r.language = Language::zh;
        else if (lang == "en")
            r.language = Language::en;
        else if (lang == "mixed")
            r.language = Language::mixed;
        else
            throw InputError("record '" + r.image_id + "': unknown language '" + lang + "'");
    }
    if (j.contains("aesthetic_score") && !j.at("aesthetic_score").is_null())
        r.aesthetic_score = detail::json_real(j.at("aesthetic_score"), "aesthetic_score");
    if (j.contains("boxes")) {
        if (!j.at("boxes").is_array())
            throw InputError("record '" + r.image_id + "': boxes must be an array");
        for (const auto& jb : j.at("boxes")) {
            BBox b = box_from_json(jb);
            if (!b.inside(r.width, r.height))
                throw InputError("record '" + r.image_id + "': box " + std::to_string(r.boxes.size()) +
                                 " is malformed or outside the image");
            r.boxes.push_back(std::move(b));
        }
    }
    return r;
}

inline json record_to_json(const DatasetRecord& r) {
    json j = {{"image_id", r.image_id}, {"width", r.width},       {"height", r.height},
              {"caption", r.caption},   {"language", to_string(r.language)}};
    if (r.aesthetic_score)
        j["aesthetic_score"] = *r.aesthetic_score;
    json boxes = json::array();
    for (const auto& b : r.boxes)
        boxes.push_back(box_to_json(b));
    j["boxes"] = std::move(boxes);
    return j;
}

inline DatasetRecord parse_record_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    return record_from_json(j);
}

}  // namespace glyphdraw
