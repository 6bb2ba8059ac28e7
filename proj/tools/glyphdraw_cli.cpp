// Batch command line over the glyphdraw library.
//
//   glyphdraw filter   --in records.jsonl --out kept.jsonl
//   glyphdraw stats    --in records.jsonl
//   glyphdraw layout   build|validate|fallback ...
//   glyphdraw render   --layout layout.json --out cond.png
//   glyphdraw eval     --in pairs.jsonl
//   glyphdraw check-kernels --seed 0
//
// Exit status: 0 success, 1 input error, 2 invariant-check failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "glyphdraw/glyphdraw.hpp"

namespace gd = glyphdraw;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_invariant = 2;
constexpr std::size_t batch_lines = 4096;

struct Common {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

// ---- I/O ----

class Input {
public:
    explicit Input(const std::string& path) {
        if (path.empty() || path == "-") {
            is_ = &std::cin;
            return;
        }
        file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*file_)
            throw gd::InputError("cannot open input: " + path);
        is_ = file_.get();
    }
    std::istream& stream() { return *is_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* is_ = nullptr;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") {
            os_ = &std::cout;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_)
            throw gd::InputError("cannot open output: " + path);
        os_ = file_.get();
    }
    std::ostream& stream() { return *os_; }
    void finish() {
        os_->flush();
        if (!*os_)
            throw gd::InputError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

struct Line {
    std::size_t number = 0;
    std::string text;
};

// Next batch of non-blank lines; empty at end of stream.
std::vector<Line> read_batch(std::istream& is, std::size_t& lineno) {
    std::vector<Line> out;
    std::string s;
    while (out.size() < batch_lines && std::getline(is, s)) {
        ++lineno;
        if (!s.empty() && s.back() == '\r')
            s.pop_back();
        if (s.find_first_not_of(" \t") == std::string::npos)
            continue;
        out.push_back({lineno, std::move(s)});
    }
    return out;
}

// Maps f over items with up to `jobs` threads. Results keep input order
// and the lowest-index failure is rethrown, so output never depends on
// scheduling.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, unsigned jobs, F f) {
    using R = decltype(f(items.front()));
    std::vector<std::optional<R>> results(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < items.size(); i += stride) {
            try {
                results[i].emplace(f(items[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(std::max(jobs, 1u), items.size());
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work, t, threads);
        for (auto& th : pool)
            th.join();
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (errors[i])
            std::rethrow_exception(errors[i]);
        out.push_back(std::move(*results[i]));
    }
    return out;
}

gd::json parse_json_line(const Line& l) {
    try {
        return gd::json::parse(l.text);
    } catch (const gd::json::parse_error& e) {
        throw gd::InputError(std::string("invalid JSON: ") + e.what());
    }
}

template <typename F>
auto at_line(const Line& l, F f) {
    try {
        return f();
    } catch (const gd::Error& e) {
        throw gd::InputError("line " + std::to_string(l.number) + ": " + e.what());
    }
}

gd::DatasetRecord record_at(const Line& l) {
    return at_line(l, [&] { return gd::record_from_json(parse_json_line(l)); });
}

gd::json read_json_file(const std::string& path) {
    Input in(path);
    try {
        return gd::json::parse(in.stream());
    } catch (const gd::json::parse_error& e) {
        throw gd::InputError(path + ": invalid JSON: " + e.what());
    }
}

void print_json(std::ostream& os, const gd::json& j) { os << j.dump(2) << '\n'; }

// ---- filter ----

struct FilterArgs {
    std::string in, out, decisions;
    gd::FilterConfig cfg;
    double min_aesthetic = -1.0;
};

void add_filter(CLI::App& app, const Common& common, FilterArgs& a) {
    auto* cmd = app.add_subcommand("filter", "Filter OCR-annotated records");
    cmd->add_option("--in", a.in, "Records JSONL ('-' for stdin)")->required();
    cmd->add_option("--out", a.out, "Kept records JSONL")->required();
    cmd->add_option("--decisions", a.decisions, "Per-record decisions JSONL");
    cmd->add_option("--min-confidence", a.cfg.min_confidence)->capture_default_str();
    cmd->add_option("--max-chars", a.cfg.max_chars_per_box)->capture_default_str();
    cmd->add_option("--max-boxes", a.cfg.max_boxes)->capture_default_str();
    cmd->add_option("--border-exclusion", a.cfg.border_exclusion)->capture_default_str();
    cmd->add_option("--center-margin", a.cfg.center_margin)->capture_default_str();
    cmd->add_option("--min-char-area", a.cfg.min_char_area)->capture_default_str();
    cmd->add_option("--min-long-side", a.cfg.min_long_side)->capture_default_str();
    cmd->add_option("--min-short-side", a.cfg.min_short_side)->capture_default_str();
    cmd->add_option("--min-aesthetic", a.min_aesthetic, "Aesthetic gate, off when negative");
    cmd->callback([&] {
        if (a.min_aesthetic >= 0.0)
            a.cfg.min_aesthetic = a.min_aesthetic;
        a.cfg.validate();
        Input in(a.in);
        Output out(a.out);
        std::optional<Output> decisions;
        if (!a.decisions.empty())
            decisions.emplace(a.decisions);

        std::size_t records = 0, kept = 0, boxes_in = 0, boxes_kept = 0;
        std::map<std::string, std::size_t> rejected, dropped;
        std::size_t lineno = 0;
        for (auto batch = read_batch(in.stream(), lineno); !batch.empty(); batch = read_batch(in.stream(), lineno)) {
            auto results = parallel_map(batch, common.jobs, [&](const Line& l) {
                gd::DatasetRecord r = record_at(l);
                gd::FilterDecision d = gd::filter_record(r, a.cfg);
                return std::make_pair(std::move(r), std::move(d));
            });
            for (const auto& [r, d] : results) {
                ++records;
                boxes_in += r.boxes.size();
                for (const auto& drop : d.dropped_boxes)
                    ++dropped[gd::to_string(drop.second)];
                if (decisions) {
                    gd::json j = {{"image_id", r.image_id}};
                    j.update(gd::decision_to_json(d));
                    decisions->stream() << j.dump() << '\n';
                }
                if (!d.kept) {
                    ++rejected[gd::to_string(*d.reject_reason)];
                    continue;
                }
                ++kept;
                boxes_kept += d.kept_boxes.size();
                // dropped_boxes indexes the input record's boxes
                gd::json j = gd::record_to_json(gd::apply_decision(r, d));
                j["filter"] = gd::decision_to_json(d);
                out.stream() << j.dump() << '\n';
            }
        }
        out.finish();
        if (decisions)
            decisions->finish();
        print_json(std::cout, {{"records", records},
                               {"kept", kept},
                               {"rejected", records - kept},
                               {"boxes_in", boxes_in},
                               {"boxes_kept", boxes_kept},
                               {"reject_reasons", rejected},
                               {"dropped_box_reasons", dropped}});
    });
}

// ---- stats ----

struct StatsArgs {
    std::string in, out;
    std::size_t top_k = 100;
};

void add_stats(CLI::App& app, StatsArgs& a) {
    auto* cmd = app.add_subcommand("stats", "Corpus statistics of a records JSONL");
    cmd->add_option("--in", a.in, "Records JSONL ('-' for stdin)")->required();
    cmd->add_option("--out", a.out, "Stats JSON (default stdout)");
    cmd->add_option("--top-k", a.top_k, "Most frequent characters to list")->capture_default_str();
    cmd->callback([&] {
        Input in(a.in);
        gd::StatsReport s;
        std::size_t lineno = 0;
        for (auto batch = read_batch(in.stream(), lineno); !batch.empty(); batch = read_batch(in.stream(), lineno))
            for (const auto& l : batch)
                s.add(record_at(l));
        Output out(a.out);
        print_json(out.stream(), gd::stats_to_json(s, a.top_k));
        out.finish();
    });
}

// ---- layout ----

struct LayoutArgs {
    std::string in, out;
    int mode = 3;
    std::string caption;
    std::vector<std::string> spans;
    std::int64_t width = 1024, height = 1024;
    std::optional<std::uint64_t> seed;
};

gd::json validation_to_json(const gd::ValidationReport& r) {
    return {{"total", r.total},
            {"valid", r.valid},
            {"accuracy", r.accuracy()},
            {"format_errors", r.format_errors},
            {"geometry_errors", r.geometry_errors},
            {"text_mismatches", r.text_mismatches}};
}

void add_layout(CLI::App& app, const Common& common, LayoutArgs& a) {
    auto* cmd = app.add_subcommand("layout", "Layout instruction data, validation and fallback");
    cmd->require_subcommand(1);

    auto* build = cmd->add_subcommand("build", "Instruction pairs from records JSONL");
    build->add_option("--in", a.in, "Records JSONL")->required();
    build->add_option("--out", a.out, "Instruction JSONL (default stdout)");
    build->add_option("--mode", a.mode, "Task mode 1-4")->check(CLI::Range(1, 4))->capture_default_str();
    build->callback([&] {
        const gd::TaskMode mode = gd::task_mode_from_int(a.mode);
        Input in(a.in);
        Output out(a.out);
        std::size_t lineno = 0;
        for (auto batch = read_batch(in.stream(), lineno); !batch.empty(); batch = read_batch(in.stream(), lineno))
            for (const auto& l : batch)
                out.stream() << at_line(l, [&] { return gd::instruction_to_json(gd::build_instruction(record_at(l), mode)); }).dump() << '\n';
        out.finish();
    });

    auto* validate = cmd->add_subcommand("validate", "Validate LLM outputs: {output, width, height, spans?} per line");
    validate->add_option("--in", a.in, "Outputs JSONL")->required();
    validate->add_option("--mode", a.mode, "Task mode 1-4")->check(CLI::Range(1, 4))->capture_default_str();
    validate->callback([&] {
        const gd::TaskMode mode = gd::task_mode_from_int(a.mode);
        Input in(a.in);
        gd::ValidationReport report;
        std::size_t lineno = 0;
        for (auto batch = read_batch(in.stream(), lineno); !batch.empty(); batch = read_batch(in.stream(), lineno)) {
            for (const auto& l : batch) {
                const auto kind = at_line(l, [&] {
                    const gd::json j = parse_json_line(l);
                    if (!j.is_object())
                        throw gd::InputError("entry must be a JSON object");
                    std::optional<std::vector<std::string>> spans;
                    if (j.contains("spans")) {
                        spans.emplace();
                        for (const auto& s : j.at("spans")) {
                            if (!s.is_string())
                                throw gd::InputError("spans must be strings");
                            spans->push_back(s.get<std::string>());
                        }
                    }
                    return gd::classify_output(gd::detail::json_str(j, "output"), mode,
                                               gd::detail::json_int(j, "width"), gd::detail::json_int(j, "height"),
                                               spans ? &*spans : nullptr);
                });
                gd::tally(report, kind);
            }
        }
        print_json(std::cout, validation_to_json(report));
    });

    auto* fallback = cmd->add_subcommand("fallback", "Rule-based random layout");
    fallback->add_option("--caption", a.caption, "Caption; quoted spans become boxes");
    fallback->add_option("--span", a.spans, "Span text, repeatable");
    fallback->add_option("--width", a.width)->capture_default_str();
    fallback->add_option("--height", a.height)->capture_default_str();
    fallback->add_option("--seed", a.seed, "Overrides the global seed");
    fallback->add_option("--out", a.out, "Layout JSON (default stdout)");
    fallback->callback([&] {
        std::vector<std::string> spans = a.spans;
        if (!a.caption.empty())
            for (auto& s : gd::extract_spans(a.caption))
                spans.push_back(std::move(s));
        const gd::Layout l = gd::fallback_layout(spans, a.width, a.height, a.seed.value_or(common.seed));
        Output out(a.out);
        print_json(out.stream(), gd::layout_to_json(l));
        out.finish();
    });
}

// ---- render ----

struct RenderArgs {
    std::string layout, out, font, mask_out;
    std::string mode = "fixed_font";
    double canny_low = 50.0, canny_high = 150.0;
};

void add_render(CLI::App& app, RenderArgs& a) {
    auto* cmd = app.add_subcommand("render", "Glyph condition image for a layout");
    cmd->add_option("--layout", a.layout, "Layout JSON {width, height, boxes}")->required();
    cmd->add_option("--out", a.out, "Output image (.png or .pgm)")->required();
    cmd->add_option("--mode", a.mode, "fixed_font or canny")
        ->check(CLI::IsMember({"fixed_font", "canny"}))
        ->capture_default_str();
    cmd->add_option("--font", a.font, "BDF font (default: built-in 5x7)");
    cmd->add_option("--canny-low", a.canny_low)->capture_default_str();
    cmd->add_option("--canny-high", a.canny_high)->capture_default_str();
    cmd->add_option("--mask-out", a.mask_out, "Also write the small-text mask image");
    cmd->callback([&] {
        std::optional<gd::BitmapFont> font;
        if (!a.font.empty())
            font = gd::BitmapFont::load_bdf(a.font);
        const gd::Layout layout = gd::layout_from_json(read_json_file(a.layout));
        std::vector<gd::RenderSpec> specs;
        for (const auto& b : layout.boxes) {
            gd::RenderSpec s;
            s.text = b.text;
            s.bbox = b;
            if (font)
                s.font = &*font;
            s.mode = a.mode == "canny" ? gd::RenderMode::canny_of_real : gd::RenderMode::fixed_font;
            specs.push_back(std::move(s));
        }
        std::vector<gd::RenderWarning> warnings;
        const auto w = static_cast<std::size_t>(layout.canvas_w), h = static_cast<std::size_t>(layout.canvas_h);
        const gd::GlyphImage img = gd::compose_condition(specs, w, h, {a.canny_low, a.canny_high}, &warnings);
        gd::save_image(a.out, img);
        if (!a.mask_out.empty())
            gd::save_image(a.mask_out, gd::emit_small_text_mask(layout.boxes, w, h));
        for (const auto& wn : warnings)
            std::cerr << "warning: no glyph for U+" << std::hex << std::uppercase << static_cast<std::uint32_t>(wn.codepoint)
                      << std::dec << " at character " << wn.char_index << ", drawn as a box\n";
    });
}

// ---- eval ----

struct EvalArgs {
    std::string in, out;
    bool fold_width = false;
    bool case_insensitive = false;
};

void add_eval(CLI::App& app, const Common& common, EvalArgs& a) {
    auto* cmd = app.add_subcommand("eval", "OCR metrics over {box_id, predicted, truth} pairs");
    cmd->add_option("--in", a.in, "Pairs JSONL ('-' for stdin)")->required();
    cmd->add_option("--out", a.out, "Report JSON (default stdout)");
    cmd->add_flag("--fold-width", a.fold_width, "Fold full-width forms before comparing");
    cmd->add_flag("--case-insensitive", a.case_insensitive, "Case-fold before comparing");
    cmd->callback([&] {
        const gd::MetricOptions opt{!a.case_insensitive, a.fold_width};
        Input in(a.in);
        gd::BenchmarkAccumulator total(opt);
        std::size_t lineno = 0;
        for (auto batch = read_batch(in.stream(), lineno); !batch.empty(); batch = read_batch(in.stream(), lineno)) {
            const auto parts = parallel_map(batch, common.jobs, [&](const Line& l) {
                return at_line(l, [&] {
                    gd::BenchmarkAccumulator one(opt);
                    one.add(gd::pair_from_json(parse_json_line(l)));
                    return one;
                });
            });
            for (const auto& p : parts)
                total.merge(p);
        }
        Output out(a.out);
        print_json(out.stream(), gd::report_to_json(total.report()));
        out.finish();
    });
}

// ---- check-kernels ----

struct KernelArgs {
    std::optional<std::uint64_t> seed;
    std::size_t trials = 100;
    bool failed = false;
};

void add_check_kernels(CLI::App& app, const Common& common, KernelArgs& a) {
    auto* cmd = app.add_subcommand("check-kernels", "Attention and loss invariant suite");
    cmd->add_option("--seed", a.seed, "Overrides the global seed");
    cmd->add_option("--trials", a.trials, "Random instances per check")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->callback([&] {
        const gd::KernelReport r = gd::run_kernel_checks(a.seed.value_or(common.seed), a.trials);
        print_json(std::cout, gd::kernel_report_to_json(r));
        a.failed = !r.passed();
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glyph-conditioned text rendering toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML config; command-line flags win");
    Common common;
    app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--jobs", common.jobs, "Worker threads for filter and eval")->check(CLI::Range(1u, 256u));

    FilterArgs filter_args;
    StatsArgs stats_args;
    LayoutArgs layout_args;
    RenderArgs render_args;
    EvalArgs eval_args;
    KernelArgs kernel_args;
    add_filter(app, common, filter_args);
    add_stats(app, stats_args);
    add_layout(app, common, layout_args);
    add_render(app, render_args);
    add_eval(app, common, eval_args);
    add_check_kernels(app, common, kernel_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return kernel_args.failed ? exit_invariant : exit_ok;
}
