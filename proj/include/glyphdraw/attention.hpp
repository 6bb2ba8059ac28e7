#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glyphdraw/error.hpp"
#include "glyphdraw/image.hpp"
#include "glyphdraw/linalg.hpp"

namespace glyphdraw {

/// Which key/value projection pair a cross-attention call uses.
enum class Branch { base, ctrl, glyph };

inline const char* to_string(Branch b) noexcept {
    switch (b) {
    case Branch::base: return "base";
    case Branch::ctrl: return "ctrl";
    case Branch::glyph: return "glyph";
    }
    return "?";
}

/// Projection weights of one decoder block: the original cross-attention
/// (w_q, w_k, w_v) plus the key/value pairs of the two added branches.
/// Projections are applied on the right: K = cond · w_k.
struct AttentionBlockState {
    Matrix w_q, w_k, w_v;
    Matrix w_k_ctrl, w_v_ctrl;
    Matrix w_k_glyph, w_v_glyph;
    std::size_t key_dim = 0;

    const Matrix& key_proj(Branch b) const noexcept {
        return b == Branch::base ? w_k : b == Branch::ctrl ? w_k_ctrl : w_k_glyph;
    }
    const Matrix& value_proj(Branch b) const noexcept {
        return b == Branch::base ? w_v : b == Branch::ctrl ? w_v_ctrl : w_v_glyph;
    }

    /// Throws ShapeError unless every projection agrees on key_dim and
    /// all value projections share one output width.
    void validate() const {
        if (key_dim == 0)
            throw ShapeError("key_dim must be positive");
        if (w_q.cols() != key_dim)
            throw ShapeError("w_q " + w_q.shape() + " does not map to key_dim " + std::to_string(key_dim));
        for (Branch b : {Branch::base, Branch::ctrl, Branch::glyph}) {
            if (key_proj(b).cols() != key_dim)
                throw ShapeError(std::string("branch ") + to_string(b) + ": key projection " + key_proj(b).shape() +
                                 " does not map to key_dim " + std::to_string(key_dim));
            if (value_proj(b).cols() != w_v.cols())
                throw ShapeError(std::string("branch ") + to_string(b) + ": value projection " +
                                 value_proj(b).shape() + " width differs from base " + w_v.shape());
        }
    }

    /// Random block for tests and kernel checks. All three branches
    /// consume features of their own widths.
    static AttentionBlockState random(Rng& rng, std::size_t latent_dim, std::size_t text_dim, std::size_t ctrl_dim,
                                      std::size_t glyph_dim, std::size_t key_dim, std::size_t value_dim) {
        AttentionBlockState s;
        s.w_q = Matrix::random(latent_dim, key_dim, rng);
        s.w_k = Matrix::random(text_dim, key_dim, rng);
        s.w_v = Matrix::random(text_dim, value_dim, rng);
        s.w_k_ctrl = Matrix::random(ctrl_dim, key_dim, rng);
        s.w_v_ctrl = Matrix::random(ctrl_dim, value_dim, rng);
        s.w_k_glyph = Matrix::random(glyph_dim, key_dim, rng);
        s.w_v_glyph = Matrix::random(glyph_dim, value_dim, rng);
        s.key_dim = key_dim;
        return s;
    }
};

struct InsertionEntry {
    std::size_t block_id = 0;
    bool enabled = true;
};

/// Balance weights of the three branches and which decoder blocks carry
/// the two added branches.
struct TcaConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    std::vector<InsertionEntry> insertion_map = default_insertion_map();

    /// Nine decoder blocks; the first block of each of the first two
    /// decoder stages (ids 0 and 1) keeps the base branch only.
    static std::vector<InsertionEntry> default_insertion_map() {
        std::vector<InsertionEntry> m;
        for (std::size_t id = 0; id < 9; ++id)
            m.push_back({id, id >= 2});
        return m;
    }

    std::optional<bool> enabled(std::size_t block_id) const {
        for (const auto& e : insertion_map)
            if (e.block_id == block_id)
                return e.enabled;
        return std::nullopt;
    }

    void validate() const {
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
            throw ConfigError("TCA weights must be finite");
        for (std::size_t i = 0; i < insertion_map.size(); ++i)
            for (std::size_t j = i + 1; j < insertion_map.size(); ++j)
                if (insertion_map[i].block_id == insertion_map[j].block_id)
                    throw ConfigError("duplicate decoder block id " + std::to_string(insertion_map[i].block_id));
    }
};

/// Condition tokens for the ControlNet branch. They can only be derived
/// from a glyph condition image, so caption text can never reach this
/// branch.
class ControlFeatures {
public:
    ControlFeatures() = default;

    /// Stand-in for the ControlNet feature extractor: each patch×patch
    /// tile of the condition image becomes one token of patch² values in
    /// [0, 1]. Image sides must be multiples of the patch size.
    static ControlFeatures from_glyph_image(const GlyphImage& condition, std::size_t patch) {
        return ControlFeatures(patchify(condition, patch));
    }

    const Matrix& tokens() const noexcept { return tokens_; }

    static Matrix patchify(const GlyphImage& img, std::size_t patch) {
        if (patch == 0 || img.width() % patch != 0 || img.height() % patch != 0 || img.width() == 0 ||
            img.height() == 0)
            throw ShapeError("patchify: " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                             " image is not tiled by patch " + std::to_string(patch));
        const std::size_t px = img.width() / patch, py = img.height() / patch;
        Matrix m(px * py, patch * patch);
        for (std::size_t ty = 0; ty < py; ++ty)
            for (std::size_t tx = 0; tx < px; ++tx)
                for (std::size_t y = 0; y < patch; ++y)
                    for (std::size_t x = 0; x < patch; ++x)
                        m(ty * px + tx, y * patch + x) = img.at(tx * patch + x, ty * patch + y) / 255.0;
        return m;
    }

private:
    explicit ControlFeatures(Matrix tokens) : tokens_(std::move(tokens)) {}
    Matrix tokens_;
};

struct ConditionFeatures {
    Matrix text_tokens;          // caption embedding, one row per token
    ControlFeatures ctrl_features;
    Matrix glyph_features;       // glyph encoder output tokens
};

struct GlyphSpan {
    std::size_t start = 0;
    std::size_t length = 0;
};

struct CaptionEmbedding {
    Matrix tokens;
    GlyphSpan glyph_span;
};

/// softmax((latent·w_q)(cond·w_k)ᵀ / √d) · (cond·w_v) for the selected branch.
inline Matrix cross_attention(const Matrix& latent, const Matrix& cond, const AttentionBlockState& block, Branch which) {
    const std::string tag = std::string("branch ") + to_string(which) + ": ";
    if (block.key_dim == 0)
        throw ShapeError(tag + "key_dim must be positive");
    if (cond.rows() == 0)
        throw ShapeError(tag + "condition has no tokens");
    if (latent.cols() != block.w_q.rows())
        throw ShapeError(tag + "latent width " + std::to_string(latent.cols()) + " vs w_q " + block.w_q.shape());
    const Matrix& wk = block.key_proj(which);
    const Matrix& wv = block.value_proj(which);
    if (cond.cols() != wk.rows() || cond.cols() != wv.rows())
        throw ShapeError(tag + "condition width " + std::to_string(cond.cols()) + " vs key " + wk.shape() +
                         " / value " + wv.shape());
    if (wk.cols() != block.w_q.cols() || wk.cols() != block.key_dim)
        throw ShapeError(tag + "key projection " + wk.shape() + " vs query " + block.w_q.shape() + " and key_dim " +
                         std::to_string(block.key_dim));
    const Matrix q = matmul(latent, block.w_q);
    const Matrix k = matmul(cond, wk);
    const Matrix v = matmul(cond, wv);
    const Matrix weights = row_softmax(scaled(matmul_bt(q, k), 1.0 / std::sqrt(static_cast<double>(block.key_dim))));
    return matmul(weights, v);
}

/// α·s + β·s_ctrl + γ·s_glyph.
inline Matrix tca_combine(const Matrix& s, const Matrix& s_ctrl, const Matrix& s_glyph, const TcaConfig& cfg) {
    if (!s.same_shape(s_ctrl) || !s.same_shape(s_glyph))
        throw ShapeError("tca_combine: " + s.shape() + ", " + s_ctrl.shape() + ", " + s_glyph.shape());
    Matrix out(s.rows(), s.cols());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = cfg.alpha * s.data()[i] + cfg.beta * s_ctrl.data()[i] + cfg.gamma * s_glyph.data()[i];
    return out;
}

/// One decoder block. Blocks disabled in the insertion map run the base
/// branch only; the added projections are never touched.
inline Matrix tca_block_forward(const Matrix& latent, const ConditionFeatures& feats, const AttentionBlockState& block,
                                std::size_t block_id, const TcaConfig& cfg) {
    const auto enabled = cfg.enabled(block_id);
    if (!enabled)
        throw ConfigError("decoder block " + std::to_string(block_id) + " is not in the insertion map");
    Matrix s = cross_attention(latent, feats.text_tokens, block, Branch::base);
    if (!*enabled)
        return s;
    const Matrix s_ctrl = cross_attention(latent, feats.ctrl_features.tokens(), block, Branch::ctrl);
    const Matrix s_glyph = cross_attention(latent, feats.glyph_features, block, Branch::glyph);
    return tca_combine(s, s_ctrl, s_glyph, cfg);
}

/// Replaces the caption rows covered by glyph_span with the aligned glyph
/// features (glyph_feature · align_proj). Rows outside the span are copied
/// unchanged.
inline CaptionEmbedding fuse_glyph_embedding(const CaptionEmbedding& caption, const Matrix& glyph_feature,
                                             const Matrix& align_proj) {
    const auto& span = caption.glyph_span;
    if (span.start > caption.tokens.rows() || span.length > caption.tokens.rows() - span.start)
        throw ShapeError("glyph span [" + std::to_string(span.start) + ", +" + std::to_string(span.length) +
                         ") exceeds " + std::to_string(caption.tokens.rows()) + " caption tokens");
    if (glyph_feature.rows() != span.length)
        throw ShapeError("glyph feature rows " + std::to_string(glyph_feature.rows()) + " != span length " +
                         std::to_string(span.length));
    CaptionEmbedding out = caption;
    if (span.length == 0)
        return out;
    const Matrix aligned = matmul(glyph_feature, align_proj);
    if (aligned.cols() != caption.tokens.cols())
        throw ShapeError("aligned glyph width " + std::to_string(aligned.cols()) + " != token width " +
                         std::to_string(caption.tokens.cols()));
    for (std::size_t r = 0; r < span.length; ++r) {
        auto dst = out.tokens.row(span.start + r);
        auto src = aligned.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

}  // namespace glyphdraw
