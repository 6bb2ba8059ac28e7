#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "glyphdraw/attention.hpp"
#include "glyphdraw/linalg.hpp"
#include "glyphdraw/losses.hpp"
#include "glyphdraw/record.hpp"
#include "glyphdraw/rng.hpp"

namespace glyphdraw {

struct KernelCheck {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    std::size_t trials = 0;

    bool passed() const noexcept { return max_error <= tolerance; }
};

struct KernelReport {
    std::uint64_t seed = 0;
    std::vector<KernelCheck> checks;

    bool passed() const noexcept {
        for (const auto& c : checks)
            if (!c.passed())
                return false;
        return true;
    }
};

namespace kernel_tolerance {
inline constexpr double reduction = 1e-12;
inline constexpr double aal_zero = 0.0;
inline constexpr double gradient = 1e-4;
inline constexpr double softmax = 1e-12;
}  // namespace kernel_tolerance

/// With β = γ = 0 an enabled block must reproduce plain base attention.
inline KernelCheck check_tca_reduction(Rng& rng, std::size_t trials) {
    KernelCheck c{"tca_reduction", 0.0, kernel_tolerance::reduction, trials};
    TcaConfig cfg;
    cfg.beta = 0.0;
    cfg.gamma = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto latent_dim = static_cast<std::size_t>(rng.uniform_int(2, 8));
        const auto text_dim = static_cast<std::size_t>(rng.uniform_int(2, 8));
        const auto glyph_dim = static_cast<std::size_t>(rng.uniform_int(2, 8));
        const auto key_dim = static_cast<std::size_t>(rng.uniform_int(1, 8));
        const auto value_dim = static_cast<std::size_t>(rng.uniform_int(1, 8));
        const std::size_t patch = 4;
        GlyphImage img(8, 8);
        for (auto& p : img.pixels())
            p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const auto block =
            AttentionBlockState::random(rng, latent_dim, text_dim, patch * patch, glyph_dim, key_dim, value_dim);
        const Matrix latent = Matrix::random(static_cast<std::size_t>(rng.uniform_int(1, 6)), latent_dim, rng);
        const ConditionFeatures feats{Matrix::random(static_cast<std::size_t>(rng.uniform_int(1, 6)), text_dim, rng),
                                      ControlFeatures::from_glyph_image(img, patch),
                                      Matrix::random(static_cast<std::size_t>(rng.uniform_int(1, 6)), glyph_dim, rng)};
        const std::size_t block_id = static_cast<std::size_t>(rng.uniform_int(2, 8));
        const Matrix full = tca_block_forward(latent, feats, block, block_id, cfg);
        const Matrix base = cross_attention(latent, feats.text_tokens, block, Branch::base);
        c.max_error = std::max(c.max_error, max_abs_diff(full, base));
    }
    return c;
}

/// A frozen copy identical to the live branch gives exactly zero loss.
inline KernelCheck check_aal_zero(Rng& rng, std::size_t trials) {
    KernelCheck c{"aal_zero", 0.0, kernel_tolerance::aal_zero, trials};
    for (std::size_t t = 0; t < trials; ++t) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const auto m = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const auto d = static_cast<std::size_t>(rng.uniform_int(1, 8));
        const auto dv = static_cast<std::size_t>(rng.uniform_int(1, 8));
        const Matrix q = Matrix::random(n, d, rng), k = Matrix::random(m, d, rng), v = Matrix::random(m, dv, rng);
        c.max_error = std::max(c.max_error, aal_loss(q, k, v, k, v, d));
    }
    return c;
}

/// Analytic gradient of the alignment loss against central differences
/// on 3-token instances.
inline KernelCheck check_aal_gradient(Rng& rng, std::size_t trials, AalParam wrt) {
    KernelCheck c{std::string("aal_gradient_") + to_string(wrt), 0.0, kernel_tolerance::gradient, trials};
    constexpr std::size_t tokens = 3, d = 4, dv = 4;
    for (std::size_t t = 0; t < trials; ++t) {
        Matrix q = Matrix::random(tokens, d, rng), k = Matrix::random(tokens, d, rng),
               v = Matrix::random(tokens, dv, rng), k_c = Matrix::random(tokens, d, rng),
               v_c = Matrix::random(tokens, dv, rng);
        Matrix* target = wrt == AalParam::q   ? &q
                         : wrt == AalParam::k ? &k
                         : wrt == AalParam::v ? &v
                         : wrt == AalParam::k_c ? &k_c
                                                : &v_c;
        const Matrix analytic = aal_grad(q, k, v, k_c, v_c, d, wrt);
        const Matrix at = *target;
        const Matrix numeric = finite_diff_grad(
            [&](const Matrix& probe) {
                *target = probe;
                return aal_loss(q, k, v, k_c, v_c, d);
            },
            at, default_fd_step);
        *target = at;
        c.max_error = std::max(c.max_error, relative_error(analytic, numeric));
    }
    return c;
}

/// Row sums of row_softmax, including logits of magnitude 1e3.
inline KernelCheck check_softmax(Rng& rng, std::size_t trials) {
    KernelCheck c{"softmax_rows", 0.0, kernel_tolerance::softmax, trials};
    for (std::size_t t = 0; t < trials; ++t) {
        const double scale = t % 2 == 0 ? 1.0 : 1e3;
        const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 8));
        const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 16));
        const Matrix p = row_softmax(Matrix::random(rows, cols, rng, -scale, scale));
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (double x : p.row(i)) {
                if (!std::isfinite(x))
                    s = HUGE_VAL;
                s += x;
            }
            c.max_error = std::max(c.max_error, std::abs(s - 1.0));
        }
    }
    return c;
}

/// Every kernel invariant, each from its own stream derived from seed.
inline KernelReport run_kernel_checks(std::uint64_t seed, std::size_t trials) {
    KernelReport r;
    r.seed = seed;
    std::uint64_t stream = 0;
    auto next_rng = [&] { return Rng(seed * 1000003ULL + stream++); };
    {
        Rng rng = next_rng();
        r.checks.push_back(check_tca_reduction(rng, trials));
    }
    {
        Rng rng = next_rng();
        r.checks.push_back(check_aal_zero(rng, trials));
    }
    for (AalParam p : {AalParam::q, AalParam::k, AalParam::v, AalParam::k_c, AalParam::v_c}) {
        Rng rng = next_rng();
        r.checks.push_back(check_aal_gradient(rng, trials, p));
    }
    {
        Rng rng = next_rng();
        r.checks.push_back(check_softmax(rng, trials));
    }
    return r;
}

inline json kernel_report_to_json(const KernelReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"trials", c.trials},
                          {"max_error", c.max_error},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed()}});
    return {{"seed", r.seed}, {"passed", r.passed()}, {"checks", std::move(checks)}};
}

}  // namespace glyphdraw
