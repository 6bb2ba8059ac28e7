#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>

#include "glyphdraw/attention.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/linalg.hpp"

namespace glyphdraw {

struct DiffusionSample {
    Matrix z_t;
    std::size_t t = 0;
    Matrix noise;
    ConditionFeatures cond;
};

enum class AalAggregation { sum, mean };

struct LossConfig {
    double lambda = 0.1;  // no published value; arbitrary default
    AalAggregation aggregation = AalAggregation::sum;
};

enum class AalParam { q, k, v, k_c, v_c };

inline const char* to_string(AalParam p) noexcept {
    switch (p) {
    case AalParam::q: return "q";
    case AalParam::k: return "k";
    case AalParam::v: return "v";
    case AalParam::k_c: return "k_c";
    case AalParam::v_c: return "v_c";
    }
    return "?";
}

namespace detail {

inline void check_aal_shapes(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& k_c, const Matrix& v_c,
                             std::size_t key_dim) {
    if (key_dim == 0)
        throw ShapeError("aal: key_dim must be positive");
    if (q.rows() == 0 || k.rows() == 0 || k_c.rows() == 0)
        throw ShapeError("aal: empty query or key");
    if (k.cols() != q.cols() || k_c.cols() != q.cols())
        throw ShapeError("aal: key widths " + k.shape() + ", " + k_c.shape() + " vs query " + q.shape());
    if (v.rows() != k.rows() || v_c.rows() != k_c.rows())
        throw ShapeError("aal: value rows " + v.shape() + ", " + v_c.shape() + " vs keys " + k.shape() + ", " +
                         k_c.shape());
    if (v.cols() != v_c.cols())
        throw ShapeError("aal: value widths " + v.shape() + " vs " + v_c.shape());
}

inline Matrix attention_weights(const Matrix& q, const Matrix& k, std::size_t key_dim) {
    return row_softmax(scaled(matmul_bt(q, k), 1.0 / std::sqrt(static_cast<double>(key_dim))));
}

// Backprop through P = softmax(Z) row-wise: dZ = P ⊙ (dP − rowsum(dP ⊙ P)).
inline Matrix softmax_backward(const Matrix& p, const Matrix& dp) {
    Matrix dz(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const auto pr = p.row(i);
        const auto dr = dp.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < pr.size(); ++j)
            dot += pr[j] * dr[j];
        for (std::size_t j = 0; j < pr.size(); ++j)
            dz(i, j) = pr[j] * (dr[j] - dot);
    }
    return dz;
}

#ifdef GLYPHDRAW_INJECT_GRAD_FAULT
inline constexpr double grad_fault_scale = 1.01;
#else
inline constexpr double grad_fault_scale = 1.0;
#endif

}  // namespace detail

/// ‖softmax(q kᵀ/√d) v − softmax(q k_cᵀ/√d) v_c‖_F, with q, k, v already
/// projected. k_c, v_c come from the frozen duplicate of the decoder.
inline double aal_loss(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& k_c, const Matrix& v_c,
                       std::size_t key_dim) {
    detail::check_aal_shapes(q, k, v, k_c, v_c, key_dim);
    const Matrix live = matmul(detail::attention_weights(q, k, key_dim), v);
    const Matrix frozen = matmul(detail::attention_weights(q, k_c, key_dim), v_c);
    return frobenius_norm(live - frozen);
}

/// Analytic gradient of aal_loss with respect to one of its inputs.
inline Matrix aal_grad(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& k_c, const Matrix& v_c,
                       std::size_t key_dim, AalParam wrt) {
    detail::check_aal_shapes(q, k, v, k_c, v_c, key_dim);
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(key_dim));
    const Matrix a = detail::attention_weights(q, k, key_dim);
    const Matrix b = detail::attention_weights(q, k_c, key_dim);
    const Matrix diff = matmul(a, v) - matmul(b, v_c);
    const double loss = frobenius_norm(diff);
    if (loss == 0.0)
        throw SingularityError("aal_grad: loss is zero, the norm is not differentiable there");
    const Matrix g = scaled(diff, detail::grad_fault_scale / loss);  // dL/d(diff)

    switch (wrt) {
    case AalParam::v: return matmul(transpose(a), g);
    case AalParam::v_c: return scaled(matmul(transpose(b), g), -1.0);
    default: break;
    }
    const Matrix dz_live = scaled(detail::softmax_backward(a, matmul_bt(g, v)), inv_scale);
    const Matrix dz_frozen = scaled(detail::softmax_backward(b, matmul_bt(g, v_c)), -inv_scale);
    switch (wrt) {
    case AalParam::k: return matmul(transpose(dz_live), q);
    case AalParam::k_c: return matmul(transpose(dz_frozen), q);
    default: return matmul(dz_live, k) + matmul(dz_frozen, k_c);
    }
}

/// Gradient with respect to a right-multiplied projection W, given the
/// gradient with respect to its output (cond · W).
inline Matrix projection_grad(const Matrix& cond, const Matrix& d_output) { return matmul(transpose(cond), d_output); }

/// Mean of squared entry differences.
inline double diffusion_mse(const Matrix& noise, const Matrix& predicted) {
    if (!noise.same_shape(predicted))
        throw ShapeError("diffusion_mse: " + noise.shape() + " vs " + predicted.shape());
    if (noise.empty())
        throw ShapeError("diffusion_mse: empty matrices");
    double s = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const double d = noise.data()[i] - predicted.data()[i];
        s += d * d;
    }
    return s / static_cast<double>(noise.size());
}

/// diffusion_mse + λ · aggregate(aal_terms).
inline double total_loss(const DiffusionSample& sample, const Matrix& predicted, std::span<const double> aal_terms,
                         const LossConfig& cfg) {
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
        throw DomainError("total_loss: lambda must be finite and >= 0");
    if (!sample.noise.same_shape(sample.z_t))
        throw ShapeError("total_loss: noise " + sample.noise.shape() + " vs z_t " + sample.z_t.shape());
    double agg = 0.0;
    for (std::size_t i = 0; i < aal_terms.size(); ++i) {
        if (!(aal_terms[i] >= 0.0))
            throw DomainError("total_loss: alignment term " + std::to_string(i) + " is negative or NaN");
        agg += aal_terms[i];
    }
    if (cfg.aggregation == AalAggregation::mean && !aal_terms.empty())
        agg /= static_cast<double>(aal_terms.size());
    return diffusion_mse(sample.noise, predicted) + cfg.lambda * agg;
}

}  // namespace glyphdraw
