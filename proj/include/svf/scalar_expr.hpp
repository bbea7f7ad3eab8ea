#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "svf/error.hpp"

namespace svf {

/// Scalar function drawn from a fixed, serializable catalogue. Map-family
/// descriptors embed these so experiment configs can round-trip through
/// text; arbitrary callables would not survive serialization.
class ScalarExpr {
public:
    enum class Kind { poly, sine, sin_reciprocal, sqrt_affine, abs_affine, piecewise };

    /// c0 + c1 u + c2 u^2 + ...
    static ScalarExpr poly(std::vector<double> coeffs) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        ScalarExpr e(Kind::poly);
        e.params_ = std::move(coeffs);
        return e;
    }

    static ScalarExpr constant(double c) { return poly({c}); }
    static ScalarExpr identity() { return poly({0.0, 1.0}); }

    /// a * sin(f u + p)
    static ScalarExpr sine(double amplitude, double frequency, double phase = 0.0) {
        ScalarExpr e(Kind::sine);
        e.params_ = {amplitude, frequency, phase};
        return e;
    }

    /// a * sin(1/u) for u != 0, 0 at u = 0.
    static ScalarExpr sin_reciprocal(double amplitude = 1.0) {
        ScalarExpr e(Kind::sin_reciprocal);
        e.params_ = {amplitude};
        return e;
    }

    /// s * sqrt(max(u - shift, 0))
    static ScalarExpr sqrt_affine(double scale = 1.0, double shift = 0.0) {
        ScalarExpr e(Kind::sqrt_affine);
        e.params_ = {scale, shift};
        return e;
    }

    /// s * |u - center|
    static ScalarExpr abs_affine(double scale = 1.0, double center = 0.0) {
        ScalarExpr e(Kind::abs_affine);
        e.params_ = {scale, center};
        return e;
    }

    /// Piecewise-linear interpolation through (knots[i], values[i]);
    /// constant extrapolation outside the knot range.
    static ScalarExpr piecewise(std::vector<double> knots, std::vector<double> values) {
        if (knots.size() != values.size() || knots.size() < 2)
            throw error("ScalarExpr::piecewise: need matching knots/values, at least 2");
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i - 1] < knots[i]))
                throw error("ScalarExpr::piecewise: knots must be strictly increasing");
        ScalarExpr e(Kind::piecewise);
        e.params_ = std::move(knots);
        e.params2_ = std::move(values);
        return e;
    }

    double operator()(double u) const {
        switch (kind_) {
        case Kind::poly: {
            double acc = 0.0;
            for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * u + *it;
            return acc;
        }
        case Kind::sine:
            return params_[0] * std::sin(params_[1] * u + params_[2]);
        case Kind::sin_reciprocal:
            return u == 0.0 ? 0.0 : params_[0] * std::sin(1.0 / u);
        case Kind::sqrt_affine:
            return params_[0] * std::sqrt(std::max(u - params_[1], 0.0));
        case Kind::abs_affine:
            return params_[0] * std::abs(u - params_[1]);
        case Kind::piecewise: {
            const auto& k = params_;
            const auto& v = params2_;
            if (u <= k.front()) return v.front();
            if (u >= k.back()) return v.back();
            auto it = std::upper_bound(k.begin(), k.end(), u);
            const std::size_t i = static_cast<std::size_t>(it - k.begin());
            const double t = (u - k[i - 1]) / (k[i] - k[i - 1]);
            return v[i - 1] + t * (v[i] - v[i - 1]);
        }
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& params2() const { return params2_; }

    std::string describe() const {
        switch (kind_) {
        case Kind::poly: return "poly";
        case Kind::sine: return "sine";
        case Kind::sin_reciprocal: return "sinrecip";
        case Kind::sqrt_affine: return "sqrt";
        case Kind::abs_affine: return "abs";
        case Kind::piecewise: return "piecewise";
        }
        return "?";
    }

private:
    explicit ScalarExpr(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<double> params_;
    std::vector<double> params2_;
};

} // namespace svf
