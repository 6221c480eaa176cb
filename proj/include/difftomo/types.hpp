#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace difftomo {

/// Thrown when an operation receives input violating its preconditions
/// (shape mismatches, out-of-range timesteps, bad strides, ...).
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when an iterative solve detects divergence (sustained loss
/// increase or non-finite values).
struct Diverged : std::runtime_error {
    explicit Diverged(const std::string& msg) : std::runtime_error(msg) {}
};

/// 2D scalar field on a square pixel grid, row-major, in normalized
/// intensity units. value_range_hu records which HU window maps to [-1, 1].
struct Image {
    int size_px = 0;
    std::vector<double> data;
    std::array<double, 2> value_range_hu{-500.0, 200.0};

    Image() = default;
    explicit Image(int n, double fill = 0.0)
        : size_px(n), data(static_cast<size_t>(n) * static_cast<size_t>(n), fill) {}

    double& at(int row, int col) { return data[static_cast<size_t>(row) * size_px + col]; }
    double at(int row, int col) const { return data[static_cast<size_t>(row) * size_px + col]; }
    size_t pixel_count() const { return data.size(); }
};

/// Fan-beam projection data, row-major with the view index major.
struct Sinogram {
    int n_views_effective = 0;
    int n_detectors = 0;
    std::vector<double> data;

    Sinogram() = default;
    Sinogram(int views, int dets, double fill = 0.0)
        : n_views_effective(views), n_detectors(dets),
          data(static_cast<size_t>(views) * static_cast<size_t>(dets), fill) {}

    double& at(int view, int det) { return data[static_cast<size_t>(view) * n_detectors + det]; }
    double at(int view, int det) const { return data[static_cast<size_t>(view) * n_detectors + det]; }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2_squared(const std::vector<double>& a) { return dot(a, a); }

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// y += c * x
inline void add_scaled(std::vector<double>& y, double c, const std::vector<double>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

inline bool all_finite(const std::vector<double>& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace difftomo
