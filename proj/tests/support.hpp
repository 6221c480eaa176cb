#pragma once

// Shared test oracles. Everything here is deliberately independent of the
// library's computation paths: dense operators are materialized column by
// column, eigenvalues come from a plain Jacobi sweep, and derivatives from
// central differences.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "difftomo/geometry.hpp"
#include "difftomo/rng.hpp"
#include "difftomo/types.hpp"

namespace testsupport {

using difftomo::FanBeamGeometry;
using difftomo::Image;
using difftomo::Sinogram;

/// Dense system matrix built by projecting every basis image.
/// Layout: rows = (view * n_detectors + det), cols = pixel index.
struct DenseOperator {
    size_t n_rows = 0;
    size_t n_cols = 0;
    std::vector<double> a;  // row-major

    double at(size_t r, size_t c) const { return a[r * n_cols + c]; }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n_rows, 0.0);
        for (size_t r = 0; r < n_rows; ++r) {
            double s = 0.0;
            for (size_t c = 0; c < n_cols; ++c) s += a[r * n_cols + c] * x[c];
            y[r] = s;
        }
        return y;
    }

    std::vector<double> apply_transpose(const std::vector<double>& y) const {
        std::vector<double> x(n_cols, 0.0);
        for (size_t r = 0; r < n_rows; ++r)
            for (size_t c = 0; c < n_cols; ++c) x[c] += a[r * n_cols + c] * y[r];
        return x;
    }
};

inline DenseOperator materialize_dense(const FanBeamGeometry& geom) {
    DenseOperator op;
    op.n_cols = static_cast<size_t>(geom.image_size_px) * geom.image_size_px;
    op.n_rows = static_cast<size_t>(geom.effective_n_views()) * geom.n_detectors;
    op.a.assign(op.n_rows * op.n_cols, 0.0);
    Image basis(geom.image_size_px);
    for (size_t c = 0; c < op.n_cols; ++c) {
        basis.data.assign(op.n_cols, 0.0);
        basis.data[c] = 1.0;
        Sinogram col = difftomo::project(geom, basis);
        for (size_t r = 0; r < op.n_rows; ++r) op.a[r * op.n_cols + c] = col.data[r];
    }
    return op;
}

/// Largest eigenvalue of the symmetric matrix m (row-major n x n) by cyclic
/// Jacobi rotations.
inline double jacobi_max_eigenvalue(std::vector<double> m, size_t n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += m[p * n + q] * m[p * n + q];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p], mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k], mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    double lam = m[0];
    for (size_t i = 1; i < n; ++i) lam = std::max(lam, m[i * n + i]);
    return lam;
}

/// Largest singular value of a DenseOperator via Jacobi on A^T A.
inline double dense_opnorm(const DenseOperator& op) {
    const size_t n = op.n_cols;
    std::vector<double> ata(n * n, 0.0);
    for (size_t r = 0; r < op.n_rows; ++r)
        for (size_t i = 0; i < n; ++i) {
            const double ari = op.a[r * n + i];
            if (ari == 0.0) continue;
            for (size_t j = 0; j < n; ++j) ata[i * n + j] += ari * op.a[r * n + j];
        }
    return std::sqrt(jacobi_max_eigenvalue(std::move(ata), n));
}

/// Central-difference directional derivative of a scalar function.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& x, const std::vector<double>& dir,
                           double h) {
    std::vector<double> xp = x, xm = x;
    for (size_t i = 0; i < x.size(); ++i) {
        xp[i] += h * dir[i];
        xm[i] -= h * dir[i];
    }
    return (f(xp) - f(xm)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
    const double denom = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / denom;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline Image random_image(int n, uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Image img(n);
    difftomo::RandomStream rng(seed);
    for (double& v : img.data) v = rng.uniform(lo, hi);
    return img;
}

inline Sinogram random_sinogram(int views, int dets, uint64_t seed) {
    Sinogram s(views, dets);
    difftomo::RandomStream rng(seed);
    for (double& v : s.data) v = rng.uniform(-1.0, 1.0);
    return s;
}

/// Small geometry whose detector arc covers the whole image square.
inline FanBeamGeometry tiny_geometry(int image_px, int views, int dets) {
    FanBeamGeometry g;
    g.image_size_px = image_px;
    g.pixel_spacing_mm = 1.0;
    g.n_views = views;
    g.n_detectors = dets;
    g.source_to_center_mm = image_px * 4.0;
    g.source_to_detector_mm = image_px * 7.0;
    // Half fan angle that covers the image diagonal with ~20% margin.
    const double half_diag = image_px * 0.7071 * 1.2;
    const double arc = 2.0 * std::asin(half_diag / g.source_to_center_mm);
    g.detector_spacing_mm = arc * g.source_to_detector_mm / dets;
    return g;
}

/// Desk-scale geometry used across tests: 64 px / 180 views / 128 detectors.
inline FanBeamGeometry desk_geometry(int image_px = 64, int views = 180, int dets = 128,
                                     int stride = 1) {
    FanBeamGeometry g;
    g.image_size_px = image_px;
    g.pixel_spacing_mm = 3.0;
    g.n_views = views;
    g.n_detectors = dets;
    g.source_to_center_mm = 600.0;
    g.source_to_detector_mm = 1000.0;
    g.detector_spacing_mm = 4.0;
    g.view_subsample_stride = stride;
    return g;
}

}  // namespace testsupport
