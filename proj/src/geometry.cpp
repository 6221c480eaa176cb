#include "difftomo/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

#include "difftomo/parallel.hpp"

namespace difftomo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Ray {
    double sx, sy;  // source (mm)
    double dx, dy;  // detector element (mm)
};

Ray make_ray(const FanBeamGeometry& g, int view, int det) {
    const double phi = g.view_angle(view);
    const double sx = -g.source_to_center_mm * std::sin(phi);
    const double sy = g.source_to_center_mm * std::cos(phi);
    // Central ray direction: source toward isocenter.
    const double cx = std::sin(phi);
    const double cy = -std::cos(phi);
    const double dpsi = g.detector_spacing_mm / g.source_to_detector_mm;
    const double psi = (det - 0.5 * (g.n_detectors - 1)) * dpsi;
    const double c = std::cos(psi), s = std::sin(psi);
    const double rx = c * cx - s * cy;
    const double ry = s * cx + c * cy;
    return Ray{sx, sy, sx + g.source_to_detector_mm * rx, sy + g.source_to_detector_mm * ry};
}

// Walks the pixel grid along the ray, calling visit(pixel_index, length_mm)
// with the exact intersection length of each crossed pixel. Grid coordinates:
// gx = x/spacing + N/2 (column axis), gy = N/2 - y/spacing (row axis), so
// pixel (r, c) covers [c, c+1] x [r, r+1].
template <typename Visit>
void traverse_ray(const FanBeamGeometry& g, const Ray& ray, Visit&& visit) {
    const int n = g.image_size_px;
    const double inv_sp = 1.0 / g.pixel_spacing_mm;
    const double half = 0.5 * n;

    const double p0x = ray.sx * inv_sp + half;
    const double p0y = half - ray.sy * inv_sp;
    const double p1x = ray.dx * inv_sp + half;
    const double p1y = half - ray.dy * inv_sp;
    const double dx = p1x - p0x;
    const double dy = p1y - p0y;

    const double len_mm =
        std::sqrt((ray.dx - ray.sx) * (ray.dx - ray.sx) + (ray.dy - ray.sy) * (ray.dy - ray.sy));

    double t_lo = 0.0, t_hi = 1.0;
    const double inf = std::numeric_limits<double>::infinity();
    auto clip_axis = [&](double p0, double d) {
        if (d == 0.0) {
            if (p0 <= 0.0 || p0 >= n) t_lo = inf;  // parallel, outside the slab
            return;
        }
        double a = (0.0 - p0) / d;
        double b = (static_cast<double>(n) - p0) / d;
        if (a > b) std::swap(a, b);
        if (a > t_lo) t_lo = a;
        if (b < t_hi) t_hi = b;
    };
    clip_axis(p0x, dx);
    clip_axis(p0y, dy);
    if (!(t_lo < t_hi)) return;

    // Entry cell.
    auto cell_of = [n](double f) {
        int i = static_cast<int>(std::floor(f));
        if (i < 0) i = 0;
        if (i > n - 1) i = n - 1;
        return i;
    };
    int ix = cell_of(p0x + t_lo * dx);
    int iy = cell_of(p0y + t_lo * dy);

    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    const double dt_x = dx != 0.0 ? std::abs(1.0 / dx) : inf;
    const double dt_y = dy != 0.0 ? std::abs(1.0 / dy) : inf;

    double t_next_x = inf, t_next_y = inf;
    if (dx != 0.0) {
        t_next_x = ((ix + (step_x > 0 ? 1 : 0)) - p0x) / dx;
        while (t_next_x <= t_lo && ix + step_x >= 0 && ix + step_x <= n - 1) {
            ix += step_x;
            t_next_x += dt_x;
        }
    }
    if (dy != 0.0) {
        t_next_y = ((iy + (step_y > 0 ? 1 : 0)) - p0y) / dy;
        while (t_next_y <= t_lo && iy + step_y >= 0 && iy + step_y <= n - 1) {
            iy += step_y;
            t_next_y += dt_y;
        }
    }

    double t_cur = t_lo;
    while (t_cur < t_hi) {
        double t_exit = t_next_x < t_next_y ? t_next_x : t_next_y;
        if (t_exit > t_hi) t_exit = t_hi;
        const double w = (t_exit - t_cur) * len_mm;
        if (w > 0.0) visit(static_cast<size_t>(iy) * n + ix, w);
        if (t_exit >= t_hi) break;
        if (t_next_x <= t_exit) {
            ix += step_x;
            t_next_x += dt_x;
            if (ix < 0 || ix >= n) break;
        }
        if (t_next_y <= t_exit) {
            iy += step_y;
            t_next_y += dt_y;
            if (iy < 0 || iy >= n) break;
        }
        t_cur = t_exit;
    }
}
}  // namespace

double FanBeamGeometry::view_angle(int v) const {
    return kTwoPi * static_cast<double>(v) * view_subsample_stride / n_views;
}

void FanBeamGeometry::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidInput("geometry: " + msg); };
    if (source_to_center_mm <= 0 || source_to_detector_mm <= 0 || detector_spacing_mm <= 0 ||
        pixel_spacing_mm <= 0)
        fail("all distances must be positive");
    if (n_detectors < 1 || n_views < 1 || image_size_px < 1) fail("all counts must be positive");
    if (view_subsample_stride < 1) fail("view_subsample_stride must be >= 1");
    if (source_to_detector_mm <= source_to_center_mm)
        fail("source_to_detector_mm must exceed source_to_center_mm");
    if (source_to_center_mm <= image_size_px * pixel_spacing_mm / 2.0)
        fail("source must lie outside the image disk");
}

void to_json(nlohmann::json& j, const FanBeamGeometry& g) {
    j = nlohmann::json{{"source_to_center_mm", g.source_to_center_mm},
                       {"source_to_detector_mm", g.source_to_detector_mm},
                       {"n_detectors", g.n_detectors},
                       {"detector_spacing_mm", g.detector_spacing_mm},
                       {"n_views", g.n_views},
                       {"image_size_px", g.image_size_px},
                       {"pixel_spacing_mm", g.pixel_spacing_mm},
                       {"view_subsample_stride", g.view_subsample_stride}};
}

FanBeamGeometry geometry_from_json(const nlohmann::json& j) {
    FanBeamGeometry g;
    g.source_to_center_mm = j.at("source_to_center_mm").get<double>();
    g.source_to_detector_mm = j.at("source_to_detector_mm").get<double>();
    g.n_detectors = j.at("n_detectors").get<int>();
    g.detector_spacing_mm = j.at("detector_spacing_mm").get<double>();
    g.n_views = j.at("n_views").get<int>();
    g.image_size_px = j.at("image_size_px").get<int>();
    g.pixel_spacing_mm = j.at("pixel_spacing_mm").get<double>();
    g.view_subsample_stride = j.value("view_subsample_stride", 1);
    g.validate();
    return g;
}

Sinogram project(const FanBeamGeometry& geom, const Image& image) {
    geom.validate();
    if (image.size_px != geom.image_size_px)
        throw InvalidInput("project: image size " + std::to_string(image.size_px) +
                           " does not match geometry " + std::to_string(geom.image_size_px));

    const int n_views = geom.effective_n_views();
    const int n_det = geom.n_detectors;
    Sinogram sino(n_views, n_det);
    const double* img = image.data.data();

    parallel_for(static_cast<size_t>(n_views), 4, [&](size_t v) {
        double* row = &sino.data[v * n_det];
        for (int d = 0; d < n_det; ++d) {
            double acc = 0.0;
            traverse_ray(geom, make_ray(geom, static_cast<int>(v), d),
                         [&](size_t p, double w) { acc += img[p] * w; });
            row[d] = acc;
        }
    });
    return sino;
}

Image backproject(const FanBeamGeometry& geom, const Sinogram& sino) {
    geom.validate();
    if (sino.n_views_effective != geom.effective_n_views() || sino.n_detectors != geom.n_detectors)
        throw InvalidInput("backproject: sinogram dims (" +
                           std::to_string(sino.n_views_effective) + " x " +
                           std::to_string(sino.n_detectors) + ") do not match geometry");

    const int n_det = geom.n_detectors;
    const size_t n_px = static_cast<size_t>(geom.image_size_px) * geom.image_size_px;

    // One partial image per block of views, merged in block order so the
    // reduction order is independent of the thread count.
    const size_t n_views = static_cast<size_t>(sino.n_views_effective);
    const size_t n_blocks = block_count(n_views, 4);
    std::vector<std::vector<double>> partials(n_blocks);

    parallel_for_blocks(n_views, 4, [&](size_t block, size_t begin, size_t end) {
        auto& part = partials[block];
        part.assign(n_px, 0.0);
        for (size_t v = begin; v < end; ++v) {
            const double* row = &sino.data[v * n_det];
            for (int d = 0; d < n_det; ++d) {
                const double s = row[d];
                traverse_ray(geom, make_ray(geom, static_cast<int>(v), d),
                             [&](size_t p, double w) { part[p] += s * w; });
            }
        }
    });

    Image out(geom.image_size_px);
    for (size_t b = 0; b < n_blocks; ++b)
        for (size_t p = 0; p < n_px; ++p) out.data[p] += partials[b][p];
    return out;
}

Sinogram subsample_views(const Sinogram& sino_full, int stride) {
    if (stride < 1) throw InvalidInput("subsample_views: stride must be >= 1");
    const int kept = (sino_full.n_views_effective + stride - 1) / stride;
    Sinogram out(kept, sino_full.n_detectors);
    for (int i = 0; i < kept; ++i) {
        const size_t src = static_cast<size_t>(i) * stride * sino_full.n_detectors;
        const size_t dst = static_cast<size_t>(i) * sino_full.n_detectors;
        for (int d = 0; d < sino_full.n_detectors; ++d) out.data[dst + d] = sino_full.data[src + d];
    }
    return out;
}

}  // namespace difftomo
