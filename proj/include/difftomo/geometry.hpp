#pragma once

#include <nlohmann/json_fwd.hpp>

#include "difftomo/types.hpp"

namespace difftomo {

/// Full description of the fan-beam acquisition system. Distances in mm.
/// The source rotates counterclockwise on a circle of radius
/// source_to_center_mm, starting on the +y axis; detector elements sit on an
/// arc centered at the source at equal angular increments
/// detector_spacing_mm / source_to_detector_mm, centered on the
/// source-isocenter axis.
struct FanBeamGeometry {
    double source_to_center_mm = 1150.0;
    double source_to_detector_mm = 1772.0;
    int n_detectors = 528;
    double detector_spacing_mm = 1.25;
    int n_views = 800;
    int image_size_px = 256;
    double pixel_spacing_mm = 2.148;
    int view_subsample_stride = 1;

    /// Views kept after subsampling: i * stride for i = 0.. while < n_views.
    int effective_n_views() const {
        return (n_views + view_subsample_stride - 1) / view_subsample_stride;
    }

    /// Gantry angle (radians) of effective view index v.
    double view_angle(int v) const;

    /// Throws InvalidInput if any invariant is violated.
    void validate() const;
};

void to_json(nlohmann::json& j, const FanBeamGeometry& g);
void from_json(const nlohmann::json& j, const FanBeamGeometry& g) = delete;
FanBeamGeometry geometry_from_json(const nlohmann::json& j);

/// Fan-beam forward projection: y[v, d] is the line integral of the image
/// along the ray from the source at view v to detector element d, with
/// Siddon-style exact pixel intersection lengths (mm).
Sinogram project(const FanBeamGeometry& geom, const Image& image);

/// Exact adjoint of project (identical ray weights), so that
/// <A x, s> == <x, A^T s> up to floating-point rounding.
Image backproject(const FanBeamGeometry& geom, const Sinogram& sino);

/// Keeps views with index == 0 (mod stride) from a full sinogram.
Sinogram subsample_views(const Sinogram& sino_full, int stride);

}  // namespace difftomo
