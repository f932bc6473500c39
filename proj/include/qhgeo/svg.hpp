#pragma once

#include <string>
#include <vector>

#include "qhgeo/geodesic.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

struct SvgOptions {
    double units_per_length = 1000.0;  // svg units per domain unit
    double margin = 0.1;               // padding in domain units
    int samples_per_path = 512;
    bool draw_edges = true;
    bool draw_nuclei = true;
};

// uniform polyline sampling of a path in its canonical parameter
Polyline sample_path(const GeodesicPath& g, int n = 512);

// deterministic svg: edges, then nuclei, then paths, then bare polylines;
// fixed scale and 3-decimal coordinates keep the bytes reproducible
std::string render_svg(const VoronoiDomain& d, const std::vector<GeodesicPath>& paths,
                       const std::vector<Polyline>& polylines, const SvgOptions& opts = {});

inline std::string render_svg(const VoronoiDomain& d,
                              const std::vector<GeodesicPath>& paths,
                              const SvgOptions& opts = {}) {
    return render_svg(d, paths, {}, opts);
}

}  // namespace qhgeo
