#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qhgeo/geodesic.hpp"
#include "qhgeo/theorems.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

// field order is fixed throughout so serialized bytes are reproducible
using ordered_json = nlohmann::ordered_json;

ordered_json domain_to_json(const VoronoiDomain& d);

// accepts {"nuclei": [[x,y], ...]} or
// {"polygon": {"closed": true, "points": [...]}, "samples_per_unit": s}
VoronoiDomain domain_from_json(const ordered_json& j);

// nuclei placed on the polygon with spacing <= 1/samples_per_unit; vertices
// always included; per-edge counts double with level, so level k+1 nuclei
// contain level k's (a decreasing domain sequence with nested boundaries)
std::vector<Vec2> sample_polygon(const Polyline& poly, double samples_per_unit,
                                 int level = 0);

// >= 3 vertices, closed, consecutive vertices distinct, no self-intersection
void require_simple_polygon(const Polyline& poly);

ordered_json path_to_json(const GeodesicPath& g);
GeodesicPath path_from_json(const ordered_json& j);

ordered_json connect_to_json(const ConnectResult& r);
ordered_json report_to_json(const VerificationReport& r);

ordered_json polyline_to_json(const Polyline& p);
Polyline polyline_from_json(const ordered_json& j);

std::string to_csv(const Polyline& p);
std::string ball_to_csv(const QhBall& b);  // phi,x,y per boundary sample

}  // namespace qhgeo
