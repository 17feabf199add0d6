#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcs/types.hpp"

namespace qcs {

using Polyline = std::vector<cpx>;

/// 15 significant digits, the fixed CSV float format.
std::string fmt15(double v);

/// Every k-th vertex (plus the last) so that at most max_points remain.
Polyline decimate(const Polyline& line, std::size_t max_points = 100'000);

/// Header "curve,index,re,im".
void write_polylines_csv(std::ostream& os, const std::vector<Polyline>& lines);

/// Polylines only, y axis pointing up, viewBox from the data bounds.
void write_polylines_svg(std::ostream& os, const std::vector<Polyline>& lines);

struct BoundingBox {
    double min_re, max_re, min_im, max_im;
};
BoundingBox bounding_box(const std::vector<Polyline>& lines);

/// Parameters, outputs and counters of one CLI run, written beside outputs.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
    nlohmann::ordered_json counters = nlohmann::ordered_json::object();
    double wall_seconds = 0.0;

    nlohmann::ordered_json to_json() const;
};

}  // namespace qcs
