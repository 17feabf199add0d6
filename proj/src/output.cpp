#include "qcs/output.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace qcs {

std::string fmt15(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

Polyline decimate(const Polyline& line, std::size_t max_points) {
    if (line.size() <= max_points || max_points < 2) return line;
    std::size_t k = (line.size() - 1 + max_points - 2) / (max_points - 1);
    Polyline out;
    out.reserve(line.size() / k + 2);
    for (std::size_t i = 0; i < line.size(); i += k) out.push_back(line[i]);
    if ((line.size() - 1) % k != 0) out.push_back(line.back());
    return out;
}

void write_polylines_csv(std::ostream& os, const std::vector<Polyline>& lines) {
    os << "curve,index,re,im\n";
    for (std::size_t c = 0; c < lines.size(); ++c)
        for (std::size_t i = 0; i < lines[c].size(); ++i)
            os << c << ',' << i << ',' << fmt15(lines[c][i].real()) << ',' << fmt15(lines[c][i].imag()) << '\n';
}

BoundingBox bounding_box(const std::vector<Polyline>& lines) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    BoundingBox b{inf, -inf, inf, -inf};
    for (const auto& l : lines)
        for (cpx z : l) {
            b.min_re = std::min(b.min_re, z.real());
            b.max_re = std::max(b.max_re, z.real());
            b.min_im = std::min(b.min_im, z.imag());
            b.max_im = std::max(b.max_im, z.imag());
        }
    return b;
}

void write_polylines_svg(std::ostream& os, const std::vector<Polyline>& lines) {
    BoundingBox b = bounding_box(lines);
    if (!(b.max_re >= b.min_re)) b = {-1, 1, -1, 1};
    double span = std::max({b.max_re - b.min_re, b.max_im - b.min_im, 1e-12});
    double pad = 0.02 * span;
    double x0 = b.min_re - pad, y0 = -b.max_im - pad;
    double wd = b.max_re - b.min_re + 2 * pad, ht = b.max_im - b.min_im + 2 * pad;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt15(x0) << ' ' << fmt15(y0) << ' '
       << fmt15(wd) << ' ' << fmt15(ht) << "\">\n";
    for (const auto& l : lines) {
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt15(span / 800) << "\" points=\"";
        for (std::size_t i = 0; i < l.size(); ++i)
            os << (i ? " " : "") << fmt15(l[i].real()) << ',' << fmt15(-l[i].imag());
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["outputs"] = outputs;
    j["counters"] = counters;
    j["wall_seconds"] = wall_seconds;
    return j;
}

}  // namespace qcs
