#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "commands.hpp"

namespace prym::cli {

namespace {

using Float = boost::multiprecision::cpp_dec_float_100;

Float to_float(const Rational& q) {
  return Float(q.get_num().get_str()) / Float(q.get_den().get_str());
}

Float to_float(const QuadElem& x) {
  Float v = to_float(x.a());
  if (sgn(x.b()) != 0) v += to_float(x.b()) * boost::multiprecision::sqrt(Float(x.radicand()));
  return v;
}

struct Point {
  double x, y;
};

Point to_point(const Vec2& v) {
  return {static_cast<double>(to_float(v.x)), static_cast<double>(to_float(v.y))};
}

std::string hue_colour(int k, int n, int lightness) {
  std::ostringstream os;
  os << "hsl(" << (n > 0 ? (k * 360) / n : 0) << ",70%," << lightness << "%)";
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << (std::abs(v) < 5e-4 ? 0.0 : v);
  return os.str();
}

} // namespace

std::string high_precision(const QuadElem& x, int digits) {
  return to_float(x).str(digits);
}

std::string render_svg(const TranslationSurface& surface, const std::vector<CylinderRegion>& regions) {
  const int np = surface.num_polygons();
  std::vector<std::vector<Point>> pts(np);
  std::vector<double> minx(np), maxx(np), miny(np), maxy(np);
  double span = 0;
  for (int p = 0; p < np; ++p) {
    for (const Vec2& v : surface.polygon(p).vertices()) pts[p].push_back(to_point(v));
    auto [lo_x, hi_x] = std::minmax_element(pts[p].begin(), pts[p].end(), [](Point a, Point b) { return a.x < b.x; });
    auto [lo_y, hi_y] = std::minmax_element(pts[p].begin(), pts[p].end(), [](Point a, Point b) { return a.y < b.y; });
    minx[p] = lo_x->x;
    maxx[p] = hi_x->x;
    miny[p] = lo_y->y;
    maxy[p] = hi_y->y;
    span = std::max({span, maxx[p] - minx[p], maxy[p] - miny[p]});
  }
  const double gap = 0.25 * span;
  std::vector<double> offset(np);
  double width = gap, height = 0;
  for (int p = 0; p < np; ++p) {
    offset[p] = width - minx[p];
    width += maxx[p] - minx[p] + gap;
    height = std::max(height, maxy[p] - miny[p]);
  }
  height += 2 * gap;
  const double scale = 800.0 / width;
  double top = 0;
  for (int p = 0; p < np; ++p) top = std::max(top, maxy[p]);
  auto sx = [&](int p, double x) { return fmt((x + offset[p]) * scale); };
  auto sy = [&](double y) { return fmt((top + gap - y) * scale); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << fmt(height * scale)
     << "\" viewBox=\"0 0 800 " << fmt(height * scale) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  int cylinders = 0;
  for (const auto& r : regions) cylinders = std::max(cylinders, r.cylinder + 1);
  for (const auto& r : regions) {
    os << "<polygon class=\"cylinder\" data-cylinder=\"" << r.cylinder << "\" fill=\"" << hue_colour(r.cylinder, cylinders, 80)
       << "\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < r.vertices.size(); ++k) {
      const Point q = to_point(r.vertices[k]);
      os << (k ? " " : "") << sx(r.polygon, q.x) << "," << sy(q.y);
    }
    os << "\"/>\n";
  }

  const Gluing pairs = surface.gluing();
  std::vector<std::vector<int>> pair_of(np);
  for (int p = 0; p < np; ++p) pair_of[p].assign(surface.polygon(p).size(), -1);
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    pair_of[pairs[k].first.polygon][pairs[k].first.edge] = k;
    pair_of[pairs[k].second.polygon][pairs[k].second.edge] = k;
  }
  const int npairs = static_cast<int>(pairs.size());
  for (int p = 0; p < np; ++p) {
    os << "<polygon class=\"face\" data-polygon=\"" << p << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
    for (std::size_t k = 0; k < pts[p].size(); ++k) os << (k ? " " : "") << sx(p, pts[p][k].x) << "," << sy(pts[p][k].y);
    os << "\"/>\n";
    const int n = static_cast<int>(pts[p].size());
    for (int e = 0; e < n; ++e) {
      const Point a = pts[p][e], b = pts[p][(e + 1) % n];
      const int k = pair_of[p][e];
      os << "<line class=\"edge\" data-pair=\"" << k << "\" stroke=\"" << hue_colour(k, npairs, 40)
         << "\" stroke-width=\"3\" x1=\"" << sx(p, a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(p, b.x) << "\" y2=\""
         << sy(b.y) << "\"/>\n";
      os << "<text font-size=\"12\" text-anchor=\"middle\" x=\"" << sx(p, (a.x + b.x) / 2) << "\" y=\""
         << sy((a.y + b.y) / 2) << "\">" << k << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace prym::cli
