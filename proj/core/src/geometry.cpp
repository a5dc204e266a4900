#include "kac/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "kac/rng.hpp"

namespace kac {

bool element_less(const Element& a, const Element& b) {
  return std::tuple(a.blocks.lo, a.blocks.hi, a.kind, a.sign) <
         std::tuple(b.blocks.lo, b.blocks.hi, b.kind, b.sign);
}

std::vector<InterfacePoint> make_interface_points(const IntervalClassification& cls, const ThetaField& theta) {
  std::vector<InterfacePoint> pts;
  for (std::size_t r = 0; r < cls.rectangles.size(); ++r) {
    if (!cls.interface[r]) continue;
    const BlockInterval q = cls.rectangles[r];
    const Color left = theta.at(q.lo - 1) > 0 ? Color::Red : Color::Blue;
    const Color right = left == Color::Red ? Color::Blue : Color::Red;
    const std::size_t i = pts.size();
    pts.push_back({q.lo, left, i + 1, r, true});
    pts.push_back({q.hi, right, i, r, false});
  }
  return pts;
}

TriangleBuild build_triangles(std::span<const InterfacePoint> points) {
  TriangleBuild out;
  if (points.size() % 2 != 0) throw std::invalid_argument("build_triangles: unpaired interface points");
  // Alive rectangles in left-to-right order, each as (left point, right point).
  std::vector<std::pair<std::size_t, std::size_t>> alive;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].left_end) alive.emplace_back(i, points[i].partner);
  }
  while (alive.size() >= 2) {
    std::size_t best = 0;
    std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
    for (std::size_t a = 0; a + 1 < alive.size(); ++a) {
      const InterfacePoint& ka = points[alive[a].second];
      const InterfacePoint& hb = points[alive[a + 1].first];
      if (ka.color != hb.color) {
        throw std::logic_error("build_triangles: facing points of different colors");
      }
      const std::int64_t gap = hb.position - ka.position;
      const bool better = gap < best_gap ||
                          (gap == best_gap && ka.position < points[alive[best].second].position) ||
                          (gap == best_gap && ka.position == points[alive[best].second].position &&
                           ka.color == Color::Red && points[alive[best].second].color == Color::Blue);
      if (better) {
        best = a;
        best_gap = gap;
      }
    }
    const std::size_t ka = alive[best].second;
    const std::size_t hb = alive[best + 1].first;
    out.audit.push_back({ka, hb, alive[best].first, alive[best + 1].second, best_gap});
    Element t;
    t.kind = ElementKind::Triangle;
    t.blocks = {points[ka].position, points[hb].position};
    t.sign = points[ka].color == Color::Red ? 1 : -1;
    out.triangles.push_back(t);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(best),
                alive.begin() + static_cast<std::ptrdiff_t>(best + 2));
  }
  if (!alive.empty()) throw std::logic_error("build_triangles: odd number of interface rectangles");
  return out;
}

namespace {

struct SiteSet {
  std::int64_t first;
  std::int64_t last;
};

SiteSet sites(const Element& e, std::int64_t ell_plus) {
  return {e.blocks.lo * ell_plus, e.blocks.hi * ell_plus - 1};
}

std::int64_t point_to_set(std::int64_t p, SiteSet s) {
  if (p < s.first) return s.first - p;
  if (p > s.last) return p - s.last;
  return 0;
}

std::int64_t set_to_set(SiteSet a, SiteSet b) {
  if (a.last < b.first) return b.first - a.last;
  if (b.last < a.first) return a.first - b.last;
  return 0;
}

std::int64_t abs64(std::int64_t x) { return x < 0 ? -x : x; }

}  // namespace

std::int64_t distance_D(const Element& a, const Element& b, std::int64_t ell_plus) {
  const SiteSet sa = sites(a, ell_plus), sb = sites(b, ell_plus);
  const bool ta = a.kind == ElementKind::Triangle, tb = b.kind == ElementKind::Triangle;
  if (!ta && !tb) return set_to_set(sa, sb);
  if (ta && tb) {
    std::int64_t d = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t p : {sa.first, sa.last}) {
      for (std::int64_t q : {sb.first, sb.last}) d = std::min(d, abs64(p - q));
    }
    return d;
  }
  const SiteSet t = ta ? sa : sb;
  const SiteSet q = ta ? sb : sa;
  return std::min(point_to_set(t.first, q), point_to_set(t.last, q));
}

std::vector<Violation> check_compatibility(std::span<const Element> elements, std::int64_t ell_plus,
                                           const EtaField* eta) {
  std::vector<Violation> v;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Element& e = elements[i];
    if (e.length() < 1) v.push_back({i, i, "empty element"});
    if (e.kind == ElementKind::Triangle && e.sign != 1 && e.sign != -1) v.push_back({i, i, "triangle sign"});
    if (e.kind == ElementKind::Rectangle) {
      if (e.length() < 2) v.push_back({i, i, "rectangle shorter than 2 blocks"});
      if (e.length() == 2 && eta != nullptr && eta->at(e.blocks.lo) * eta->at(e.blocks.lo + 1) != -1) {
        v.push_back({i, i, "2-block rectangle without opposite eta"});
      }
    }
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      const Element& a = elements[i];
      const Element& b = elements[j];
      const std::int64_t d = distance_D(a, b, ell_plus);
      const bool ta = a.kind == ElementKind::Triangle, tb = b.kind == ElementKind::Triangle;
      if (ta && tb) {
        if (d < std::min(a.length(), b.length()) * ell_plus) v.push_back({i, j, "D(T1,T2) < min |T|"});
      } else if (!ta && !tb) {
        if (d < ell_plus) v.push_back({i, j, "D(Q1,Q2) < ell_+"});
      } else {
        const Element& t = ta ? a : b;
        const Element& q = ta ? b : a;
        const bool disjoint = q.blocks.hi <= t.blocks.lo || t.blocks.hi <= q.blocks.lo;
        const bool inside = t.blocks.lo <= q.blocks.lo && q.blocks.hi <= t.blocks.hi;
        if (disjoint) {
          if (d < 1) v.push_back({i, j, "attached rectangle with D(T,Q) < 1"});
        } else if (inside) {
          if (d < ell_plus) v.push_back({i, j, "inner rectangle with D(T,Q) < ell_+"});
        } else {
          v.push_back({i, j, "rectangle crosses a triangle"});
        }
      }
    }
  }
  return v;
}

Contour make_contour(std::vector<Element> elements) {
  if (elements.empty()) throw std::invalid_argument("make_contour: empty element set");
  std::sort(elements.begin(), elements.end(), element_less);
  Contour c;
  c.envelope = elements.front().blocks;
  for (const Element& e : elements) {
    c.envelope.lo = std::min(c.envelope.lo, e.blocks.lo);
    c.envelope.hi = std::max(c.envelope.hi, e.blocks.hi);
    c.size += e.length();
  }
  c.elements = std::move(elements);
  return c;
}

std::int64_t contour_distance(const Contour& a, const Contour& b, std::int64_t ell_plus) {
  std::int64_t d = std::numeric_limits<std::int64_t>::max();
  for (const Element& x : a.elements) {
    for (const Element& y : b.elements) d = std::min(d, distance_D(x, y, ell_plus));
  }
  return d;
}

namespace {

bool too_close(std::int64_t d, std::int64_t size_a, std::int64_t size_b, double varpi, std::int64_t ell_plus) {
  const double s = static_cast<double>(std::min(size_a, size_b));
  return static_cast<double>(d) <= varpi * static_cast<double>(ell_plus) * s * s * s;
}

}  // namespace

std::vector<Contour> group_contours(std::span<const Element> elements, double varpi, std::int64_t ell_plus,
                                    std::optional<std::uint64_t> shuffle_seed) {
  if (!(varpi > 0.0)) throw std::invalid_argument("group_contours: varpi must be positive");
  const std::size_t n = elements.size();
  // Element-level distance matrix; group distance is the min over cross pairs.
  std::vector<std::int64_t> dist(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = distance_D(elements[i], elements[j], ell_plus);
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  std::vector<std::int64_t> sizes(n);
  for (std::size_t i = 0; i < n; ++i) {
    groups[i] = {i};
    sizes[i] = elements[i].length();
  }
  // gd[a][b] = current distance between groups a and b.
  std::vector<std::int64_t> gd = dist;
  std::vector<bool> live(n, true);
  CounterRng rng(shuffle_seed.value_or(0), 0xC0A1E5CEULL);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (;;) {
    pairs.clear();
    for (std::size_t a = 0; a < n; ++a) {
      if (!live[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (live[b] && too_close(gd[a * n + b], sizes[a], sizes[b], varpi, ell_plus)) pairs.emplace_back(a, b);
      }
    }
    if (pairs.empty()) break;
    std::size_t pick = 0;
    if (shuffle_seed) pick = static_cast<std::size_t>(rng.below(pairs.size()));
    const auto [a, b] = pairs[pick];
    groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
    groups[b].clear();
    sizes[a] += sizes[b];
    live[b] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!live[c] || c == a) continue;
      const std::int64_t d = std::min(gd[a * n + c], gd[b * n + c]);
      gd[a * n + c] = gd[c * n + a] = d;
    }
  }
  std::vector<Contour> out;
  for (std::size_t a = 0; a < n; ++a) {
    if (!live[a]) continue;
    std::vector<Element> es;
    for (std::size_t i : groups[a]) es.push_back(elements[i]);
    out.push_back(make_contour(std::move(es)));
  }
  std::sort(out.begin(), out.end(), [](const Contour& x, const Contour& y) {
    return element_less(x.elements.front(), y.elements.front());
  });
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> separation_violations(std::span<const Contour> contours,
                                                                      double varpi, std::int64_t ell_plus) {
  std::vector<std::pair<std::size_t, std::size_t>> v;
  for (std::size_t a = 0; a < contours.size(); ++a) {
    for (std::size_t b = a + 1; b < contours.size(); ++b) {
      const std::int64_t d = contour_distance(contours[a], contours[b], ell_plus);
      if (too_close(d, contours[a].size, contours[b].size, varpi, ell_plus)) v.emplace_back(a, b);
    }
  }
  return v;
}

ElementSet elements_from_theta(const ThetaField& theta) {
  ElementSet s;
  s.theta = theta;
  s.classes = classify_intervals(theta);
  s.points = make_interface_points(s.classes, theta);
  s.build = build_triangles(s.points);
  for (const BlockInterval& q : s.classes.rectangles) s.elements.push_back({ElementKind::Rectangle, q, 0});
  for (const Element& t : s.build.triangles) s.elements.push_back(t);
  std::sort(s.elements.begin(), s.elements.end(), element_less);
  return s;
}

ElementSet elements_from_eta(const EtaField& eta) { return elements_from_theta(theta_field(eta)); }

std::optional<EtaField> canonical_eta(const ThetaField& theta, double psi) {
  EtaField eta;
  eta.psi = psi;
  eta.outside_sign = theta.outside_sign;
  eta.values.assign(static_cast<std::size_t>(theta.blocks), 0);
  for (std::int64_t h = theta.lo(); h < theta.hi(); ++h) {
    const int s = theta.at(h);
    if (s == 0) continue;
    for (std::int64_t k = h - 1; k <= h + 1; ++k) {
      if (k < 0 || k >= theta.blocks) {
        if (s != theta.outside_sign) return std::nullopt;
        continue;
      }
      int& v = eta.values[static_cast<std::size_t>(k)];
      if (v != 0 && v != s) return std::nullopt;
      v = s;
    }
  }
  if (theta_field(eta) != theta) return std::nullopt;
  return eta;
}

ThetaField reconstruct_theta(std::span<const Element> elements, std::int64_t blocks, int outside_sign) {
  if (outside_sign != 1 && outside_sign != -1) throw std::invalid_argument("outside sign must be +-1");
  ThetaField th;
  th.outside_sign = outside_sign;
  th.blocks = blocks;
  th.values.assign(static_cast<std::size_t>(blocks + 2), outside_sign);
  for (std::int64_t h = -1; h <= blocks; ++h) {
    std::int64_t inner = std::numeric_limits<std::int64_t>::max();
    int sign = outside_sign;
    bool zero = false;
    for (const Element& e : elements) {
      if (e.blocks.lo > h || h >= e.blocks.hi) continue;
      if (e.kind == ElementKind::Rectangle) {
        zero = true;
      } else if (e.length() < inner) {
        inner = e.length();
        sign = e.sign;
      }
    }
    th.values[static_cast<std::size_t>(h + 1)] = zero ? 0 : sign;
  }
  for (const Element& e : elements) {
    if (e.blocks.lo < -1 || e.blocks.hi > blocks + 1) {
      throw std::invalid_argument("reconstruct_theta: element outside the volume and its halo");
    }
  }
  std::vector<Element> want(elements.begin(), elements.end());
  std::sort(want.begin(), want.end(), element_less);
  if (elements_from_theta(th).elements != want) {
    throw std::invalid_argument("reconstruct_theta: elements are not produced by any Theta field");
  }
  return th;
}

}  // namespace kac
