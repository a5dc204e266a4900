#include <doctest.h>

#include <algorithm>
#include <vector>

#include "kac/geometry.hpp"
#include "kac/rng.hpp"

using namespace kac;

namespace {

constexpr std::int64_t kEllp = 48;

EtaField make_eta(std::vector<int> v, int outside = 1) {
  EtaField e;
  e.outside_sign = outside;
  e.values = std::move(v);
  return e;
}

Element tri(std::int64_t lo, std::int64_t hi, int sign) { return {ElementKind::Triangle, {lo, hi}, sign}; }
Element rect(std::int64_t lo, std::int64_t hi) { return {ElementKind::Rectangle, {lo, hi}, 0}; }

EtaField random_eta(CounterRng& rng, std::int64_t n) {
  EtaField eta;
  eta.outside_sign = rng.uniform() < 0.5 ? 1 : -1;
  int v = eta.outside_sign;
  const double stay = 0.5 + 0.45 * rng.uniform();
  for (std::int64_t b = 0; b < n; ++b) {
    if (rng.uniform() > stay) v = static_cast<int>(rng.below(3)) - 1;
    eta.values.push_back(v);
  }
  return eta;
}

std::int64_t cross_distance(const Contour& a, const Contour& b) {
  std::int64_t d = -1;
  for (const Element& x : a.elements) {
    for (const Element& y : b.elements) {
      const std::int64_t e = distance_D(x, y, kEllp);
      d = d < 0 ? e : std::min(d, e);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("hand trace") {
  const EtaField eta = make_eta({1, 1, 1, -1, -1, -1, 1, 1, 1});
  const ElementSet es = elements_from_eta(eta);
  REQUIRE(es.points.size() == 4);
  CHECK(es.points[0].position == 2);
  CHECK(es.points[0].color == Color::Red);
  CHECK(es.points[1].position == 4);
  CHECK(es.points[1].color == Color::Blue);
  CHECK(es.points[2].position == 5);
  CHECK(es.points[2].color == Color::Blue);
  CHECK(es.points[3].position == 7);
  CHECK(es.points[3].color == Color::Red);
  for (const InterfacePoint& p : es.points) CHECK(es.points[p.partner].color != p.color);

  REQUIRE(es.build.triangles.size() == 1);
  CHECK(es.build.triangles[0] == tri(4, 5, -1));
  REQUIRE(es.build.audit.size() == 1);
  CHECK(es.points[es.build.audit[0].canceled_left].position == 2);
  CHECK(es.points[es.build.audit[0].canceled_right].position == 7);

  CHECK(es.elements.size() == 3);
  CHECK(check_compatibility(es.elements, kEllp, &eta).empty());
  CHECK(reconstruct_theta(es.elements, 9, 1) == es.theta);
  const auto canon = canonical_eta(es.theta);
  REQUIRE(canon.has_value());
  CHECK(theta_field(*canon) == es.theta);
}

TEST_CASE("no interface rectangles, no points") {
  const ElementSet es = elements_from_eta(make_eta(std::vector<int>(10, 1)));
  CHECK(es.points.empty());
  CHECK(es.elements.empty());
  const ElementSet z = elements_from_eta(make_eta({1, 1, 1, 0, 0, 1, 1, 1}));
  CHECK(z.points.empty());
  REQUIRE(z.elements.size() == 1);
  CHECK(z.elements[0].kind == ElementKind::Rectangle);
}

TEST_CASE("single interface pair with the plus convention") {
  const ElementSet es = elements_from_eta(make_eta({1, 1, 1, -1, -1, -1, -1, -1, -1}));
  CHECK(es.build.triangles.empty() == false);
  CHECK(check_compatibility(es.elements, kEllp).empty());
  for (const Element& t : es.build.triangles) {
    bool inside_rect = false;
    for (const Element& q : es.elements) {
      if (q.kind == ElementKind::Rectangle && q.blocks.lo < t.blocks.hi && t.blocks.lo < q.blocks.hi &&
          !(t.blocks.lo <= q.blocks.lo && q.blocks.hi <= t.blocks.hi)) {
        inside_rect = true;
      }
    }
    CHECK_FALSE(inside_rect);
  }
  CHECK(reconstruct_theta(es.elements, 9, 1) == es.theta);
}

TEST_CASE("distance_D") {
  CHECK(distance_D(rect(2, 5), rect(2, 5), kEllp) == 0);
  CHECK(distance_D(tri(0, 1, 1), tri(3, 4, 1), kEllp) == 2 * kEllp + 1);
  CHECK(distance_D(tri(0, 4, 1), rect(1, 3), kEllp) == kEllp);
  CHECK(distance_D(rect(1, 3), tri(0, 4, 1), kEllp) == kEllp);
  CHECK(distance_D(tri(3, 5, 1), rect(1, 3), kEllp) == 1);
  CHECK(distance_D(rect(1, 3), rect(4, 6), kEllp) == kEllp + 1);
}

TEST_CASE("compatibility counterexamples") {
  std::vector<Element> close{rect(0, 2), rect(2, 4)};
  CHECK_FALSE(check_compatibility(close, kEllp).empty());
  std::vector<Element> short_rect{rect(0, 1)};
  CHECK_FALSE(check_compatibility(short_rect, kEllp).empty());
  std::vector<Element> nested{tri(0, 10, 1), tri(3, 5, -1)};
  CHECK(check_compatibility(nested, kEllp).empty());
  std::vector<Element> overlap{tri(0, 4, 1), tri(2, 8, -1)};
  CHECK_FALSE(check_compatibility(overlap, kEllp).empty());
  const EtaField same = make_eta({1, 1, 1, 1, 1, 1});
  std::vector<Element> two{rect(2, 4)};
  CHECK_FALSE(check_compatibility(two, kEllp, &same).empty());
}

TEST_CASE("contour grouping threshold") {
  const double varpi = 11.0;
  std::vector<Element> near{tri(0, 1, 1), tri(1 + 10, 12, 1)};
  std::vector<Element> far{tri(0, 1, 1), tri(1 + 12, 14, 1)};
  CHECK(distance_D(near[0], near[1], kEllp) <= static_cast<std::int64_t>(varpi) * kEllp);
  CHECK(distance_D(far[0], far[1], kEllp) > static_cast<std::int64_t>(varpi) * kEllp);
  CHECK(group_contours(near, varpi, kEllp).size() == 1);
  CHECK(group_contours(far, varpi, kEllp).size() == 2);

  std::vector<Element> one{rect(3, 6)};
  const auto g = group_contours(one, varpi, kEllp);
  REQUIRE(g.size() == 1);
  CHECK(g[0].elements == one);
  CHECK(g[0].size == 3);
  CHECK(g[0].envelope == BlockInterval{3, 6});
}

TEST_CASE("make_contour") {
  const Contour c = make_contour({rect(5, 7), tri(1, 2, -1)});
  CHECK(c.envelope == BlockInterval{1, 7});
  CHECK(c.size == 3);
  CHECK(c.contains_block(1));
  CHECK_FALSE(c.contains_block(7));
}

TEST_CASE("pipeline properties on random eta") {
  CounterRng rng(2024, 0);
  const double varpi = 11.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::int64_t>(16 + rng.below(241));
    const EtaField eta = random_eta(rng, n);
    const ElementSet es = elements_from_eta(eta);
    CHECK(check_compatibility(es.elements, kEllp, &eta).empty());
    CHECK(reconstruct_theta(es.elements, n, eta.outside_sign) == es.theta);

    std::size_t interface = 0;
    for (bool f : es.classes.interface) interface += f ? 1 : 0;
    CHECK(es.build.triangles.size() * 2 == interface);
    CHECK(es.build.audit.size() == es.build.triangles.size());
    std::vector<int> used(es.points.size(), 0);
    for (const Collision& c : es.build.audit) {
      for (std::size_t p : {c.left, c.right, c.canceled_left, c.canceled_right}) ++used[p];
    }
    for (int u : used) CHECK(u == 1);

    for (const Element& t : es.build.triangles) {
      CHECK(eta.at(t.blocks.lo - 1) == t.sign);
      CHECK(eta.at(t.blocks.hi) == t.sign);
    }

    const std::vector<Contour> g = group_contours(es.elements, varpi, kEllp);
    std::size_t total = 0;
    for (const Contour& c : g) total += c.elements.size();
    CHECK(total == es.elements.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        const double s = static_cast<double>(std::min(g[a].size, g[b].size));
        CHECK(static_cast<double>(cross_distance(g[a], g[b])) > varpi * static_cast<double>(kEllp) * s * s * s);
      }
    }
    CHECK(separation_violations(g, varpi, kEllp).empty());
    for (std::uint64_t s = 0; s < 3; ++s) CHECK(group_contours(es.elements, varpi, kEllp, s + 100u * trial) == g);
  }
}

TEST_CASE("grouping separated families returns their union") {
  const double varpi = 2.0;
  std::vector<Element> left{tri(0, 1, 1), tri(3, 4, -1)};
  std::vector<Element> right{rect(200, 203)};
  const auto gl = group_contours(left, varpi, kEllp);
  const auto gr = group_contours(right, varpi, kEllp);
  std::vector<Element> all = left;
  all.insert(all.end(), right.begin(), right.end());
  std::vector<Contour> expect = gl;
  expect.insert(expect.end(), gr.begin(), gr.end());
  CHECK(group_contours(all, varpi, kEllp) == expect);
}

TEST_CASE("reconstruct_theta") {
  const ThetaField t = reconstruct_theta({}, 12, -1);
  for (std::int64_t h = t.lo(); h < t.hi(); ++h) CHECK(t.at(h) == -1);
  std::vector<Element> bad{tri(2, 3, 1)};
  CHECK_THROWS(reconstruct_theta(bad, 12, 1));
}
