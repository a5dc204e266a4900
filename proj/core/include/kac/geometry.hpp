#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kac/coarsegrain.hpp"

namespace kac {

enum class ElementKind { Triangle, Rectangle };

// Interval in ell_+ blocks; sign is +-1 for triangles and 0 for rectangles.
struct Element {
  ElementKind kind = ElementKind::Rectangle;
  BlockInterval blocks;
  int sign = 0;

  std::int64_t length() const { return blocks.length(); }
  bool operator==(const Element&) const = default;
};

bool element_less(const Element& a, const Element& b);

enum class Color { Red, Blue };

struct InterfacePoint {
  std::int64_t position = 0;  // block boundary
  Color color = Color::Red;
  std::size_t partner = 0;
  std::size_t rectangle = 0;  // index into the classification's rectangles
  bool left_end = true;       // true for r_h, false for r_k
};

std::vector<InterfacePoint> make_interface_points(const IntervalClassification& cls, const ThetaField& theta);

struct Collision {
  std::size_t left = 0;   // colliding points
  std::size_t right = 0;
  std::size_t canceled_left = 0;
  std::size_t canceled_right = 0;
  std::int64_t gap = 0;   // twice the collision time, in blocks
};

struct TriangleBuild {
  std::vector<Element> triangles;
  std::vector<Collision> audit;
};

TriangleBuild build_triangles(std::span<const InterfacePoint> points);

// Distances in sites between elements viewed as integer site sets; e(T) = {first, last} site.
std::int64_t distance_D(const Element& a, const Element& b, std::int64_t ell_plus);

struct Violation {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string rule;
};

// With eta supplied, length-2 rectangles are checked for opposite eta values.
std::vector<Violation> check_compatibility(std::span<const Element> elements, std::int64_t ell_plus,
                                           const EtaField* eta = nullptr);

struct Contour {
  std::vector<Element> elements;
  BlockInterval envelope;
  std::int64_t size = 0;  // Sum |S| / ell_+

  bool contains_block(std::int64_t block) const {
    return envelope.lo <= block && block < envelope.hi;
  }
  bool operator==(const Contour&) const = default;
};

Contour make_contour(std::vector<Element> elements);
std::int64_t contour_distance(const Contour& a, const Contour& b, std::int64_t ell_plus);

// Merge while D(G, G') <= varpi ell_+ min(|G|^3, |G'|^3). With a shuffle seed the candidate
// pairs are scanned in a random order. Output is sorted by envelope.
std::vector<Contour> group_contours(std::span<const Element> elements, double varpi, std::int64_t ell_plus,
                                    std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// Pairs of contours that violate the separation display.
std::vector<std::pair<std::size_t, std::size_t>> separation_violations(std::span<const Contour> contours,
                                                                      double varpi, std::int64_t ell_plus);

// Eta with every block left at 0 unless Theta forces its value; nullopt when no eta maps to theta.
std::optional<EtaField> canonical_eta(const ThetaField& theta, double psi = 0.0);

ThetaField reconstruct_theta(std::span<const Element> elements, std::int64_t blocks, int outside_sign);

// Full forward pipeline from eta.
struct ElementSet {
  ThetaField theta;
  IntervalClassification classes;
  std::vector<InterfacePoint> points;
  TriangleBuild build;
  std::vector<Element> elements;  // rectangles and triangles, sorted
};

ElementSet elements_from_theta(const ThetaField& theta);
ElementSet elements_from_eta(const EtaField& eta);

}  // namespace kac
