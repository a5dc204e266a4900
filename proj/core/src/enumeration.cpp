#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "kac/freeenergy.hpp"
#include "kac/meanfield.hpp"
#include "kac/sampler.hpp"

namespace kac {

const HatHBucket* HatHTable::find(const std::string& key) const {
  for (const HatHBucket& b : buckets) {
    if (b.key == key) return &b;
  }
  return nullptr;
}

std::string contour_key(std::span<const Contour> contours) {
  if (contours.empty()) return "empty";
  std::string key;
  for (const Contour& c : contours) {
    if (!key.empty()) key += " | ";
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
      const Element& e = c.elements[i];
      if (i) key += ' ';
      if (e.kind == ElementKind::Rectangle) {
        key += fmt::format("Q[{},{})", e.blocks.lo, e.blocks.hi);
      } else {
        key += fmt::format("T{}[{},{})", e.sign > 0 ? '+' : '-', e.blocks.lo, e.blocks.hi);
      }
    }
  }
  return key;
}

HatHTable hatH_enumerate(const CouplingSpec& coupling, double beta, const SpinConfig& shape, const Scales& scales,
                         double psi, double varpi, const std::function<bool(std::span<const Spin>)>& restrict) {
  const std::size_t n = shape.size();
  if (n > kExactGibbsMaxSites) throw std::invalid_argument("volume too large for enumeration");
  const double mb = solve_m_beta(beta);
  const double g = coupling.gamma();
  const int outside = shape.boundary().outside_sign();
  const std::vector<double> energy = energy_table(coupling, shape);
  const double emin = *std::min_element(energy.begin(), energy.end());

  HatHTable table;
  std::map<std::vector<int>, std::size_t> by_eta;
  std::vector<double> sums;
  std::vector<Spin> spins(n);
  double z = 0.0;
  for (std::uint64_t idx = 0; idx < energy.size(); ++idx) {
    for (std::size_t i = 0; i < n; ++i) spins[i] = (idx >> i) & 1U ? Spin{1} : Spin{-1};
    if (restrict && !restrict(spins)) continue;
    const double w = std::exp(-beta * (energy[idx] - emin));
    z += w;
    const EtaField eta = eta_field(spins, shape.first(), scales, mb, psi, outside);
    auto it = by_eta.find(eta.values);
    if (it == by_eta.end()) {
      const ElementSet es = elements_from_eta(eta);
      const std::vector<Contour> contours = group_contours(es.elements, varpi, scales.ellp);
      const std::string key = contour_key(contours);
      std::size_t bucket = table.buckets.size();
      for (std::size_t b = 0; b < table.buckets.size(); ++b) {
        if (table.buckets[b].key == key) bucket = b;
      }
      if (bucket == table.buckets.size()) {
        table.buckets.push_back({key, contours, 0.0, 0.0, 0});
        sums.push_back(0.0);
      }
      it = by_eta.emplace(eta.values, bucket).first;
    }
    sums[it->second] += w;
    ++table.buckets[it->second].count;
  }
  if (table.buckets.empty()) throw std::invalid_argument("no configuration passes the restriction");
  table.log_z = std::log(z) - beta * emin;
  for (std::size_t b = 0; b < table.buckets.size(); ++b) {
    HatHBucket& bucket = table.buckets[b];
    bucket.log_weight = std::log(sums[b]) - beta * emin;
    bucket.hat_h = -g / beta * bucket.log_weight;
    if (bucket.contours.empty()) table.empty = b;
  }
  return table;
}

namespace {

struct EntropySearch {
  double b, c;
  std::int64_t m, lo, hi;
  double varpi;
  std::int64_t ell_plus;
  double delta_plus;
  EntropyOptions opt;
  EntropySum out;
  std::vector<Element> chosen;

  double weight(const std::vector<Element>& es) const {
    double w = 1.0;
    for (const Element& e : es) {
      w *= std::exp(-b * std::log(static_cast<double>(e.length()) * delta_plus) - c);
    }
    return w;
  }

  bool triangles_attached(const std::vector<Element>& es) const {
    for (const Element& t : es) {
      if (t.kind != ElementKind::Triangle) continue;
      bool left = false, right = false;
      for (const Element& q : es) {
        if (q.kind != ElementKind::Rectangle) continue;
        left = left || q.blocks.hi == t.blocks.lo;
        right = right || q.blocks.lo == t.blocks.hi;
      }
      if (!left || !right) return false;
    }
    return true;
  }

  // A Theta field on the window reproduces exactly these elements for some triangle signs.
  bool realizable(std::vector<Element> es) const {
    if (!triangles_attached(es)) return false;
    std::vector<std::size_t> tri;
    for (std::size_t i = 0; i < es.size(); ++i) {
      es[i].blocks.lo -= lo;
      es[i].blocks.hi -= lo;
      if (es[i].kind == ElementKind::Triangle) tri.push_back(i);
    }
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << tri.size()); ++s) {
      for (std::size_t k = 0; k < tri.size(); ++k) es[tri[k]].sign = (s >> k) & 1U ? -1 : 1;
      try {
        const ThetaField th = reconstruct_theta(es, hi - lo, 1);
        if (canonical_eta(th)) return true;
      } catch (const std::invalid_argument&) {
      }
    }
    return false;
  }

  void accept() {
    if (!opt.single_element_only || chosen.size() == 1) {
      std::vector<Element> es = chosen;
      std::sort(es.begin(), es.end(), element_less);
      const std::vector<Contour> cs = group_contours(es, varpi, ell_plus);
      if (cs.size() == 1 && cs[0].contains_block(0) && (!opt.realizable_only || realizable(es))) {
        out.lhs += weight(es);
        ++out.contours;
      }
    }
  }

  void extend(std::int64_t used, std::int64_t first_lo, std::int64_t max_hi) {
    if (++out.candidates > opt.budget) throw std::runtime_error("entropy enumeration budget exhausted");
    if (used == m) {
      accept();
      return;
    }
    if (opt.single_element_only && !chosen.empty()) return;
    const std::int64_t left = m - used;
    const std::int64_t start = chosen.empty() ? lo : first_lo;
    const std::int64_t stop = chosen.empty() ? std::min<std::int64_t>(0, hi - 1) : hi - 1;
    for (std::int64_t a = start; a <= stop; ++a) {
      if (!chosen.empty() && a >= max_hi) {
        const std::int64_t small = std::min(used, left);
        if (static_cast<double>(a - max_hi) > varpi * static_cast<double>(small * small * small)) break;
      }
      for (ElementKind kind : {ElementKind::Triangle, ElementKind::Rectangle}) {
        for (std::int64_t len = kind == ElementKind::Rectangle ? 2 : 1; len <= left && a + len <= hi; ++len) {
          const Element e{kind, {a, a + len}, kind == ElementKind::Triangle ? 1 : 0};
          if (!chosen.empty() && element_less(e, chosen.back())) continue;
          chosen.push_back(e);
          if (check_compatibility(chosen, ell_plus).empty()) {
            extend(used + len, chosen.front().blocks.lo, std::max(max_hi, a + len));
          }
          chosen.pop_back();
        }
      }
    }
  }
};

}  // namespace

EntropySum entropy_partial_sum(double b, double c, std::int64_t m, std::int64_t window, double varpi,
                               std::int64_t ell_plus, double delta_plus, const EntropyOptions& opt) {
  if (m < 1) throw std::invalid_argument("contour size must be positive");
  if (window < 0) throw std::invalid_argument("window must be nonnegative");
  EntropySearch s{b, c, m, -window / 2, window - window / 2, varpi, ell_plus, delta_plus, opt, {}, {}};
  s.out.rhs = 2.0 * static_cast<double>(m) * std::exp(-b * std::log(static_cast<double>(m)) - (c - std::log(2.0)));
  if (window > 0) s.extend(0, 0, std::numeric_limits<std::int64_t>::min());
  return s.out;
}

}  // namespace kac
