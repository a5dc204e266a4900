#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kac/coarsegrain.hpp"
#include "kac/coupling.hpp"
#include "kac/geometry.hpp"
#include "kac/spin_config.hpp"

namespace kac {

struct ProfileContext {
  double beta = 2.0;
  CouplingSpec coupling;
  std::int64_t ell0 = 1;
  bool lambda_on = true;

  CouplingSpec effective() const { return lambda_on ? coupling : coupling.short_range(); }
  double gamma() const { return coupling.gamma(); }
  double delta0() const { return static_cast<double>(ell0) * coupling.gamma(); }
  ProfileContext without_lambda() const {
    ProfileContext c = *this;
    c.lambda_on = false;
    return c;
  }
};

// Block values outside the volume: left holds the blocks adjacent on the left in increasing
// position order, right the blocks on the right; constants beyond.
struct ProfileBoundary {
  std::vector<double> left;
  std::vector<double> right;
  double far_left = 0.0;
  double far_right = 0.0;

  static ProfileBoundary constant(double v) { return {{}, {}, v, v}; }
  static ProfileBoundary split(double left_value, double right_value) { return {{}, {}, left_value, right_value}; }
  static ProfileBoundary from_spins(const BoundaryCondition& bc, std::int64_t ell0);

  double left_at(std::int64_t d) const;   // d >= 1 blocks to the left
  double right_at(std::int64_t d) const;
};

struct FTerms {
  double local = 0.0;
  double interior = 0.0;
  double boundary = 0.0;
  double boundary_sq = 0.0;
  double total() const { return local + interior + boundary + boundary_sq; }
};

// F on `blocks` ell0-blocks. Without a boundary the two boundary terms are absent.
class Functional {
 public:
  Functional(const ProfileContext& ctx, std::size_t blocks, std::optional<ProfileBoundary> boundary);

  const ProfileContext& context() const { return ctx_; }
  std::size_t blocks() const { return n_; }

  FTerms terms(std::span<const double> m) const;
  double value(std::span<const double> m) const { return terms(m).total(); }
  // Sum over the volume of delta0 (f(m) - f(c)), computed term by term.
  double local_excess(std::span<const double> m, double c) const;
  void gradient(std::span<const double> m, std::span<double> g) const;

  // J(k ell0) for k >= 1; kernel(0) = gamma.
  double kernel(std::int64_t k) const;
  // Total coupling weight Sum_{y != x} J(|x-y|) seen by block x, including the outside.
  double weight(std::size_t x) const { return weight_[x]; }
  // Sum_{y outside} J(|x-y|) mbar(y).
  double outside_field(std::size_t x) const { return outside_[x]; }
  // Sum_{y outside} J(|x-y|) mbar(y)^2.
  double outside_sq(std::size_t x) const { return outside_sq_[x]; }
  bool has_boundary() const { return boundary_.has_value(); }

  // Euler-Lagrange map m -> tanh(beta [(1 - (delta0/gamma) W_x) m_x + (delta0/gamma) N_x]).
  void el_map(std::span<const double> m, std::span<double> out) const;
  double el_residual(std::span<const double> m) const;
  // Sum_{y in volume, y != x} J(|x-y|) m(y).
  double neighbour_sum(std::span<const double> m, std::size_t x) const;
  std::size_t range() const { return range_; }

 private:
  ProfileContext ctx_;
  CouplingSpec eff_;
  std::size_t n_;
  std::size_t range_ = 0;
  std::optional<ProfileBoundary> boundary_;
  std::vector<double> kernel_;
  std::vector<double> weight_;
  std::vector<double> outside_;
  std::vector<double> outside_sq_;
  std::vector<double> outside_w_;
};

// Values must lie on the grid {-1, -1 + 2/ell0, ..., 1}.
bool on_grid(double v, std::int64_t ell0);
double grid_project(double v, std::int64_t ell0);
std::vector<double> grid_project(std::span<const double> m, std::int64_t ell0);

double eval_F(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& boundary);
FTerms eval_F_terms(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& boundary);

// Site intervals, ell0-aligned; m is an ell0 profile whose block k sits at origin + k ell0.
struct SiteInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
double eval_F_AB(const ProfileContext& ctx, const MagProfile& m, SiteInterval a, SiteInterval b);

// ln Z(m|sigmabar) by enumeration over sigma with ell0 block sums equal to `sums`.
double log_constrained_partition(const ProfileContext& ctx, const SpinConfig& shape,
                                 std::span<const std::int64_t> sums);
double eval_G(const ProfileContext& ctx, const SpinConfig& shape, std::span<const std::int64_t> sums);

struct SolveOptions {
  double tolerance = 1e-12;
  double damping = 0.5;
  int fixed_point_iterations = 2000;
  int newton_iterations = 200;
  double max_step = 0.1;
};

struct SolveResult {
  std::vector<double> profile;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Stationary point of F reached from `seed` by damped fixed-point iteration, then Newton.
SolveResult solve_euler_lagrange(const Functional& f, std::vector<double> seed, const SolveOptions& opt = {});

// phi on `blocks` blocks with boundary mbar, lambda switched off. Seeded with seed_value.
SolveResult phi_profile(const ProfileContext& ctx, std::size_t blocks, const ProfileBoundary& boundary,
                        double seed_value, const SolveOptions& opt = {});

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};
// Least-squares fit of ln|phi(x) - m_beta| against x over [first, last).
DecayFit fit_decay(std::span<const double> phi, double m_beta, std::size_t first, std::size_t last);

struct SurfaceTension {
  std::vector<std::size_t> sizes;  // blocks
  std::vector<double> values;
  double value = 0.0;
  double increment = 0.0;          // last Cauchy increment
};

// Interface cost for one volume of `blocks` ell0-blocks, kink seeded at blocks/2 + offset.
double j_tilde_at(const ProfileContext& ctx, std::size_t blocks, double seed_offset = 0.25);
SurfaceTension j_tilde(const ProfileContext& ctx, std::span<const std::size_t> sizes, double seed_offset = 0.25);

struct Surgery {
  std::vector<double> tilde;
  std::vector<double> star;
};
// m on the whole volume (ell0 blocks), elements in ell_+ blocks: one rectangle, or a triangle
// with its two attached rectangles. `ratio` = ell_+ / ell0.
Surgery surgery_profiles(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& outer,
                         std::span<const Element> elements, std::int64_t ratio);

struct EpsilonOptions {
  int starts = 20;
  double tolerance = 1e-8;
  int max_iterations = 20000;
  std::uint64_t seed = 12345;
};

struct EpsilonResult {
  double eps_a = 0.0;
  double eps_b = 0.0;
  std::vector<double> argmin_a;
  std::vector<double> argmin_b;
  bool feasible = false;
};

// Cost of one ell_+ block over the interior functional, relative to the constant m_beta.
double block_excess(const ProfileContext& ctx, std::span<const double> m);
EpsilonResult epsilon_ab(const ProfileContext& ctx, const Scales& scales, double psi,
                         const EpsilonOptions& opt = {});
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct PeierlsParams {
  double varpi = 11.0;
  double psi = 0.0;
  double a_beta = 0.0;
  double b_beta = 0.0;
  double c_gamma = 0.0;
  double b_bar = 7.5;
  double rho = 0.1;
  double epsilon = 0.0;   // min(eps_a, eps_b) / delta_-
  double j_tilde = 0.0;
  double beta = 0.0;
  double m_beta = 0.0;
  double lambda_tilde = 0.0;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  double gamma = 0.0;
  std::int64_t ell_plus = 1;
  std::int64_t ell_minus = 1;
};

PeierlsParams make_peierls_params(double beta, const CouplingSpec& coupling, const Scales& scales, double psi,
                                  double varpi, double epsilon, double j_tilde, double b_bar = 7.5,
                                  double rho = 0.1);
double peierls_weight(const PeierlsParams& p, const Contour& contour);
double peierls_weight_damped(const PeierlsParams& p, const Contour& contour);
// Left and right sides of the convergence condition on b.
std::pair<double, double> sarava_condition(const PeierlsParams& p, double b, int terms = 100000);

struct BlockInteraction {
  double fine = 0.0;     // ell0^2 Sum J m m
  double coarse = 0.0;   // ell_-^2 Sum J m^- m^-
  double difference = 0.0;
  bool adjacent = false;
  // ell_- [4 delta_- 1_adjacent + 8 lambda K] for a given K.
  double bound(double K) const { return scale * (4.0 * deltam * (adjacent ? 1.0 : 0.0) + 8.0 * lambda * K); }
  double scale = 0.0;
  double deltam = 0.0;
  double lambda = 0.0;
};
BlockInteraction block_interaction_diff(const CouplingSpec& coupling, const MagProfile& m, SiteInterval a,
                                        SiteInterval b, const Scales& scales);

struct HatHBucket {
  std::string key;
  std::vector<Contour> contours;
  double log_weight = 0.0;  // ln Sum_{sigma in bucket} exp(-beta H)
  double hat_h = 0.0;
  std::uint64_t count = 0;
};

struct HatHTable {
  std::vector<HatHBucket> buckets;
  double log_z = 0.0;
  std::optional<std::size_t> empty;
  const HatHBucket* find(const std::string& key) const;
};

std::string contour_key(std::span<const Contour> contours);

// Enumerates every sigma on the shape's volume; `restrict` keeps only profiles in a subset D.
HatHTable hatH_enumerate(const CouplingSpec& coupling, double beta, const SpinConfig& shape, const Scales& scales,
                         double psi, double varpi,
                         const std::function<bool(std::span<const Spin>)>& restrict = {});

struct EntropyOptions {
  bool single_element_only = false;
  bool realizable_only = true;
  std::uint64_t budget = 50'000'000;
};

struct EntropySum {
  double lhs = 0.0;
  double rhs = 0.0;
  std::uint64_t contours = 0;
  std::uint64_t candidates = 0;
};

// Contours with |Gamma| = m, all elements inside a window of `window` blocks centred on block 0,
// and block 0 inside the envelope.
EntropySum entropy_partial_sum(double b, double c, std::int64_t m, std::int64_t window, double varpi,
                               std::int64_t ell_plus, double delta_plus, const EntropyOptions& opt = {});

}  // namespace kac
