#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "logsymp/frames.hpp"
#include "logsymp/polynomial.hpp"

namespace logsymp {

using Vec = std::vector<double>;
using Rng = std::mt19937_64;

/// Lie groupoid written in one chart of its arrow space. Composition runs
/// "g then h": multiply(g, h) is defined when target(g) = source(h), and has
/// the source of g and the target of h.
struct ChartGroupoidModel {
  std::string kind;
  nlohmann::json params;
  std::size_t object_dim = 0;
  std::size_t arrow_dim = 0;
  std::size_t fiber_dim = 0;

  std::function<bool(const Vec&)> arrow_valid;
  std::function<Vec(const Vec&)> source;
  std::function<Vec(const Vec&)> target;
  std::function<Vec(const Vec&, const Vec&)> multiply;
  std::function<Vec(const Vec&)> identity;
  std::function<Vec(const Vec&)> inverse;
  // Arrow with the given source; u parametrizes the source fiber.
  std::function<Vec(const Vec&, const Vec&)> arrow_with_source;

  std::function<Vec(Rng&)> sample_object;
  std::function<Vec(Rng&)> sample_fiber;
  std::function<double(const Vec&, const Vec&)> object_distance;
  std::function<double(const Vec&, const Vec&)> arrow_distance;

  Vec sample_arrow(Rng& rng) const { return arrow_with_source(sample_object(rng), sample_fiber(rng)); }
};

// kinds: pair {n}, log_pair {n}, symp_pair_2d, ssc_logtan_local, scaling_action, glued_circle
ChartGroupoidModel make_model(const std::string& kind, const nlohmann::json& params = nlohmann::json::object());

struct CheckReport {
  std::string name;
  bool passed = false;
  double max_residual = 0;
  std::size_t samples = 0;
  std::vector<std::string> failures;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const CheckReport& r);

CheckReport check_groupoid_axioms(const ChartGroupoidModel& m, std::size_t samples, double tol,
                                  std::uint64_t seed = 20240601);

// Central differences with one Richardson step.
Eigen::MatrixXd numeric_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z, double h = 1e-4);

/// Image of ker(Ts) under Tt at identity arrows, compared with the span of
/// the expected frame at each object sample.
CheckReport anchor_frame_check(const ChartGroupoidModel& m, const PolyFrame& expected, const std::vector<Vec>& objects,
                               double tol);
std::vector<Vec> default_anchor_objects(const ChartGroupoidModel& m, std::size_t random_samples,
                                        std::uint64_t seed = 20240601);

/// Two-form with rational coefficients on an arrow chart; coefficient (a, b)
/// with a < b multiplies dz_a ^ dz_b.
struct TwoForm {
  std::vector<std::string> coords;
  std::map<std::pair<std::size_t, std::size_t>, RationalFunction> coeff;

  std::size_t dim() const { return coords.size(); }
  RationalFunction at(std::size_t a, std::size_t b) const;
  Eigen::MatrixXd evaluate(const Vec& z) const;
  bool is_closed() const;
  nlohmann::json to_json() const;
};

// F^*(g dX ^ dY) for F = (F1, F2) with rational components and density g(X, Y).
TwoForm pullback_area_form(const std::vector<std::string>& coords, const RationalFunction& f1,
                           const RationalFunction& f2, const RationalFunction& density);
TwoForm operator+(const TwoForm& a, const TwoForm& b);

/// omega = t^*(-(1/x) dx^dy) + s^*((1/x) dx^dy) on symp_pair_2d arrows (lambda, mu, x, y),
/// simplified; throws std::logic_error if a coefficient keeps a pole on {x = 0}.
TwoForm derive_symplectic_form();
// t^*(dx^dy) - s^*(dx^dy) on pair(2) arrows (xt, yt, xs, ys).
TwoForm pair_symplectic_form();

using FormField = std::function<Eigen::MatrixXd(const Vec&)>;

CheckReport multiplicativity_check(const ChartGroupoidModel& m, const FormField& omega, std::size_t samples,
                                   double tol, std::uint64_t seed = 20240601);

/// Sign eps with {x o s, y o s} = eps (x o s) for the Poisson structure
/// P = omega^{-1}, with {f, g} = df P dg; the report carries eps and the
/// matching residual for t (which should carry -eps).
CheckReport poisson_sign_check(const ChartGroupoidModel& m, const FormField& omega, std::size_t samples, double tol,
                               std::uint64_t seed = 20240601);

struct GroupoidMap {
  std::string name;
  std::function<Vec(const Vec&)> arrows;
};

CheckReport blowdown_check(const ChartGroupoidModel& src, const ChartGroupoidModel& dst, const GroupoidMap& phi,
                           std::size_t samples, double tol, std::uint64_t seed = 20240601);

// {f o phi, g o phi}_{omega^{-1}} = B(phi(.))(f, g) for the coordinate functions of dst.
CheckReport poisson_map_check(const ChartGroupoidModel& src, const FormField& omega, const GroupoidMap& phi,
                              const std::function<Eigen::MatrixXd(const Vec&)>& target_bivector,
                              std::size_t samples, double tol, std::uint64_t seed = 20240601);

// Frame the anchor should span for the built-in kinds (none for glued models).
std::optional<PolyFrame> expected_anchor_frame(const ChartGroupoidModel& m);
// Multiplicative symplectic form for symp_pair_2d and pair {n: 2}.
std::optional<TwoForm> model_symplectic_form(const ChartGroupoidModel& m);
// Image bivector on pair(2) arrows (xt, yt, xs, ys): xt d_xt^d_yt - xs d_xs^d_ys.
Eigen::MatrixXd pair_blowdown_bivector(const Vec& g);

GroupoidMap symp_to_log_pair();
GroupoidMap log_pair_to_pair();
GroupoidMap symp_to_pair();

struct ChartTransition {
  std::size_t from = 0, to = 0;
  std::function<bool(const Vec&)> arrow_in_domain;
  std::function<Vec(const Vec&)> arrow_map;
  std::function<Vec(const Vec&)> arrow_inverse;
  std::function<bool(const Vec&)> object_in_domain;
  std::function<Vec(const Vec&)> object_map;
  std::function<Vec(const Vec&)> object_inverse;
};

struct GluedAtlas {
  std::vector<ChartGroupoidModel> charts;
  std::vector<ChartTransition> transitions;
};

class GlueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Atlas-backed model: objects are (chart, coords...), arrows are (chart, coords...).
/// Each transition is sample-checked to be a groupoid isomorphism first.
ChartGroupoidModel glue_models(const GluedAtlas& atlas, std::size_t check_samples = 2000, double tol = 1e-9,
                               std::uint64_t seed = 20240601);

GluedAtlas circle_atlas(bool corrupt_transition = false);

}  // namespace logsymp
