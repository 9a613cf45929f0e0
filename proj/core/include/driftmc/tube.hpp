#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "driftmc/driver.hpp"
#include "driftmc/rng.hpp"

namespace driftmc {

struct Vec3 {
  double x = 0.0;  // axial coordinate (the drift direction e)
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
  Vec3 normalized() const;
};

using Direction = Vec3;  // unit vector

// Rotationally symmetric tube in R^3 whose radius is constant on each unit
// interval [i, i+1) of the axis, driven by a stationary finite-state process.
struct RadiusSpec {
  DriverKind kind = DriverKind::kPeriodic;
  std::vector<double> radii;  // one per state, all in (0, inf)
  std::vector<std::vector<double>> transition;  // markov only
  std::vector<double> weights;                  // iid only
};

class Tube {
 public:
  Tube(RadiusSpec spec, std::uint64_t seed);

  double radius_cell(std::int64_t i) const {
    return spec_.radii[static_cast<std::size_t>(driver_->state_at(i))];
  }
  double radius_at(double alpha) const;

  double r_min() const { return r_min_; }
  double m_hat() const { return m_hat_; }
  const RadiusSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

 private:
  RadiusSpec spec_;
  std::uint64_t seed_;
  std::shared_ptr<const StateDriver> driver_;
  double r_min_ = 0.0;
  double m_hat_ = 0.0;
};

enum class PatchKind { kLateral, kStep };

// Point of the tube boundary in cylinder coordinates. Lateral points live on
// the wall of cell [i, i+1); step points live on the annulus in the plane
// alpha = i where the radius jumps, with the inner normal along +-e.
struct BoundaryPoint {
  PatchKind patch = PatchKind::kLateral;
  std::int64_t cell = 0;
  double alpha = 0.0;
  double phi = 0.0;     // azimuth in [0, 2pi)
  double radial = 0.0;  // lateral: wall radius; step: in (inner, outer)
  int facing = 0;       // step only: +1 for +e, -1 for -e
};

Vec3 embed(const BoundaryPoint& p);

// Unit normal pointing into the tube. Throws std::domain_error for
// non-regular points (edge circles).
Direction inner_normal(const Tube& tube, const BoundaryPoint& p);

// Distance of the embedded point from its patch's surface equation.
double boundary_residual(const Tube& tube, const BoundaryPoint& p);

enum class RayStatus {
  kHit,
  kDegenerate,       // tangency / corner graze within tolerance; resample
  kWindowExhausted,  // left the simulated axial window
};

struct RayResult {
  RayStatus status = RayStatus::kHit;
  BoundaryPoint point;
  double t = 0.0;  // chord length (w is unit)

  bool ok() const { return status == RayStatus::kHit; }
};

// First boundary point seen from p in direction w (requires w unit and
// w . inner_normal(p) > 0). Exact patch-by-patch solve: quadratic on the
// cylinder walls, linear on the step planes.
RayResult ray_exit(const Tube& tube, const BoundaryPoint& from,
                   const Direction& w,
                   std::int64_t max_cells = 1'000'000);

// Surface area of the band U_j = {x : x.e in (j, j+1]}: the lateral wall of
// cell j plus the step annulus at alpha = j+1 when the radius jumps there.
double band_measure(const Tube& tube, std::int64_t j);

// e^{lambda alpha}-weighted band measure (the reversible measure of the
// drifted billiard restricted to the band).
double band_measure_lambda(const Tube& tube, std::int64_t j, double lambda);

// Surface-measure-uniform point of band j.
BoundaryPoint sample_boundary_uniform(const Tube& tube, std::int64_t j,
                                      Rng& rng);

// Point of band j distributed per the e^{lambda alpha}-weighted surface
// measure (exact inverse-CDF on the lateral patch).
BoundaryPoint sample_boundary_weighted(const Tube& tube, std::int64_t j,
                                       double lambda, Rng& rng);

// Debug dump: "cell,radius" rows over [lo, hi].
void write_radius_csv(const Tube& tube, std::int64_t lo, std::int64_t hi,
                      std::ostream& os);

}  // namespace driftmc
