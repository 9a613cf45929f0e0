#include "driftmc/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace driftmc {

namespace {

constexpr double kGeomTol = 1e-12;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return phi;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  return {x / n, y / n, z / n};
}

Tube::Tube(RadiusSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  require(!spec_.radii.empty(), "Tube: no radii");
  r_min_ = spec_.radii[0];
  m_hat_ = spec_.radii[0];
  for (double r : spec_.radii) {
    require(std::isfinite(r) && r > 0.0, "Tube: radius outside (0, inf)");
    r_min_ = std::min(r_min_, r);
    m_hat_ = std::max(m_hat_, r);
  }
  driver_ = std::make_shared<const StateDriver>(
      spec_.kind, static_cast<int>(spec_.radii.size()), spec_.weights,
      spec_.transition, seed_);
}

double Tube::radius_at(double alpha) const {
  return radius_cell(static_cast<std::int64_t>(std::floor(alpha)));
}

Vec3 embed(const BoundaryPoint& p) {
  return {p.alpha, p.radial * std::cos(p.phi), p.radial * std::sin(p.phi)};
}

Direction inner_normal(const Tube& tube, const BoundaryPoint& p) {
  if (p.patch == PatchKind::kLateral) {
    const double r = tube.radius_cell(p.cell);
    if (std::fabs(p.radial - r) > 1e-9 ||
        p.alpha < static_cast<double>(p.cell) - 1e-9 ||
        p.alpha > static_cast<double>(p.cell) + 1.0 + 1e-9)
      throw std::domain_error("inner_normal: point is off its lateral patch");
    if (std::fabs(p.alpha - static_cast<double>(p.cell)) <= kGeomTol ||
        std::fabs(p.alpha - static_cast<double>(p.cell) - 1.0) <= kGeomTol) {
      // Edge circle between cells of different radii is non-regular.
      const std::int64_t plane =
          std::fabs(p.alpha - static_cast<double>(p.cell)) <= kGeomTol
              ? p.cell
              : p.cell + 1;
      if (tube.radius_cell(plane - 1) != tube.radius_cell(plane))
        throw std::domain_error("inner_normal: edge-circle point is non-regular");
    }
    return {0.0, -std::cos(p.phi), -std::sin(p.phi)};
  }
  // Step annulus at alpha = cell.
  const double r_left = tube.radius_cell(p.cell - 1);
  const double r_right = tube.radius_cell(p.cell);
  const double inner = std::min(r_left, r_right);
  const double outer = std::max(r_left, r_right);
  if (inner == outer)
    throw std::domain_error("inner_normal: no step at this plane");
  if (p.radial <= inner + kGeomTol || p.radial >= outer - kGeomTol)
    throw std::domain_error("inner_normal: edge-circle point is non-regular");
  const int expected = r_right > r_left ? 1 : -1;
  if (p.facing != expected)
    throw std::domain_error("inner_normal: step facing mismatch");
  return {static_cast<double>(p.facing), 0.0, 0.0};
}

double boundary_residual(const Tube& tube, const BoundaryPoint& p) {
  const Vec3 v = embed(p);
  const double rho = std::sqrt(v.y * v.y + v.z * v.z);
  if (p.patch == PatchKind::kLateral)
    return std::fabs(rho - tube.radius_cell(p.cell));
  return std::fabs(v.x - static_cast<double>(p.cell));
}

namespace {

struct Quadratic {
  bool valid = false;
  double t1 = 0.0;
  double t2 = 0.0;  // t1 <= t2
  double disc = 0.0;
};

// Roots of |u0 + t wu|^2 = r^2 in t, with u0, wu the lateral components.
Quadratic cylinder_roots(double u0y, double u0z, double wy, double wz,
                         double r) {
  Quadratic q;
  const double a = wy * wy + wz * wz;
  if (a <= 0.0) return q;
  const double b = 2.0 * (u0y * wy + u0z * wz);
  const double c = u0y * u0y + u0z * u0z - r * r;
  const double disc = b * b - 4.0 * a * c;
  q.disc = disc;
  if (disc < 0.0) return q;
  const double sq = std::sqrt(disc);
  // Numerically stable split of the two roots.
  const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double t1 = qq / a;
  double t2 = (qq != 0.0) ? c / qq : -b / (2.0 * a);
  if (t1 > t2) std::swap(t1, t2);
  q.valid = true;
  q.t1 = t1;
  q.t2 = t2;
  return q;
}

}  // namespace

RayResult ray_exit(const Tube& tube, const BoundaryPoint& from,
                   const Direction& w, std::int64_t max_cells) {
  require(std::fabs(w.norm() - 1.0) <= 1e-9, "ray_exit: direction not unit");
  const Direction n = inner_normal(tube, from);
  require(w.dot(n) > 0.0, "ray_exit: direction must point into the tube");

  const Vec3 x0 = embed(from);
  RayResult out;

  // Starting cell: the one the ray immediately enters.
  std::int64_t cell;
  if (from.patch == PatchKind::kLateral) {
    cell = from.cell;
  } else {
    cell = (w.x > 0.0) ? from.cell : from.cell - 1;
  }

  const bool start_on_lateral = from.patch == PatchKind::kLateral;
  for (std::int64_t crossed = 0; crossed < max_cells; ++crossed) {
    const double r = tube.radius_cell(cell);

    // Slab exit towards the next integer plane.
    double t_plane = std::numeric_limits<double>::infinity();
    std::int64_t plane = 0;
    if (w.x > 0.0) {
      plane = cell + 1;
      t_plane = (static_cast<double>(plane) - x0.x) / w.x;
    } else if (w.x < 0.0) {
      plane = cell;
      t_plane = (static_cast<double>(plane) - x0.x) / w.x;
    }

    // Cylinder wall of this cell.
    const Quadratic q = cylinder_roots(x0.y, x0.z, w.y, w.z, r);
    double t_cyl = std::numeric_limits<double>::infinity();
    if (q.valid) {
      if (std::fabs(q.disc) < kGeomTol) {
        out.status = RayStatus::kDegenerate;
        return out;
      }
      if (q.t1 > kGeomTol)
        t_cyl = q.t1;
      else if (q.t2 > kGeomTol)
        t_cyl = q.t2;
      else if (start_on_lateral && crossed == 0 && q.t2 > 0.0) {
        // Leaving the starting wall almost tangentially.
        out.status = RayStatus::kDegenerate;
        return out;
      }
    }

    if (t_cyl < t_plane - kGeomTol) {
      const double alpha = x0.x + t_cyl * w.x;
      if (std::fabs(alpha - std::round(alpha)) <= kGeomTol &&
          tube.radius_cell(static_cast<std::int64_t>(std::round(alpha)) - 1) !=
              tube.radius_cell(static_cast<std::int64_t>(std::round(alpha)))) {
        out.status = RayStatus::kDegenerate;  // hit an edge circle
        return out;
      }
      if (alpha < static_cast<double>(cell) - kGeomTol ||
          alpha > static_cast<double>(cell) + 1.0 + kGeomTol) {
        out.status = RayStatus::kDegenerate;  // rounding pushed it off-slab
        return out;
      }
      BoundaryPoint hit;
      hit.patch = PatchKind::kLateral;
      hit.cell = cell;
      hit.alpha = alpha;
      hit.phi = wrap_angle(std::atan2(x0.z + t_cyl * w.z, x0.y + t_cyl * w.y));
      hit.radial = r;
      out.status = RayStatus::kHit;
      out.point = hit;
      out.t = t_cyl;
      return out;
    }
    if (t_cyl < t_plane + kGeomTol) {
      // Cylinder and plane crossing coincide: corner graze.
      out.status = RayStatus::kDegenerate;
      return out;
    }
    if (!std::isfinite(t_plane)) {
      // Purely lateral ray that misses the wall cannot occur inside the
      // tube; treat defensively as degenerate.
      out.status = RayStatus::kDegenerate;
      return out;
    }

    // Advance to the plane.
    const double py = x0.y + t_plane * w.y;
    const double pz = x0.z + t_plane * w.z;
    const double rho = std::sqrt(py * py + pz * pz);
    const std::int64_t next_cell = (w.x > 0.0) ? cell + 1 : cell - 1;
    const double r_next = tube.radius_cell(next_cell);
    if (rho <= r_next - kGeomTol) {
      cell = next_cell;  // still inside; keep marching
      continue;
    }
    if (rho < r_next + kGeomTol || rho > r - kGeomTol) {
      out.status = RayStatus::kDegenerate;  // corner graze at the plane
      return out;
    }
    BoundaryPoint hit;
    hit.patch = PatchKind::kStep;
    hit.cell = plane;
    hit.alpha = static_cast<double>(plane);
    hit.phi = wrap_angle(std::atan2(pz, py));
    hit.radial = rho;
    hit.facing = (w.x > 0.0) ? -1 : 1;
    out.status = RayStatus::kHit;
    out.point = hit;
    out.t = t_plane;
    return out;
  }
  out.status = RayStatus::kWindowExhausted;
  return out;
}

namespace {

double annulus_area(const Tube& tube, std::int64_t plane) {
  const double rl = tube.radius_cell(plane - 1);
  const double rr = tube.radius_cell(plane);
  const double inner = std::min(rl, rr);
  const double outer = std::max(rl, rr);
  constexpr double kPi = 3.14159265358979323846;
  return kPi * (outer * outer - inner * inner);
}

}  // namespace

double band_measure(const Tube& tube, std::int64_t j) {
  // Lateral wall over (j, j+1) plus the annulus at alpha = j+1, which is the
  // integer contained in (j, j+1].
  return kTwoPi * tube.radius_cell(j) + annulus_area(tube, j + 1);
}

double band_measure_lambda(const Tube& tube, std::int64_t j, double lambda) {
  if (lambda == 0.0) return band_measure(tube, j);
  const double ej = std::exp(lambda * static_cast<double>(j));
  const double lateral = kTwoPi * tube.radius_cell(j) * ej *
                         (std::exp(lambda) - 1.0) / lambda;
  const double step = annulus_area(tube, j + 1) * ej * std::exp(lambda);
  return lateral + step;
}

BoundaryPoint sample_boundary_uniform(const Tube& tube, std::int64_t j,
                                      Rng& rng) {
  const double lateral = kTwoPi * tube.radius_cell(j);
  const double step = annulus_area(tube, j + 1);
  BoundaryPoint p;
  p.phi = kTwoPi * rng.next_double();
  if (rng.next_double() * (lateral + step) < lateral) {
    p.patch = PatchKind::kLateral;
    p.cell = j;
    p.alpha = static_cast<double>(j) + (1.0 - rng.next_open());  // in (j, j+1)
    p.radial = tube.radius_cell(j);
  } else {
    const double rl = tube.radius_cell(j);
    const double rr = tube.radius_cell(j + 1);
    const double inner = std::min(rl, rr);
    const double outer = std::max(rl, rr);
    p.patch = PatchKind::kStep;
    p.cell = j + 1;
    p.alpha = static_cast<double>(j + 1);
    const double u = rng.next_open();
    p.radial = std::sqrt(inner * inner + u * (outer * outer - inner * inner));
    p.facing = (rr > rl) ? 1 : -1;
  }
  return p;
}

BoundaryPoint sample_boundary_weighted(const Tube& tube, std::int64_t j,
                                       double lambda, Rng& rng) {
  if (lambda == 0.0) return sample_boundary_uniform(tube, j, rng);
  const double ej = std::exp(lambda * static_cast<double>(j));
  const double lateral = kTwoPi * tube.radius_cell(j) * ej *
                         (std::exp(lambda) - 1.0) / lambda;
  const double step = annulus_area(tube, j + 1) * ej * std::exp(lambda);
  BoundaryPoint p;
  p.phi = kTwoPi * rng.next_double();
  if (rng.next_double() * (lateral + step) < lateral) {
    p.patch = PatchKind::kLateral;
    p.cell = j;
    // Inverse CDF of the density proportional to e^{lambda alpha} on (j, j+1).
    const double u = rng.next_open();
    p.alpha = static_cast<double>(j) +
              std::log(1.0 + u * (std::exp(lambda) - 1.0)) / lambda;
    p.radial = tube.radius_cell(j);
  } else {
    const double rl = tube.radius_cell(j);
    const double rr = tube.radius_cell(j + 1);
    const double inner = std::min(rl, rr);
    const double outer = std::max(rl, rr);
    p.patch = PatchKind::kStep;
    p.cell = j + 1;
    p.alpha = static_cast<double>(j + 1);
    const double u = rng.next_open();
    p.radial = std::sqrt(inner * inner + u * (outer * outer - inner * inner));
    p.facing = (rr > rl) ? 1 : -1;
  }
  return p;
}

void write_radius_csv(const Tube& tube, std::int64_t lo, std::int64_t hi,
                      std::ostream& os) {
  os << "cell,radius\n";
  for (std::int64_t i = lo; i <= hi; ++i)
    os << i << ',' << tube.radius_cell(i) << '\n';
}

}  // namespace driftmc
