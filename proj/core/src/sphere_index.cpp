#include "hopcap/sphere_index.hpp"

#include <algorithm>
#include <cmath>

namespace hopcap {

namespace {

// Chord length in the embedding of unit directions for a surface length.
double chord_for(double surface_radius) {
  const double angle = std::min(surface_radius / kSphereRadius, kPi);
  return 2.0 * std::sin(0.5 * angle);
}

}  // namespace

SphereIndex::SphereIndex(double bucket_radius)
    : bucket_radius_(bucket_radius) {
  cell_ = std::max(chord_for(bucket_radius), 1e-4);
  dims_ = static_cast<int>(std::ceil(2.0 / cell_)) + 1;
}

SphereIndex::Key SphereIndex::key(int ix, int iy, int iz) const noexcept {
  return (static_cast<Key>(ix) * dims_ + iy) * dims_ + iz;
}

int SphereIndex::coord(double v) const noexcept {
  return std::clamp(static_cast<int>(std::floor((v + 1.0) / cell_)), 0, dims_ - 1);
}

std::uint32_t SphereIndex::insert(const SpherePoint& p) {
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(p);
  const Vec3& d = p.direction();
  buckets_[key(coord(d.x), coord(d.y), coord(d.z))].push_back(id);
  return id;
}

void SphereIndex::bucket_range(const SpherePoint& p, double radius, int lo[3],
                               int hi[3]) const {
  // Pad by a relative epsilon so points exactly at the radius are not lost to
  // rounding in the chord conversion.
  const double c = chord_for(radius) * (1.0 + 1e-9) + 1e-12;
  const Vec3& d = p.direction();
  const double v[3] = {d.x, d.y, d.z};
  for (int k = 0; k < 3; ++k) {
    lo[k] = coord(v[k] - c);
    hi[k] = coord(v[k] + c);
  }
}

std::vector<std::uint32_t> SphereIndex::within(const SpherePoint& p, double radius) const {
  std::vector<std::uint32_t> out;
  for_each_within(p, radius, [&](std::uint32_t id, double) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

bool SphereIndex::any_closer_than(const SpherePoint& p, double radius) const {
  bool found = false;
  for_each_within(p, radius, [&](std::uint32_t, double d) {
    if (d < radius) {
      found = true;
    }
  });
  return found;
}

std::optional<SphereIndex::Hit> SphereIndex::nearest(const SpherePoint& p) const {
  if (points_.empty()) {
    return std::nullopt;
  }
  double radius = bucket_radius_;
  for (;;) {
    std::optional<Hit> best;
    for_each_within(p, radius, [&](std::uint32_t id, double d) {
      if (!best || d < best->distance || (d == best->distance && id < best->id)) {
        best = Hit{id, d};
      }
    });
    if (best) {
      return best;
    }
    if (radius >= kMaxSurfaceDistance) {
      // Unreachable with a nonempty index; kept for rounding at the antipode.
      radius = 2.0 * kMaxSurfaceDistance;
    }
    radius *= 2.0;
  }
}

}  // namespace hopcap
