#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hopcap/sphere.hpp"

namespace hopcap {

// Bucket grid over the embedding cube for fixed-radius and nearest-point
// queries on the sphere. Points are identified by their insertion order.
class SphereIndex {
 public:
  // `bucket_radius` is a surface length; buckets are sized so that a query of
  // that radius touches at most 3x3x3 buckets.
  explicit SphereIndex(double bucket_radius);

  std::uint32_t insert(const SpherePoint& p);
  std::size_t size() const noexcept { return points_.size(); }
  const SpherePoint& point(std::uint32_t id) const { return points_[id]; }

  // Calls fn(id, distance) for every stored point within surface distance
  // `radius` of p (inclusive).
  template <class Fn>
  void for_each_within(const SpherePoint& p, double radius, Fn&& fn) const;

  std::vector<std::uint32_t> within(const SpherePoint& p, double radius) const;

  // True if some stored point lies strictly closer than `radius`.
  bool any_closer_than(const SpherePoint& p, double radius) const;

  struct Hit {
    std::uint32_t id;
    double distance;
  };
  // Nearest stored point (ties broken by smaller id); nullopt when empty.
  std::optional<Hit> nearest(const SpherePoint& p) const;

 private:
  using Key = std::int64_t;
  Key key(int ix, int iy, int iz) const noexcept;
  int coord(double v) const noexcept;
  void bucket_range(const SpherePoint& p, double radius, int lo[3], int hi[3]) const;

  double bucket_radius_;
  double cell_;
  int dims_;
  std::unordered_map<Key, std::vector<std::uint32_t>> buckets_;
  std::vector<SpherePoint> points_;
};

template <class Fn>
void SphereIndex::for_each_within(const SpherePoint& p, double radius, Fn&& fn) const {
  int lo[3];
  int hi[3];
  bucket_range(p, radius, lo, hi);
  for (int ix = lo[0]; ix <= hi[0]; ++ix) {
    for (int iy = lo[1]; iy <= hi[1]; ++iy) {
      for (int iz = lo[2]; iz <= hi[2]; ++iz) {
        auto it = buckets_.find(key(ix, iy, iz));
        if (it == buckets_.end()) {
          continue;
        }
        for (std::uint32_t id : it->second) {
          const double d = surface_distance(p, points_[id]);
          if (d <= radius) {
            fn(id, d);
          }
        }
      }
    }
  }
}

}  // namespace hopcap
