// Copyright 2026 The hybridplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hybridplan/core_types.hpp"
#include "hybridplan/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace hybridplan;

namespace
{

// Oracle: overlap iff some edge pair crosses or a corner of one box lies inside the other.
bool brute_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  auto inside = [](const std::array<Vec2, 4> & poly, const Vec2 & p) {
    bool pos = false, neg = false;
    for (int i = 0; i < 4; ++i) {
      const Vec2 e = poly[(i + 1) % 4] - poly[i];
      const double c = e.cross(p - poly[i]);
      pos |= c > 0.0;
      neg |= c < 0.0;
    }
    return !(pos && neg);
  };
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Vec2 p = ca[i], q = ca[(i + 1) % 4], r = cb[j], s = cb[(j + 1) % 4];
      const double d1 = (q - p).cross(r - p), d2 = (q - p).cross(s - p);
      const double d3 = (s - r).cross(p - r), d4 = (s - r).cross(q - r);
      if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    }
  }
  return inside(ca, cb[0]) || inside(cb, ca[0]);
}

}  // namespace

TEST_CASE("to_ego_frame")
{
  const Pose2 id = to_ego_frame({1, 2, 0.3}, {1, 2, 0.3});
  CHECK(id.x == doctest::Approx(0.0));
  CHECK(id.y == doctest::Approx(0.0));
  CHECK(id.theta == doctest::Approx(0.0));

  const Pose2 shifted = to_ego_frame({3, 0, 0}, {1, 0, 0});
  CHECK(shifted.x == doctest::Approx(2.0));
  CHECK(shifted.y == doctest::Approx(0.0));

  const Pose2 r = to_ego_frame({0, 1, 0}, {0, 0, kPi / 2});
  CHECK(r.x == doctest::Approx(1.0));
  CHECK(r.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.theta == doctest::Approx(-kPi / 2));
}

TEST_CASE("from_ego_frame inverts to_ego_frame")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0), a(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Pose2 p{u(rng), u(rng), a(rng)}, ref{u(rng), u(rng), a(rng)};
    const Pose2 back = from_ego_frame(to_ego_frame(p, ref), ref);
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
    CHECK(angle_diff(back.theta, p.theta) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("normalize_angle range")
{
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
}

TEST_CASE("polyline projection")
{
  const Polyline line({{0, 0}, {10, 0}});
  auto p = line.project({1, 0});
  CHECK(p.s == doctest::Approx(1.0));
  CHECK(p.d == doctest::Approx(0.0));
  p = line.project({1, 2});
  CHECK(p.s == doctest::Approx(1.0));
  CHECK(p.d == doctest::Approx(2.0));
  p = line.project({-5, 1});
  CHECK(p.s == doctest::Approx(0.0));
  CHECK(p.d == doctest::Approx(1.0));
  p = line.project({4, -3});
  CHECK(p.d == doctest::Approx(-3.0));
  CHECK_THROWS_AS(Polyline({{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Polyline({{1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("polyline heading and offset")
{
  const Polyline line({{0, 0}, {10, 0}, {10, 10}});
  CHECK(line.length() == doctest::Approx(20.0));
  CHECK(line.heading_at(0.0) == doctest::Approx(0.0));
  CHECK(line.heading_at(10.0) == doctest::Approx(kPi / 4));
  CHECK(line.heading_at(20.0) == doctest::Approx(kPi / 2));
  CHECK(line.heading_at(5.0) == doctest::Approx(kPi / 8));
  const Vec2 q = line.point_at(15.0);
  CHECK(q.x == doctest::Approx(10.0));
  CHECK(q.y == doctest::Approx(5.0));
  const Polyline left = Polyline({{0, 0}, {10, 0}}).offset(2.0);
  CHECK(left.points().front().y == doctest::Approx(2.0));
}

TEST_CASE("footprint center from rear axle offset")
{
  const VehicleSize size{4.0, 2.0, 1.0};
  const OrientedBox b0 = footprint(Pose2{0, 0, 0}, size);
  CHECK(b0.center.x == doctest::Approx(1.0));
  CHECK(b0.center.y == doctest::Approx(0.0));
  const OrientedBox b1 = footprint(Pose2{0, 0, kPi / 2}, size);
  CHECK(b1.center.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b1.center.y == doctest::Approx(1.0));
  const OrientedBox b2 = footprint(Pose2{3, 4, 0.7}, VehicleSize{4.0, 2.0, 0.0});
  CHECK(b2.center.x == doctest::Approx(3.0));
  CHECK(b2.center.y == doctest::Approx(4.0));
  CHECK(b2.length == 4.0);
  CHECK(b2.width == 2.0);
}

TEST_CASE("boxes_intersect")
{
  const OrientedBox a{{0, 0}, 0.0, 1.0, 1.0};
  CHECK(boxes_intersect(a, a));
  CHECK_FALSE(boxes_intersect(a, OrientedBox{{3, 0}, 0.0, 1.0, 1.0}));
  const OrientedBox rot{{0.9, 0}, kPi / 4, 1.0, 1.0};
  CHECK(boxes_intersect(a, rot) == brute_overlap(a, rot));
  CHECK(boxes_intersect(a, rot));
  CHECK(boxes_intersect(a, OrientedBox{{1.0, 0}, 0.0, 1.0, 1.0}));  // touching

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), hd(-kPi, kPi), sz(0.3, 3.0);
  int agree = 0;
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox p{{pos(rng), pos(rng)}, hd(rng), sz(rng), sz(rng)};
    const OrientedBox q{{pos(rng), pos(rng)}, hd(rng), sz(rng), sz(rng)};
    agree += boxes_intersect(p, q) == brute_overlap(p, q);
    if (!boxes_intersect(p, q)) {
      CHECK(box_distance(p, q) > 0.0);
    } else {
      CHECK(box_distance(p, q) == 0.0);
    }
  }
  CHECK(agree == 2000);
}

TEST_CASE("box_distance between axis aligned boxes")
{
  const OrientedBox a{{0, 0}, 0.0, 2.0, 2.0};
  CHECK(box_distance(a, OrientedBox{{5, 0}, 0.0, 2.0, 2.0}) == doctest::Approx(3.0));
  CHECK(box_distance(a, OrientedBox{{4, 4}, 0.0, 2.0, 2.0}) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("polygon containment and boundary distance")
{
  const Polygon sq({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  CHECK(sq.contains({5, 5}));
  CHECK_FALSE(sq.contains({11, 5}));
  CHECK(sq.boundary_distance({5, 2}) == doctest::Approx(2.0));
  CHECK(sq.boundary_distance({12, 5}) == doctest::Approx(2.0));

  // L shape, checked against a brute-force crossing count.
  const std::vector<Vec2> l{{0, 0}, {6, 0}, {6, 2}, {2, 2}, {2, 6}, {0, 6}};
  const Polygon poly(l);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 7.0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{u(rng), u(rng)};
    bool in = false;
    for (std::size_t a = 0, b = l.size() - 1; a < l.size(); b = a++) {
      if ((l[a].y > p.y) != (l[b].y > p.y) &&
          p.x < (l[b].x - l[a].x) * (p.y - l[a].y) / (l[b].y - l[a].y) + l[a].x) {
        in = !in;
      }
    }
    CHECK(poly.contains(p) == in);
  }
}

TEST_CASE("track and trajectory validation")
{
  AgentTrack t;
  t.times = {0.0, 0.1};
  t.poses = {{0, 0, 0}};
  t.speeds = {1.0, 1.0};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.poses.push_back({0.1, 0, 0});
  CHECK_NOTHROW(t.validate());
  t.times = {0.1, 0.1};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  Trajectory empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}
