#include "evsink/cluster.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace evsink {
namespace {

SaePoints disc_points(double cx, double cy, double radius, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<std::pair<int, int>> unique;
  while (int(unique.size()) < n) {
    const double rho = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * M_PI * unit(rng);
    unique.insert({int(std::lround(cx + rho * std::cos(theta))),
                   int(std::lround(cy + rho * std::sin(theta)))});
  }
  SaePoints pts;
  std::set<std::pair<int, int>> sorted_yx;
  for (const auto& [x, y] : unique) sorted_yx.insert({y, x});
  for (const auto& [y, x] : sorted_yx) pts.points.emplace_back(std::uint16_t(x), std::uint16_t(y));
  return pts;
}

// Union-find single-linkage components with linking distance beta: when
// blobs are separated by much more than beta, mean-shift clusters must
// coincide with these components.
std::vector<int> linkage_components(const SaePoints& pts, double beta) {
  const std::size_t n = pts.size();
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = int(i);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = double(pts.points[i].first) - double(pts.points[j].first);
      const double dy = double(pts.points[i].second) - double(pts.points[j].second);
      if (dx * dx + dy * dy <= beta * beta) parent[find(int(i))] = find(int(j));
    }
  }
  std::vector<int> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = find(int(i));
  return comp;
}

TEST(MeanShift, SingleBlobSingleCluster) {
  const SaePoints pts = disc_points(320, 240, 10.0, 100, 31);
  const auto clusters = mean_shift(pts, 20.0);
  ASSERT_EQ(clusters.size(), 1u);
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts.points) {
    mx += x;
    my += y;
  }
  mx /= double(pts.size());
  my /= double(pts.size());
  EXPECT_NEAR(clusters[0].centroid_x, mx, 0.5);
  EXPECT_NEAR(clusters[0].centroid_y, my, 0.5);
  EXPECT_EQ(clusters[0].members.size(), pts.size());
}

TEST(MeanShift, TwoSeparatedBlobsTwoClusters) {
  SaePoints pts = disc_points(200, 240, 10.0, 80, 32);
  const SaePoints other = disc_points(300, 240, 10.0, 80, 33);
  pts.points.insert(pts.points.end(), other.points.begin(), other.points.end());
  std::sort(pts.points.begin(), pts.points.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
  const auto clusters = mean_shift(pts, 20.0);
  ASSERT_EQ(clusters.size(), 2u);

  // agreement with the single-linkage oracle
  const std::vector<int> comp = linkage_components(pts, 20.0);
  std::map<int, std::set<std::pair<double, double>>> oracle;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    oracle[comp[i]].insert({double(pts.points[i].first), double(pts.points[i].second)});
  }
  ASSERT_EQ(oracle.size(), 2u);
  for (const auto& cl : clusters) {
    const std::set<std::pair<double, double>> members(cl.members.begin(), cl.members.end());
    bool matched = false;
    for (const auto& [_, comp_set] : oracle) {
      if (comp_set == members) matched = true;
    }
    EXPECT_TRUE(matched) << "cluster " << cl.id << " does not match any linkage component";
  }
}

TEST(MeanShift, RejectsEmptyInput) {
  EXPECT_THROW(mean_shift(SaePoints{}, 20.0), EmptyInputError);
}

TEST(MeanShift, PartitionProperty) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> coord(0, 400);
  SaePoints pts;
  std::set<std::pair<int, int>> unique;
  for (int i = 0; i < 300; ++i) unique.insert({coord(rng), coord(rng)});
  for (const auto& [x, y] : unique) pts.points.emplace_back(std::uint16_t(x), std::uint16_t(y));
  std::sort(pts.points.begin(), pts.points.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
  const auto clusters = mean_shift(pts, 15.0);
  std::multiset<std::pair<double, double>> all;
  for (const auto& cl : clusters) {
    EXPECT_FALSE(cl.members.empty());
    for (const auto& m : cl.members) all.insert(m);
    // centroid equals the member mean
    double mx = 0.0, my = 0.0;
    for (const auto& m : cl.members) {
      mx += m.first;
      my += m.second;
    }
    EXPECT_NEAR(cl.centroid_x, mx / double(cl.members.size()), 1e-9);
    EXPECT_NEAR(cl.centroid_y, my / double(cl.members.size()), 1e-9);
  }
  EXPECT_EQ(all.size(), pts.size());
  std::multiset<std::pair<double, double>> expected;
  for (const auto& [x, y] : pts.points) expected.insert({double(x), double(y)});
  EXPECT_EQ(all, expected);
}

TEST(MeanShift, TranslationEquivariance) {
  const SaePoints base = disc_points(100, 120, 12.0, 90, 35);
  SaePoints shifted;
  const int ax = 37, ay = 53;
  for (const auto& [x, y] : base.points) {
    shifted.points.emplace_back(std::uint16_t(x + ax), std::uint16_t(y + ay));
  }
  const auto c1 = mean_shift(base, 18.0);
  const auto c2 = mean_shift(shifted, 18.0);
  ASSERT_EQ(c1.size(), c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    EXPECT_EQ(c1[i].members.size(), c2[i].members.size());
    EXPECT_NEAR(c1[i].centroid_x + ax, c2[i].centroid_x, 1e-9);
    EXPECT_NEAR(c1[i].centroid_y + ay, c2[i].centroid_y, 1e-9);
    for (std::size_t m = 0; m < c1[i].members.size(); ++m) {
      EXPECT_DOUBLE_EQ(c1[i].members[m].first + ax, c2[i].members[m].first);
      EXPECT_DOUBLE_EQ(c1[i].members[m].second + ay, c2[i].members[m].second);
    }
  }
}

TEST(MeanShift, Deterministic) {
  const SaePoints pts = disc_points(320, 240, 15.0, 150, 36);
  const auto a = mean_shift(pts, 20.0);
  const auto b = mean_shift(pts, 20.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_DOUBLE_EQ(a[i].centroid_x, b[i].centroid_x);
    EXPECT_DOUBLE_EQ(a[i].centroid_y, b[i].centroid_y);
    EXPECT_EQ(a[i].members, b[i].members);
  }
}

Cluster make_cluster(int id, double cx, double cy) {
  Cluster c;
  c.id = id;
  c.centroid_x = cx;
  c.centroid_y = cy;
  c.members = {{cx, cy}};
  return c;
}

TEST(SelectCluster, PicksNearestToPrincipalPoint) {
  const CameraModel cam;  // principal point (320, 240)
  const std::vector<Cluster> clusters = {make_cluster(0, 300, 240), make_cluster(1, 600, 100)};
  EXPECT_EQ(select_inspection_cluster(clusters, cam).id, 0);
}

TEST(SelectCluster, SingleClusterReturnsItself) {
  const CameraModel cam;
  const std::vector<Cluster> clusters = {make_cluster(7, 10, 10)};
  EXPECT_EQ(select_inspection_cluster(clusters, cam).id, 7);
}

TEST(SelectCluster, EquidistantTieGoesToLowerId) {
  const CameraModel cam;
  // symmetric about the principal point (320, 240)
  const std::vector<Cluster> clusters = {make_cluster(0, 310, 240), make_cluster(1, 330, 240)};
  EXPECT_EQ(select_inspection_cluster(clusters, cam).id, 0);
  // permuting the list must not change the winner (documented tie-break)
  const std::vector<Cluster> swapped = {make_cluster(1, 330, 240), make_cluster(0, 310, 240)};
  EXPECT_EQ(select_inspection_cluster(swapped, cam).id, 0);
}

TEST(SelectCluster, RejectsEmptyList) {
  EXPECT_THROW(select_inspection_cluster({}, CameraModel{}), EmptyInputError);
}

TEST(SelectClusters, MultiSelectWithinRadius) {
  const CameraModel cam;
  const std::vector<Cluster> clusters = {make_cluster(0, 360, 240), make_cluster(1, 320, 250),
                                         make_cluster(2, 500, 400)};
  const auto picked = select_inspection_clusters(clusters, cam, 60.0);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(clusters[picked[0]].id, 1);  // nearest first
  EXPECT_EQ(clusters[picked[1]].id, 0);
}

}  // namespace
}  // namespace evsink
