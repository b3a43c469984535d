#include <doctest.h>

#include "support.hpp"

#include "mcl/error.hpp"
#include "mcl/pooling.hpp"

using namespace mcl;

TEST_CASE("global average pooling") {
  const FeatureMatrix one = FeatureMatrix::from_columns({{3, 4}});
  CHECK(global_average_pool(one) == Vector{3, 4});
  const FeatureMatrix two = FeatureMatrix::from_columns({{1, 0}, {0, 1}});
  CHECK(global_average_pool(two) == Vector{0.5, 0.5});
}

TEST_CASE("query pooling") {
  const FeatureMatrix q = FeatureMatrix::from_columns({{1, 0}, {0, 1}});
  CHECK(pool_query(q, Vector{0.75, 0.25}) == Vector{0.75, 0.25});

  const Episode e = test::random_episode(1, 5, 7, 3);
  const Vector uniform(5, 0.2);
  CHECK(test::max_abs_diff(pool_query(e.query(), uniform), global_average_pool(e.query())) <= 1e-12);
  for (std::size_t j = 0; j < 5; ++j) {
    Vector onehot(5, 0.0);
    onehot[j] = 1.0;
    const Vector got = pool_query(e.query(), onehot);
    const auto col = e.query().column(j);
    CHECK(got == Vector(col.begin(), col.end()));
  }
  CHECK_THROWS_AS(pool_query(q, Vector{1.0}), DimensionError);
  CHECK_THROWS_AS(pool_query(q, Vector{0.7, 0.7}), ValidationError);
  CHECK_THROWS_AS(pool_query(q, Vector{1.5, -0.5}), ValidationError);
}

TEST_CASE("support pooling renormalises per class") {
  const FeatureMatrix s = FeatureMatrix::from_columns({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  const auto pooled = pool_support(s, Vector{0.4, 0.1, 0.3, 0.2}, 2);
  REQUIRE(pooled.size() == 2);
  CHECK(pooled[0][0] == doctest::Approx(0.8));
  CHECK(pooled[0][1] == doctest::Approx(0.2));
  CHECK(pooled[1][0] == doctest::Approx(0.6));
  CHECK(pooled[1][1] == doctest::Approx(0.4));

  const Episode e = test::random_episode(3, 4, 6, 5);
  const auto gap = pool_support(e.support_union(), Vector(12, 1.0 / 12.0), 3);
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(test::max_abs_diff(gap[c], global_average_pool(e.support(c))) <= 1e-12);

  // Mass on one class-0 feature: class 0 picks it, the others are unaffected.
  Vector w(12, 0.0);
  w[2] = 0.5;
  for (std::size_t j = 4; j < 12; ++j) w[j] = 0.5 / 8.0;
  const auto focused = pool_support(e.support_union(), w, 3);
  const auto col = e.support(0).column(2);
  CHECK(focused[0] == Vector(col.begin(), col.end()));
  CHECK(test::max_abs_diff(focused[1], gap[1]) <= 1e-12);

  Vector dead(12, 0.0);
  for (std::size_t j = 4; j < 12; ++j) dead[j] = 1.0 / 8.0;
  CHECK_THROWS_AS(pool_support(e.support_union(), dead, 3), DegenerateError);
  CHECK_THROWS_AS(pool_support(e.support_union(), Vector(12, 1.0 / 12.0), 5), DimensionError);
}

TEST_CASE("pooled vectors stay in the convex hull of their columns") {
  const Episode e = test::random_episode(2, 6, 5, 8);
  const PooledFeatures p = centrality_pool_episode(e);
  auto inside = [](const Vector& v, const FeatureMatrix& f) {
    for (std::size_t i = 0; i < f.dim(); ++i) {
      double lo = f(i, 0), hi = f(i, 0);
      for (std::size_t j = 1; j < f.count(); ++j) {
        lo = std::min(lo, f(i, j));
        hi = std::max(hi, f(i, j));
      }
      if (v[i] < lo - 1e-12 || v[i] > hi + 1e-12) return false;
    }
    return true;
  };
  CHECK(inside(p.query_vec, e.query()));
  for (std::size_t c = 0; c < 2; ++c) CHECK(inside(p.class_vecs[c], e.support(c)));
}

TEST_CASE("episode pooling") {
  SUBCASE("identical features reduce to GAP") {
    const FeatureMatrix f = FeatureMatrix::from_columns({{1, 2}, {1, 2}, {1, 2}});
    const Episode e({f, f}, f);
    const PooledFeatures p = centrality_pool_episode(e);
    CHECK(test::max_abs_diff(p.query_vec, global_average_pool(f)) <= 1e-12);
    for (const Vector& v : p.class_vecs) CHECK(test::max_abs_diff(v, global_average_pool(f)) <= 1e-12);
  }
  SUBCASE("single class") {
    CHECK(centrality_pool_episode(test::random_episode(1, 3, 4, 1)).class_vecs.size() == 1);
  }
  SUBCASE("matches manual composition") {
    const Episode e = test::random_episode(3, 5, 8, 9);
    const CentralityPair pi = eigen_approx(episode_transitions(e, kOneShotScales));
    const PooledFeatures p = centrality_pool_episode(e);
    CHECK(test::max_abs_diff(p.query_vec, pool_query(e.query(), pi.pi_q)) <= 1e-14);
    const auto classes = pool_support(e.support_union(), pi.pi_s, 3);
    for (std::size_t c = 0; c < 3; ++c) CHECK(test::max_abs_diff(p.class_vecs[c], classes[c]) <= 1e-14);
  }
  SUBCASE("one side can fall back to GAP") {
    const Episode e = test::random_episode(2, 4, 6, 10);
    const PooledFeatures query_only =
        centrality_pool_episode(e, kOneShotScales, {}, {PoolMode::Centrality, PoolMode::Average});
    const PooledFeatures support_only =
        centrality_pool_episode(e, kOneShotScales, {}, {PoolMode::Average, PoolMode::Centrality});
    const PooledFeatures both = centrality_pool_episode(e);
    CHECK(query_only.query_vec == both.query_vec);
    CHECK(query_only.class_vecs[1] == global_average_pool(e.support(1)));
    CHECK(support_only.query_vec == global_average_pool(e.query()));
    CHECK(support_only.class_vecs == both.class_vecs);
  }
}
