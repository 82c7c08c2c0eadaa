#include <cmath>

#include <gtest/gtest.h>

#include "sdc/protocol.hpp"
#include "sdc/solvers.hpp"

namespace sdc {
namespace {

std::vector<Dataset> random_datasets(std::size_t l, RngSeed seed) {
  Rng rng(seed);
  std::vector<Dataset> out;
  for (std::size_t i = 0; i < l; ++i) {
    Dataset d{i, {}};
    const std::size_t len = 1 + rng.below(5);
    for (std::size_t j = 0; j < len; ++j) d.values.push_back(rng.normal());
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SubfunctionSpec> sums(std::size_t l) { return std::vector<SubfunctionSpec>(l, {SubfunctionKind::sum, {}}); }

TEST(Subfunctions, HandValues) {
  const Vec v{1, 2, 3};
  EXPECT_EQ(evaluate({SubfunctionKind::sum, {}}, v), 6.0);
  EXPECT_EQ(evaluate({SubfunctionKind::mean, {}}, v), 2.0);
  EXPECT_EQ(evaluate({SubfunctionKind::max, {}}, v), 3.0);
  const Vec three{3};
  EXPECT_EQ(evaluate({SubfunctionKind::polyval, {1, 0, 2}}, three), 19.0);
  const Vec tri{3, 4};
  EXPECT_NEAR(evaluate({SubfunctionKind::pnorm, {2}}, tri), 5.0, 1e-14);
}

TEST(Subfunctions, MalformedParams) {
  const Vec v{1};
  EXPECT_THROW(evaluate({SubfunctionKind::polyval, {}}, v), KindMismatch);
  EXPECT_THROW(evaluate({SubfunctionKind::pnorm, {0.5}}, v), KindMismatch);
  EXPECT_THROW(evaluate({SubfunctionKind::pnorm, {}}, v), KindMismatch);
  EXPECT_THROW(evaluate({SubfunctionKind::sum, {}}, Vec{}), InvalidArgument);
  EXPECT_THROW(subfunction_kind_from_string("median"), KindMismatch);
  for (auto k : {SubfunctionKind::sum, SubfunctionKind::mean, SubfunctionKind::max, SubfunctionKind::polyval,
                 SubfunctionKind::pnorm})
    EXPECT_EQ(subfunction_kind_from_string(to_string(k)), k);
}

TEST(ComputeFiles, LengthMismatch) {
  const auto ds = random_datasets(3, RngSeed{1});
  EXPECT_THROW(compute_files(ds, sums(2)), DimensionMismatch);
}

TEST(Assignment, Examples) {
  for (const auto& w : derive_assignment(Mat(3, 4))) EXPECT_TRUE(w.empty());
  Mat e(3, 4);
  for (std::size_t l = 0; l < 4; ++l) e(1, l) = 1.0;
  const auto a = derive_assignment(e);
  EXPECT_TRUE(a[0].empty());
  EXPECT_EQ(a[1].size(), 4u);
  EXPECT_TRUE(a[2].empty());

  const Mat d = gaussian_matrix(4, 16, RngSeed{3});
  const Mat f = gaussian_matrix(4, 8, RngSeed{4});
  const auto zf = zero_forcing_scheme(d, f, RngSeed{5});
  std::size_t total = 0;
  for (const auto& w : derive_assignment(zf.E)) total += w.size();
  EXPECT_LE(total, 4u * 8u);
  EXPECT_DOUBLE_EQ(zf.gamma, static_cast<double>(total) / (16.0 * 8.0));
}

TEST(Encode, Examples) {
  const Vec w{1.5, -2.0, 4.0};
  EXPECT_EQ(server_encode(Mat::identity(3), w), w);
  Mat e(2, 3);
  for (std::size_t l = 0; l < 3; ++l) e(0, l) = 1.0;
  EXPECT_EQ(server_encode(e, w)[0], 3.5);
  EXPECT_EQ(server_encode(e, w)[1], 0.0);
  EXPECT_THROW(server_encode(e, Vec{1, 2}), DimensionMismatch);

  const Mat r = gaussian_matrix(5, 7, RngSeed{6});
  const Vec wr = gaussian_matrix(7, 1, RngSeed{7}).column(0);
  const Vec z = server_encode(r, wr);
  for (std::size_t n = 0; n < 5; ++n) {
    double acc = 0.0;
    for (std::size_t l = 0; l < 7; ++l) acc += r(n, l) * wr[l];
    EXPECT_NEAR(z[n], acc, 1e-12);
  }
}

TEST(Encode, Locality) {
  // Changing a file outside W_n must not change z_n.
  Mat e(3, 4);
  e(0, 0) = 2.0;
  e(1, 1) = -1.0;
  e(1, 3) = 0.5;
  e(2, 2) = 1.0;
  Vec w{1, 2, 3, 4};
  const Vec z0 = server_encode(e, w);
  w[3] = 100.0;
  const Vec z1 = server_encode(e, w);
  EXPECT_EQ(z0[0], z1[0]);
  EXPECT_EQ(z0[2], z1[2]);
  EXPECT_NE(z0[1], z1[1]);
}

TEST(Multicast, Examples) {
  for (const auto& t : multicast_targets(gaussian_matrix(3, 5, RngSeed{8}))) EXPECT_EQ(t.size(), 3u);
  const auto id = multicast_targets(Mat::identity(4));
  for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(id[n], IndexSet{n});
  Mat d = gaussian_matrix(3, 5, RngSeed{9});
  for (std::size_t k = 0; k < 3; ++k) d(k, 2) = 0.0;
  EXPECT_TRUE(multicast_targets(d)[2].empty());
}

TEST(Decode, Examples) {
  const Vec z{2, 3, 5};
  EXPECT_EQ(user_decode(Mat::identity(3), z), z);
  EXPECT_EQ(user_decode(Mat(1, 2, {1, 1}), Vec{2, 3}), Vec{5});
  EXPECT_THROW(user_decode(Mat(1, 2, {1, 1}), z), DimensionMismatch);

  const Mat d = gaussian_matrix(4, 6, RngSeed{10});
  const Vec zr = gaussian_matrix(6, 1, RngSeed{11}).column(0);
  const Vec f = user_decode(d, zr);
  const Vec ref = matvec(d, zr);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(f[k], ref[k], 1e-12);
}

TEST(Decode, Locality) {
  // User 0 hears only server 0; changing z_1 leaves f_0 alone.
  const Mat d(2, 2, {1, 0, 1, 1});
  const Vec a = user_decode(d, Vec{1, 2});
  const Vec b = user_decode(d, Vec{1, 9});
  EXPECT_EQ(a[0], b[0]);
  EXPECT_NE(a[1], b[1]);
}

TEST(RunRound, ExactForEverySolver) {
  const std::size_t k = 4, n = 8, l = 3;
  const Mat d = gaussian_matrix(k, n, RngSeed{12});
  const Mat f = gaussian_matrix(k, l, RngSeed{13});
  for (auto m : {Method::zero_forcing, Method::l0, Method::basis_pursuit}) {
    const auto out = solve_scheme(m, d, f, RngSeed{14});
    for (std::uint64_t draw = 0; draw < 20; ++draw) {
      const auto ds = random_datasets(l, RngSeed{100 + draw});
      const auto t = run_round(f, d, out.E, ds, sums(l));
      EXPECT_TRUE(t.exact) << to_string(m) << " draw " << draw << " err " << t.max_abs_error;
      EXPECT_LE(t.max_abs_error, 1e-9 * (1.0 + max_abs(t.f_expected)));
      EXPECT_EQ(t.comm_messages, communication_cost(t));
    }
  }
}

TEST(RunRound, CorruptionDetected) {
  const Mat d = gaussian_matrix(3, 6, RngSeed{15});
  const Mat f = gaussian_matrix(3, 2, RngSeed{16});
  Mat e = zero_forcing_scheme(d, f, RngSeed{17}).E;
  e(0, 0) += 1.0;
  int flipped = 0;
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const auto t = run_round(f, d, e, random_datasets(2, RngSeed{200 + draw}), sums(2));
    flipped += !t.exact;
  }
  EXPECT_GE(flipped, 19);
}

TEST(RunRound, ZeroDemand) {
  const Mat d = gaussian_matrix(2, 3, RngSeed{18});
  const auto t = run_round(Mat(2, 2), d, Mat(3, 2), random_datasets(2, RngSeed{19}), sums(2));
  EXPECT_TRUE(t.exact);
  EXPECT_EQ(t.f_decoded, Vec(2, 0.0));
  EXPECT_EQ(t.f_expected, Vec(2, 0.0));
}

TEST(RunRound, DimensionChecks) {
  const Mat d = gaussian_matrix(2, 3, RngSeed{20});
  EXPECT_THROW(run_round(Mat(2, 2), d, Mat(2, 2), random_datasets(2, RngSeed{1}), sums(2)), DimensionMismatch);
  EXPECT_THROW(run_round(Mat(2, 2), d, Mat(3, 2), random_datasets(3, RngSeed{1}), sums(3)), DimensionMismatch);
}

TEST(CommunicationCost, Examples) {
  const auto ds = random_datasets(1, RngSeed{21});
  const Mat dense = gaussian_matrix(3, 5, RngSeed{22});
  EXPECT_EQ(run_round(Mat(3, 1), dense, Mat(5, 1), ds, sums(1)).comm_messages, 15u);
  EXPECT_EQ(run_round(Mat(4, 1), Mat::identity(4), Mat(4, 1), ds, sums(1)).comm_messages, 4u);
  Mat holed = dense;
  for (std::size_t k = 0; k < 3; ++k) holed(k, 1) = 0.0;
  EXPECT_EQ(communication_cost(run_round(Mat(3, 1), holed, Mat(5, 1), ds, sums(1))), 12u);
}

}  // namespace
}  // namespace sdc
