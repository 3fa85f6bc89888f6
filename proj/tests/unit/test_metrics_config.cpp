//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "config.hpp"
#include "error.hpp"
#include "metrics.hpp"

namespace ipbind {
namespace {

using V = std::vector<double>;

TEST(Rmse, Examples) {
  const V y = { 1.0, 2.0, 7.5 };
  EXPECT_EQ(metric_rmse(y, y), 0.0);
  const V shifted = { 2.0, 3.0, 8.5 };
  EXPECT_DOUBLE_EQ(metric_rmse(shifted, y), 1.0);
  EXPECT_NEAR(metric_rmse(V { 0.0, 0.0 }, V { 3.0, 4.0 }), 3.5355339059327378, 1e-15);
}

TEST(Rmse, LengthErrors) {
  EXPECT_THROW(metric_rmse(V { 1.0 }, V { 1.0, 2.0 }), UsageError);
  EXPECT_THROW(metric_rmse(V {}, V {}), UsageError);
}

TEST(Pearson, Examples) {
  const V y = { 1.0, 4.0, 2.0, 8.0 };
  V affine, neg;
  for (double v : y) {
    affine.push_back(2 * v + 3);
    neg.push_back(-v);
  }
  EXPECT_NEAR(metric_pearson(affine, y), 1.0, 1e-15);
  EXPECT_NEAR(metric_pearson(neg, y), -1.0, 1e-15);
  EXPECT_NEAR(metric_pearson(V { 1, 2, 3 }, V { 1, 3, 2 }), 0.5, 1e-15);
}

TEST(Pearson, ErrorsAreDistinct) {
  EXPECT_THROW(metric_pearson(V { 1, 2 }, V { 1, 2, 3 }), UsageError);
  EXPECT_THROW(metric_pearson(V { 1 }, V { 1 }), UsageError);
  EXPECT_THROW(metric_pearson(V { 2, 2, 2 }, V { 1, 2, 3 }), NumericalError);
  EXPECT_THROW(metric_pearson(V { 1, 2, 3 }, V { 5, 5, 5 }), NumericalError);
}

TEST(ComputeMetrics, NanPearsonWhenUndefined) {
  const auto m = compute_metrics(V { 4.0, 4.0 }, V { 3.0, 5.0 });
  EXPECT_EQ(m.n, 2u);
  EXPECT_DOUBLE_EQ(m.rmse, 1.0);
  EXPECT_TRUE(std::isnan(m.pearson));
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config("# comment\n"
                              "hidden_dim = 32   # atoms\n"
                              "frame_mode = E3\n"
                              "encoder_sharing = separate\n"
                              "peak_lr = 0.002\n"
                              "\n"
                              "seed = 42\n");
  EXPECT_EQ(c.model.hidden_dim, 32);
  EXPECT_EQ(c.model.num_layers, 4);
  EXPECT_EQ(c.model.rbf_count, 32);
  EXPECT_EQ(c.model.frame_mode, FrameMode::kE3);
  EXPECT_EQ(c.model.encoder_sharing, EncoderSharing::kSeparate);
  EXPECT_EQ(c.train.peak_lr, 0.002);
  EXPECT_EQ(c.train.init_lr, 1e-6);
  EXPECT_EQ(c.train.warmup_epochs, 2);
  EXPECT_EQ(c.train.seed, 42u);
  EXPECT_EQ(c.loss.rank_alpha, 1.0);
}

TEST(Config, UnknownKeyIsError) {
  try {
    parse_config("hiden_dim = 64\n");
    FAIL() << "expected UsageError";
  } catch (const UsageError &e) {
    EXPECT_NE(std::string(e.what()).find("hiden_dim"), std::string::npos);
  }
}

TEST(Config, BadValuesAreErrors) {
  for (const char *text :
       { "hidden_dim = 0\n", "hidden_dim = 3.5\n", "num_layers = 0\n",
         "rbf_count = 1\n", "rbf_cutoff = -1\n", "frame_mode = SO3\n",
         "peak_lr = abc\n", "init_lr = 0.1\npeak_lr = 0.01\n",
         "epochs = 2\nwarmup_epochs = 2\n", "noise_sigma2 = 0\n",
         "rank_alpha = -1\n", "missing equals\n", "batch_size = 0\n" })
    EXPECT_THROW(parse_config(text), UsageError) << text;
}

TEST(Config, SerializeRoundTrips) {
  RunConfig c;
  c.model.hidden_dim = 24;
  c.model.rbf_cutoff = 4.75;
  c.model.framework = Framework::kComplexOnly;
  c.model.precision = Precision::kFloat32;
  c.loss.ndcg_temperature = 0.1 + 0.2; // not exactly representable
  c.loss.ndcg_gain = NdcgGain::kExponential;
  c.train.peak_lr = 1.0 / 3.0;
  c.train.seed = 0xfedcba9876543210ull;
  const auto back = parse_config(serialize_config(c));
  EXPECT_EQ(serialize_config(back), serialize_config(c));
  EXPECT_EQ(back.loss.ndcg_temperature, c.loss.ndcg_temperature);
  EXPECT_EQ(back.train.peak_lr, c.train.peak_lr);
  EXPECT_EQ(back.train.seed, c.train.seed);
  EXPECT_EQ(back.model.precision, Precision::kFloat32);
}

} // namespace
} // namespace ipbind
