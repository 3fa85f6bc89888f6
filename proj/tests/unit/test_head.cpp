//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "head.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "config.hpp"
#include "error.hpp"
#include "frames.hpp"
#include "rng.hpp"
#include "structio.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"
#include "text_util.hpp"

namespace ipbind {
namespace {

ModelParams random_model(const ModelConfig &c, std::uint64_t seed) {
  return init_params(c, LossConfig {}, seed);
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / (1.0 + std::abs(b));
}

// Frame-averaged per-atom energies from the dense reference model.
testing::Vec ref_graph_energies(const ModelParams &p, const ModelConfig &c,
                                const MolecularStructure &s, int encoder) {
  const auto x = s.coordinates();
  const auto z = s.atomic_numbers();
  const auto frames = compute_frames(x, c.frame_mode);
  testing::Vec sum(z.size(), 0.0);
  for (const auto &r : frames.rotations) {
    const Eigen::MatrixX3d xf = (x.rowwise() - frames.centroid.transpose()) * r;
    const auto e = testing::ref_energies(
        p.head, testing::ref_encode(p.encoders[encoder],
                                    testing::ref_graph(z, xf, c.graph_cutoff,
                                                       c.rbf_count, c.rbf_cutoff)));
    for (std::size_t i = 0; i < e.size(); ++i)
      sum[i] += e[i];
  }
  for (auto &v : sum)
    v /= static_cast<double>(frames.rotations.size());
  return sum;
}

double ref_affinity(const ModelParams &p, const ModelConfig &c,
                    const PocketComplex &pc) {
  const bool sep = c.encoder_sharing == EncoderSharing::kSeparate;
  double bound = 0, unbound = 0;
  for (double v : ref_graph_energies(p, c, pc.complex, 0))
    bound += v;
  if (c.framework == Framework::kComplexOnly)
    return -bound;
  for (double v : ref_graph_energies(p, c, pc.protein_pocket, sep ? 1 : 0))
    unbound += v;
  for (double v : ref_graph_energies(p, c, pc.ligand, sep ? 2 : 0))
    unbound += v;
  return unbound - bound;
}

TEST(AtomicEnergies, ZeroFinalLayer) {
  ModelConfig c = testing::tiny_model();
  auto p = random_model(c, 1);
  p.head.w2.setZero();
  p.head.b2.setZero();
  Rng rng(1);
  const auto h = testing::random_matrix(rng, 7, c.hidden_dim);
  EXPECT_TRUE(atomic_energies(p.head, h).isZero(0.0));
}

TEST(AtomicEnergies, MatchesReference) {
  ModelConfig c = testing::tiny_model();
  c.hidden_dim = 12;
  auto p = zero_params(c);
  Rng rng(2);
  testing::randomize(p, rng, 0.7);
  auto h = testing::random_matrix(rng, 9, 12, 2.0);
  h.row(4) = h.row(1);
  const auto e = atomic_energies(p.head, h);
  for (int i = 0; i < 9; ++i) {
    const testing::Vec row(h.row(i).data(), h.row(i).data() + 12);
    EXPECT_NEAR(e[i], testing::ref_mlp(p.head, row)[0], 1e-6);
  }
  EXPECT_EQ(e[4], e[1]);
}

TEST(Predict, ConstantHeadGivesExactZero) {
  Rng rng(3);
  for (auto mode : { FrameMode::kSE3, FrameMode::kE3, FrameMode::kNone }) {
    ModelConfig c = testing::tiny_model(mode);
    auto p = random_model(c, 3);
    p.head.w2.setZero();
    p.head.b2.setConstant(0.731);
    for (int trial = 0; trial < 5; ++trial) {
      const auto pc = synthetic_complex(rng, testing::small_complex_options());
      const auto r = predict(p, c, pc);
      EXPECT_EQ(r.affinity, 0.0);
      EXPECT_TRUE(r.per_atom_delta.isZero(0.0));
    }
  }
}

TEST(Predict, MatchesDenseReferenceAllModes) {
  Rng rng(4);
  for (auto mode : { FrameMode::kSE3, FrameMode::kE3, FrameMode::kNone }) {
    for (auto sharing : { EncoderSharing::kShared, EncoderSharing::kSeparate }) {
      ModelConfig c = testing::tiny_model(mode);
      c.encoder_sharing = sharing;
      c.num_layers = 2;
      const auto p = random_model(c, 40 + static_cast<int>(mode));
      const auto pc = synthetic_complex(rng, testing::small_complex_options());
      const double want = ref_affinity(p, c, pc);
      EXPECT_NEAR(predict(p, c, pc).affinity, want, 1e-6 * (1 + std::abs(want)));
    }
  }
}

TEST(Predict, ComplexOnlyNegatesBoundSum) {
  Rng rng(5);
  ModelConfig c = testing::tiny_model();
  c.framework = Framework::kComplexOnly;
  const auto p = random_model(c, 5);
  const auto pc = synthetic_complex(rng, testing::small_complex_options());
  const auto r = predict(p, c, pc);
  EXPECT_TRUE(r.per_atom_unbound.isZero(0.0));
  EXPECT_NEAR(r.affinity, -r.per_atom_bound.sum(), 1e-12);
  EXPECT_NEAR(r.affinity, ref_affinity(p, c, pc), 1e-6 * (1 + std::abs(r.affinity)));
}

TEST(Predict, ConservationOfPerAtomTerms) {
  Rng rng(6);
  ModelConfig c = testing::tiny_model();
  const auto p = random_model(c, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pc = synthetic_complex(rng);
    const auto r = predict(p, c, pc);
    ASSERT_EQ(r.per_atom_delta.size(), static_cast<Eigen::Index>(pc.complex.size()));
    const double gap =
        r.per_atom_unbound.sum() - r.per_atom_bound.sum() - r.affinity;
    EXPECT_LE(std::abs(gap), 1e-5 * (1 + std::abs(r.affinity)));
    EXPECT_LE(std::abs(r.per_atom_delta.sum() + r.affinity),
              1e-5 * (1 + std::abs(r.affinity)));
  }
}

TEST(Predict, ProperMotionInvarianceSE3) {
  Rng rng(7);
  ModelConfig c = testing::tiny_model();
  c.num_layers = 2;
  const auto p = random_model(c, 7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pc = synthetic_complex(rng);
    const double base = predict(p, c, pc).affinity;
    for (int m = 0; m < 4; ++m) {
      const Eigen::Vector3d w(rng.uniform(-50, 50), rng.uniform(-50, 50),
                              rng.uniform(-50, 50));
      const auto moved = rigid_transform(pc, random_rotation(rng), w);
      EXPECT_LE(relative_gap(predict(p, c, moved).affinity, base), 1e-8);
    }
  }
}

TEST(Predict, ReflectionInvarianceE3) {
  Rng rng(8);
  ModelConfig c = testing::tiny_model(FrameMode::kE3);
  const auto p = random_model(c, 8);
  Eigen::Matrix3d mirror = Eigen::Matrix3d::Identity();
  mirror(0, 0) = -1;
  for (int trial = 0; trial < 5; ++trial) {
    const auto pc = synthetic_complex(rng);
    const double base = predict(p, c, pc).affinity;
    const Eigen::Matrix3d q = random_rotation(rng) * mirror;
    const auto moved = rigid_transform(pc, q, Eigen::Vector3d(3, -7, 11));
    EXPECT_LE(relative_gap(predict(p, c, moved).affinity, base), 1e-8);
  }
}

TEST(Predict, NoFramesBreaksInvariance) {
  Rng rng(9);
  ModelConfig c = testing::tiny_model(FrameMode::kNone);
  const auto p = random_model(c, 9);
  const auto pc = synthetic_complex(rng);
  const double base = predict(p, c, pc).affinity;
  double worst = 0;
  for (int m = 0; m < 10; ++m) {
    const auto moved = rigid_transform(pc, random_rotation(rng), Eigen::Vector3d::Zero());
    worst = std::max(worst, std::abs(predict(p, c, moved).affinity - base));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Predict, Float32TracksFloat64) {
  Rng rng(10);
  ModelConfig c = testing::tiny_model();
  const auto p = random_model(c, 10);
  const auto pc = synthetic_complex(rng);
  const double d = predict(p, c, pc).affinity;
  c.precision = Precision::kFloat32;
  EXPECT_LE(relative_gap(predict(p, c, pc).affinity, d), 1e-4);
}

PocketComplex separated(const PocketComplex &pc, double distance) {
  auto ligand = rigid_transform(pc.ligand, Eigen::Matrix3d::Identity(),
                                Eigen::Vector3d(distance, 0, 0));
  return make_complex(pc.protein_pocket, ligand, pc.label);
}

TEST(Predict, DistantLigandHasNoInteractionWithoutFrames) {
  Rng rng(11);
  ModelConfig c = testing::tiny_model(FrameMode::kNone);
  c.num_layers = 2;
  const auto p = random_model(c, 11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pc = separated(synthetic_complex(rng), 100.0);
    const auto r = predict(p, c, pc);
    EXPECT_LE(std::abs(r.affinity), 1e-5 * (1 + std::abs(r.per_atom_bound.sum())));
  }
}

TEST(Predict, DistantLigandHasNoInteractionWithRotationBlindEdges) {
  // Under frame averaging each graph is evaluated in its own frames, so the
  // identity needs a per-frame network that ignores edge direction.
  Rng rng(12);
  ModelConfig c = testing::tiny_model(FrameMode::kSE3);
  c.num_layers = 2;
  auto p = random_model(c, 12);
  p.encoders[0].edge.w1.rightCols(3).setZero();
  for (int trial = 0; trial < 5; ++trial) {
    const auto pc = separated(synthetic_complex(rng), 100.0);
    const auto r = predict(p, c, pc);
    EXPECT_LE(std::abs(r.affinity), 1e-5 * (1 + std::abs(r.per_atom_bound.sum())));
  }
}

TEST(Attribution, CsvRowsAndSums) {
  Rng rng(13);
  ModelConfig c = testing::tiny_model();
  const auto p = random_model(c, 13);
  const auto pc = synthetic_complex(rng);
  const auto r = predict(p, c, pc);
  const std::string text = attribution_csv(r, pc);
  const auto lines = internal::split_lines(text);
  ASSERT_GE(lines.size(), 1u);
  EXPECT_EQ(lines[0], "atom_index,source,element,x,y,z,e_unbound,e_bound,delta");
  std::size_t rows = 0;
  double delta_sum = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty())
      continue;
    const auto f = internal::split(lines[k], ',');
    ASSERT_EQ(f.size(), 9u);
    EXPECT_EQ(f[0], std::to_string(rows));
    EXPECT_EQ(f[1], rows < pc.protein_pocket.size() ? "protein" : "ligand");
    delta_sum += *internal::parse_number<double>(f[8]);
    ++rows;
  }
  EXPECT_EQ(rows, pc.protein_pocket.size() + pc.ligand.size());
  EXPECT_LE(std::abs(delta_sum + r.affinity), 1e-5 * (1 + std::abs(r.affinity)));
}

TEST(Attribution, ConstantHeadDeltasZero) {
  Rng rng(14);
  ModelConfig c = testing::tiny_model();
  auto p = random_model(c, 14);
  p.head.w2.setZero();
  const auto pc = synthetic_complex(rng);
  const std::string text = attribution_csv(predict(p, c, pc), pc);
  const auto lines = internal::split_lines(text);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (!lines[k].empty())
      EXPECT_EQ(*internal::parse_number<double>(internal::split(lines[k], ',')[8]), 0.0);
  }
}

TEST(Attribution, PdbCarriesDelta) {
  Rng rng(15);
  ModelConfig c = testing::tiny_model();
  const auto p = random_model(c, 15);
  const auto pc = synthetic_complex(rng);
  const auto r = predict(p, c, pc);
  const std::string text = attribution_pdb(r, pc);
  const auto lines = internal::split_lines(text);
  std::size_t atoms = 0, het = 0;
  for (const auto &line : lines) {
    if (line.rfind("ATOM", 0) == 0 || line.rfind("HETATM", 0) == 0) {
      const double b = *internal::parse_number<double>(internal::trim(line.substr(60, 6)));
      const double want = std::clamp(r.per_atom_delta[static_cast<Eigen::Index>(atoms)],
                                     -99.99, 999.99);
      EXPECT_NEAR(b, want, 0.006);
      het += line.rfind("HETATM", 0) == 0;
      ++atoms;
    }
  }
  EXPECT_EQ(atoms, pc.complex.size());
  EXPECT_EQ(het, pc.ligand.size());
}

TEST(AffinityGradient, MatchesFiniteDifferencesOnSample) {
  Rng rng(16);
  ModelConfig c = testing::tiny_model();
  const auto p = random_model(c, 16);
  const auto pc = synthetic_complex(rng, testing::small_complex_options());
  const auto prepared = prepare_complex(pc, c);
  auto grad = zero_params(c);
  accumulate_affinity_gradient(p, c, prepared, 1.0, grad);
  auto probe = p;
  auto tensors = tensors_of(probe);
  auto grads = tensors_of(grad);
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    if (tensors[t].name == "log_noise_sigma2")
      continue;
    for (std::size_t k = 0; k < tensors[t].data.size(); k += 7) {
      const double orig = tensors[t].data[k];
      const double h = 1e-5;
      tensors[t].data[k] = orig + h;
      const double up = predict(probe, c, prepared).affinity;
      tensors[t].data[k] = orig - h;
      const double down = predict(probe, c, prepared).affinity;
      tensors[t].data[k] = orig;
      const double fd = (up - down) / (2 * h);
      EXPECT_NEAR(grads[t].data[k], fd, 1e-5 + 1e-4 * std::abs(fd))
          << tensors[t].name << "[" << k << "]";
    }
  }
}

} // namespace
} // namespace ipbind
