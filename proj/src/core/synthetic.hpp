//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_SYNTHETIC_HPP_
#define IPBIND_CORE_SYNTHETIC_HPP_

#include <filesystem>

#include <Eigen/Dense>

#include "rng.hpp"
#include "structio.hpp"

namespace ipbind {

// Uniformly distributed proper rotation (unit quaternion from normals).
Eigen::Matrix3d random_rotation(Rng &rng);

// x -> R x + w for every atom.
MolecularStructure rigid_transform(const MolecularStructure &s,
                                   const Eigen::Matrix3d &rotation,
                                   const Eigen::Vector3d &translation);
PocketComplex rigid_transform(const PocketComplex &pc,
                              const Eigen::Matrix3d &rotation,
                              const Eigen::Vector3d &translation);

struct SyntheticOptions {
  int residues_min = 8;
  int residues_max = 12;
  int atoms_per_residue_min = 4;
  int atoms_per_residue_max = 6;
  int ligand_atoms_min = 5;
  int ligand_atoms_max = 9;
  double shell_inner = 4.0; // residue anchors, Angstrom from the ligand
  double shell_outer = 9.0;
  double min_separation = 1.1;
};

// Protein residues scattered on a shell around a ligand grown near the
// origin. Atoms are never closer than min_separation.
MolecularStructure synthetic_protein(Rng &rng, const SyntheticOptions &opt,
                                     const MolecularStructure *avoid = nullptr);
MolecularStructure synthetic_ligand(Rng &rng, const SyntheticOptions &opt);

// Ligand, then protein around it, assembled uncropped. The label is a
// smooth function of contacts and composition plus a little noise, in a
// pK-like range.
PocketComplex synthetic_complex(Rng &rng, const SyntheticOptions &opt = {});

// Writes NAME.pdb / NAME.sdf pairs and manifest.csv under dir. Splits are
// assigned round-robin 6:2:2 over train/val/test.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path &dir,
                                              int count, std::uint64_t seed,
                                              const SyntheticOptions &opt = {});

} // namespace ipbind

#endif // IPBIND_CORE_SYNTHETIC_HPP_
