//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "error.hpp"

namespace ipbind {
namespace {
constexpr std::array<const char *, 8> kResidueNames = {
  "ALA", "SER", "LEU", "ASP", "LYS", "PHE", "THR", "GLU",
};

Eigen::Vector3d random_unit(Rng &rng) {
  Eigen::Vector3d v;
  do {
    v = { rng.normal(), rng.normal(), rng.normal() };
  } while (v.norm() < 1e-8);
  return v.normalized();
}

bool clear_of(const Eigen::Vector3d &p, const std::vector<Eigen::Vector3d> &pts,
              double min_sep) {
  for (const auto &q : pts) {
    if ((p - q).norm() < min_sep)
      return false;
  }
  return true;
}

int uniform_int(Rng &rng, int lo, int hi) {
  return lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw DataError("cannot write '" + path.string() + "'");
  os << text;
}
} // namespace

Eigen::Matrix3d random_rotation(Rng &rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

MolecularStructure rigid_transform(const MolecularStructure &s,
                                   const Eigen::Matrix3d &rotation,
                                   const Eigen::Vector3d &translation) {
  MolecularStructure out = s;
  for (auto &a : out.atoms)
    a.position = rotation * a.position + translation;
  return out;
}

PocketComplex rigid_transform(const PocketComplex &pc,
                              const Eigen::Matrix3d &rotation,
                              const Eigen::Vector3d &translation) {
  return make_complex(rigid_transform(pc.protein_pocket, rotation, translation),
                      rigid_transform(pc.ligand, rotation, translation),
                      pc.label);
}

MolecularStructure synthetic_ligand(Rng &rng, const SyntheticOptions &opt) {
  MolecularStructure lig;
  lig.kind = StructureKind::kLigand;
  const int n = uniform_int(rng, opt.ligand_atoms_min, opt.ligand_atoms_max);
  std::vector<Eigen::Vector3d> placed;
  Eigen::Vector3d cur = Eigen::Vector3d::Zero();
  while (static_cast<int>(placed.size()) < n) {
    Eigen::Vector3d next = placed.empty() ? cur : cur + 1.5 * random_unit(rng);
    if (!clear_of(next, placed, opt.min_separation + 0.1))
      continue;
    placed.push_back(next);
    cur = next;
    AtomRecord a;
    const double u = rng.uniform();
    a.atomic_number = u < 0.7 ? 6 : (u < 0.85 ? 7 : (u < 0.97 ? 8 : 16));
    a.position = next;
    a.source = AtomSource::kLigand;
    a.residue_name = "LIG";
    a.atom_name = std::string(element_symbol(a.atomic_number));
    lig.atoms.push_back(a);
  }
  return lig;
}

MolecularStructure synthetic_protein(Rng &rng, const SyntheticOptions &opt,
                                     const MolecularStructure *avoid) {
  MolecularStructure prot;
  prot.kind = StructureKind::kProtein;
  std::vector<Eigen::Vector3d> placed;
  if (avoid) {
    for (const auto &a : avoid->atoms)
      placed.push_back(a.position);
  }
  const int residues = uniform_int(rng, opt.residues_min, opt.residues_max);
  for (int r = 0; r < residues; ++r) {
    const char *res_name = kResidueNames[rng.index(kResidueNames.size())];
    const int n_atoms = uniform_int(rng, opt.atoms_per_residue_min,
                                    opt.atoms_per_residue_max);
    Eigen::Vector3d anchor;
    do {
      anchor = random_unit(rng) * rng.uniform(opt.shell_inner, opt.shell_outer);
    } while (!clear_of(anchor, placed, opt.min_separation));

    Eigen::Vector3d cur = anchor;
    int made = 0;
    int attempts = 0;
    while (made < n_atoms && attempts < 200) {
      ++attempts;
      Eigen::Vector3d p = made == 0 ? cur : cur + 1.45 * random_unit(rng);
      if (!clear_of(p, placed, opt.min_separation))
        continue;
      placed.push_back(p);
      cur = p;
      static constexpr std::array<int, 4> backbone = { 7, 6, 6, 8 };
      static constexpr std::array<const char *, 4> names = { "N", "CA", "C",
                                                             "O" };
      AtomRecord a;
      if (made < 4) {
        a.atomic_number = backbone[made];
        a.atom_name = names[made];
      } else {
        const double u = rng.uniform();
        a.atomic_number = u < 0.6 ? 6 : (u < 0.8 ? 7 : (u < 0.95 ? 8 : 16));
        a.atom_name = std::string(element_symbol(a.atomic_number)) +
                      std::to_string(made);
      }
      a.position = p;
      a.residue = ResidueId { 'A', r + 1 };
      a.residue_name = res_name;
      a.source = AtomSource::kProtein;
      prot.atoms.push_back(a);
      ++made;
    }
  }
  return prot;
}

PocketComplex synthetic_complex(Rng &rng, const SyntheticOptions &opt) {
  auto ligand = synthetic_ligand(rng, opt);
  auto protein = synthetic_protein(rng, opt, &ligand);

  int contacts = 0;
  for (const auto &p : protein.atoms) {
    for (const auto &l : ligand.atoms) {
      if ((p.position - l.position).norm() <= 4.5)
        ++contacts;
    }
  }
  const double label = 3.0 + 0.08 * contacts +
                       0.15 * static_cast<double>(ligand.size()) +
                       0.3 * rng.normal();
  return make_complex(std::move(protein), std::move(ligand), label);
}

std::filesystem::path write_synthetic_dataset(const std::filesystem::path &dir,
                                              int count, std::uint64_t seed,
                                              const SyntheticOptions &opt) {
  if (count < 1)
    throw UsageError("synthetic dataset: count must be positive");
  std::filesystem::create_directories(dir);
  Rng rng(seed);
  std::string manifest = "id,protein,ligand,label,split\n";
  static constexpr std::array<const char *, 10> splits = {
    "train", "train", "train", "val", "test",
    "train", "train", "train", "val", "test",
  };
  for (int i = 0; i < count; ++i) {
    const auto pc = synthetic_complex(rng, opt);
    char id[32];
    std::snprintf(id, sizeof id, "syn%04d", i);
    write_file(dir / (std::string(id) + ".pdb"), write_pdb(pc.protein_pocket));
    write_file(dir / (std::string(id) + ".sdf"), write_sdf(pc.ligand, id));
    char row[160];
    std::snprintf(row, sizeof row, "%s,%s.pdb,%s.sdf,%.3f,%s\n", id, id, id,
                  *pc.label, splits[static_cast<std::size_t>(i) % splits.size()]);
    manifest += row;
  }
  const auto path = dir / "manifest.csv";
  write_file(path, manifest);
  return path;
}

} // namespace ipbind
